#include "textmountain/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace textmountain {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Point> rotated_rect(const Point& c, double w, double h, double theta) {
  const Vec2 u(std::cos(theta), std::sin(theta));
  const Vec2 v(-u.y(), u.x());
  const Vec2 a = u * (w / 2), b = v * (h / 2);
  return {c - a - b, c + a - b, c + a + b, c - a + b};
}

std::vector<Point> ring_sector(const Point& c, double r_in, double h, double start, double span) {
  std::vector<Point> pts;
  pts.reserve(14);
  const double r_out = r_in + h;
  for (int i = 0; i < 7; ++i) {
    const double t = start + span * i / 6.0;
    pts.emplace_back(c.x() + r_out * std::cos(t), c.y() + r_out * std::sin(t));
  }
  for (int i = 6; i >= 0; --i) {
    const double t = start + span * i / 6.0;
    pts.emplace_back(c.x() + r_in * std::cos(t), c.y() + r_in * std::sin(t));
  }
  return pts;
}

// Pixel-center occupancy of placed texts, grown by the separation.
class Occupancy {
 public:
  Occupancy(int w, int h) : taken_(Mask::Zero(h, w)) {}

  // Returns the covered pixels when the polygon fits, nothing otherwise.
  std::optional<std::vector<std::array<int, 2>>> fit(const std::vector<Point>& poly, int margin, int grow) const {
    const auto [x0, y0, x1, y1] = bounds(poly);
    if (x0 < margin || y0 < margin || x1 >= taken_.cols() - margin || y1 >= taken_.rows() - margin) {
      return std::nullopt;
    }
    std::vector<std::array<int, 2>> cells;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (!point_in_polygon<double>(poly, Point(x + 0.5, y + 0.5))) continue;
        for (int dy = -grow; dy <= grow; ++dy) {
          for (int dx = -grow; dx <= grow; ++dx) {
            const int yy = y + dy, xx = x + dx;
            if (yy >= 0 && xx >= 0 && yy < taken_.rows() && xx < taken_.cols() && taken_(yy, xx)) {
              return std::nullopt;
            }
          }
        }
        cells.push_back({x, y});
      }
    }
    return cells;
  }

  void mark(const std::vector<std::array<int, 2>>& cells) {
    for (const auto& [x, y] : cells) taken_(y, x) = 1;
  }

 private:
  static std::array<int, 4> bounds(const std::vector<Point>& poly) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& p : poly) {
      x0 = std::min(x0, p.x());
      y0 = std::min(y0, p.y());
      x1 = std::max(x1, p.x());
      y1 = std::max(y1, p.y());
    }
    return {static_cast<int>(std::floor(x0)) - 1, static_cast<int>(std::floor(y0)) - 1,
            static_cast<int>(std::ceil(x1)) + 1, static_cast<int>(std::ceil(y1)) + 1};
  }

  Mask taken_;
};

std::vector<Point> draw_quad(const SceneConfig& cfg, std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double limit = 0.9 * std::min(cfg.width, cfg.height);
  while (true) {
    const double h = cfg.quad_min_height + unit(rng) * (cfg.quad_max_height - cfg.quad_min_height);
    const double w = h * (1.0 + unit(rng) * (cfg.max_aspect - 1.0));
    if (w > limit) continue;
    const double theta = unit(rng) * 2 * kPi;
    const Point c(unit(rng) * cfg.width, unit(rng) * cfg.height);
    return rotated_rect(c, w, h, theta);
  }
}

std::vector<Point> draw_curved(const SceneConfig& cfg, std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = cfg.curved_min_height + unit(rng) * (cfg.curved_max_height - cfg.curved_min_height);
  const double r_in = h * (1.5 + 2.5 * unit(rng));
  const double span = (60.0 + 120.0 * unit(rng)) * kPi / 180.0;
  const double start = unit(rng) * 2 * kPi;
  const Point c(unit(rng) * cfg.width, unit(rng) * cfg.height);
  return ring_sector(c, r_in, h, start, span);
}

void place(std::vector<TextPolygon>& out, Occupancy& occ, std::vector<Point> poly, const SceneConfig& cfg) {
  const auto cells = occ.fit(poly, cfg.margin, cfg.separation + 1);
  if (!cells || cells->empty()) return;
  try {
    out.push_back(TextPolygon::make(std::move(poly)));
  } catch (const GeometryError&) {
    return;
  }
  occ.mark(*cells);
}

}  // namespace

std::vector<TextPolygon> random_scene(const SceneConfig& cfg, std::mt19937& rng) {
  std::uniform_int_distribution<int> count(cfg.min_texts, cfg.max_texts);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int target = count(rng);
  std::vector<TextPolygon> out;
  Occupancy occ(cfg.width, cfg.height);
  for (int t = 0; t < target; ++t) {
    const bool curved = unit(rng) < cfg.curved_fraction;
    for (int a = 0; a < cfg.attempts; ++a) {
      const std::size_t before = out.size();
      place(out, occ, curved ? draw_curved(cfg, rng) : draw_quad(cfg, rng), cfg);
      if (out.size() > before) break;
    }
  }
  return out;
}

std::vector<TextPolygon> dense_scene(int width, int height, std::mt19937& rng) {
  SceneConfig cfg;
  cfg.width = width;
  cfg.height = height;
  std::vector<TextPolygon> out;
  Occupancy occ(width, height);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int tries = width * height / 40;
  for (int a = 0; a < tries; ++a) {
    place(out, occ, unit(rng) < cfg.curved_fraction ? draw_curved(cfg, rng) : draw_quad(cfg, rng), cfg);
  }
  return out;
}

RasterMap add_noise(const RasterMap& maps, const NoiseConfig& noise, std::mt19937& rng) {
  RasterMap out = maps;
  std::normal_distribution<float> value(0.0f, static_cast<float>(noise.sigma));
  std::normal_distribution<double> angle(0.0, noise.angle_deg * kPi / 180.0);
  for (int c = 0; c < std::min(2, out.channels()); ++c) {
    if (noise.sigma <= 0) break;
    auto ch = out.channel(c);
    for (Eigen::Index i = 0; i < ch.size(); ++i) ch.data()[i] = std::clamp(ch.data()[i] + value(rng), 0.0f, 1.0f);
  }
  if (out.channels() >= 4 && noise.angle_deg > 0) {
    auto ux = out.channel(2);
    auto uy = out.channel(3);
    for (Eigen::Index i = 0; i < ux.size(); ++i) {
      const double x = ux.data()[i], y = uy.data()[i];
      if (x == 0 && y == 0) continue;
      const double a = angle(rng), ca = std::cos(a), sa = std::sin(a);
      ux.data()[i] = static_cast<float>(ca * x - sa * y);
      uy.data()[i] = static_cast<float>(sa * x + ca * y);
    }
  }
  return out;
}

}  // namespace textmountain
