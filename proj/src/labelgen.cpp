#include "textmountain/labelgen.hpp"

#include "textmountain/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace textmountain {
namespace {

constexpr double kMinHeight = 1e-6;
constexpr double kMinThrust = 1e-9;
constexpr double kZeroDistance = 1e-6;

double tcbp_from(const std::array<double, 4>& d, double h) {
  const double m = *std::min_element(d.begin(), d.end());
  return std::clamp(2.0 * m / h, 0.0, 1.0);
}

double height_from(const std::array<double, 4>& d) {
  const double h = std::min(d[0] + d[2], d[1] + d[3]);
  if (h < kMinHeight) throw GeometryError("degenerate polygon: local height below 1e-6");
  return h;
}

Vec2 normalized_or_zero(const Vec2& v) {
  const double n = v.norm();
  return n < kMinThrust ? Vec2::Zero() : Vec2(v / n);
}

PixelLabel quad_label(const PreparedPolygon& poly, const Point& p) {
  const auto a = perp_vectors_quad(poly.polygon, p);
  std::array<double, 4> d;
  for (int i = 0; i < 4; ++i) d[i] = a[i].norm();
  PixelLabel out;
  out.height = height_from(d);
  out.tcbp = tcbp_from(d, out.height);
  Vec2 v = Vec2::Zero();
  for (int i = 0; i < 4; ++i) {
    const double w = std::max(out.height / 2 - d[i], 0.0);
    if (w == 0) continue;
    const Vec2 dir = d[i] < kZeroDistance ? poly.inward_normals[i] : Vec2(a[i] / d[i]);
    v += w * dir;
  }
  out.tcd = normalized_or_zero(v);
  return out;
}

PixelLabel curved_label(const PreparedPolygon& poly, const Point& p) {
  std::array<SideProjection<double>, 4> proj;
  std::array<double, 4> c;
  for (int i = 0; i < 4; ++i) {
    proj[i] = closest_on_side<double>(poly.sides.sides[i], p);
    c[i] = proj[i].distance;
  }
  PixelLabel out;
  out.height = height_from(c);
  out.tcbp = tcbp_from(c, out.height);
  Vec2 v = Vec2::Zero();
  for (int i = 0; i < 4; ++i) {
    const double w = std::max(out.height / 2 - c[i], 0.0);
    if (w == 0) continue;
    const Vec2 f = interp_unit(poly.smoothed[i], proj[i].segment, proj[i].point);
    v += w * center_dir_from_side(f);
  }
  out.tcd = normalized_or_zero(v);
  return out;
}

std::optional<PreparedPolygon> try_prepare(const TextPolygon& poly) {
  try {
    PreparedPolygon prepared(poly);
    if (reference_height(prepared) < kMinHeight) return std::nullopt;
    return prepared;
  } catch (const GeometryError&) {
    return std::nullopt;
  }
}

struct Box {
  int x0, y0, x1, y1;  // inclusive pixel range, possibly empty
};

Box pixel_box(const TextPolygon& poly, int width, int height) {
  double minx = poly.vertices[0].x(), maxx = minx;
  double miny = poly.vertices[0].y(), maxy = miny;
  for (const auto& v : poly.vertices) {
    minx = std::min(minx, v.x());
    maxx = std::max(maxx, v.x());
    miny = std::min(miny, v.y());
    maxy = std::max(maxy, v.y());
  }
  // Pixel x covers center x + 0.5.
  Box b;
  b.x0 = std::max(0, static_cast<int>(std::floor(minx - 0.5)));
  b.y0 = std::max(0, static_cast<int>(std::floor(miny - 0.5)));
  b.x1 = std::min(width - 1, static_cast<int>(std::ceil(maxx - 0.5)));
  b.y1 = std::min(height - 1, static_cast<int>(std::ceil(maxy - 0.5)));
  return b;
}

}  // namespace

PreparedPolygon::PreparedPolygon(TextPolygon poly) : polygon(std::move(poly)), sides(sides_of(polygon)) {
  for (int i = 0; i < 4; ++i) {
    const auto& s = sides.sides[i];
    const Vec2 d = s.back() - s.front();
    if (polygon.kind == PolygonKind::Quad) {
      if (d.norm() < 1e-9) throw GeometryError("degenerate side (zero length)");
      inward_normals[i] = center_dir_from_side<double>(d.normalized());
    } else {
      smoothed[i] = smooth_side<double>(s);
    }
  }
}

PixelLabel label_at(const PreparedPolygon& poly, const Point& p) {
  return poly.polygon.kind == PolygonKind::Quad ? quad_label(poly, p) : curved_label(poly, p);
}

double tcbp_quad(const TextPolygon& poly, const Point& p) {
  return quad_label(PreparedPolygon(poly), p).tcbp;
}

Vec2 tcd_quad(const TextPolygon& poly, const Point& p) {
  return quad_label(PreparedPolygon(poly), p).tcd;
}

double tcbp_curved(const PreparedPolygon& poly, const Point& p) { return curved_label(poly, p).tcbp; }

Vec2 tcd_curved(const PreparedPolygon& poly, const Point& p) { return curved_label(poly, p).tcd; }

double reference_height(const PreparedPolygon& poly) {
  const auto& v = poly.polygon.vertices;
  const Point center = poly.polygon.kind == PolygonKind::Quad ? polygon_centroid<double>(v)
                                                              : Point((v[3] + v[10]) / 2);
  return label_at(poly, center).height;
}

namespace {

struct Plan {
  std::vector<std::optional<PreparedPolygon>> prepared;
  std::vector<std::size_t> paint_order;  // larger areas first, smaller overwrite
  std::vector<Box> boxes;
  std::vector<bool> small;
  int skipped = 0;
};

Plan make_plan(std::span<const TextPolygon> polys, int width, int height) {
  Plan plan;
  plan.prepared.reserve(polys.size());
  for (const auto& p : polys) {
    plan.prepared.push_back(try_prepare(p));
    if (!plan.prepared.back()) ++plan.skipped;
    plan.boxes.push_back(pixel_box(p, width, height));
    plan.small.push_back(plan.prepared.back() && reference_height(*plan.prepared.back()) < kMinTextHeight);
  }
  plan.paint_order.resize(polys.size());
  std::iota(plan.paint_order.begin(), plan.paint_order.end(), 0);
  // Painted in order, so the smallest area (then the earliest index) wins.
  std::vector<double> areas(polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i) areas[i] = polys[i].area();
  std::sort(plan.paint_order.begin(), plan.paint_order.end(), [&](std::size_t a, std::size_t b) {
    return areas[a] != areas[b] ? areas[a] > areas[b] : a > b;
  });
  return plan;
}

// Owner (index + 1) of each pixel in one row among text polygons, and the
// ignore flag from DO-NOT-CARE or too-thin polygons.
void rasterize_row(const Plan& plan, int y, int width, std::span<std::int32_t> owner,
                   std::span<std::uint8_t> ignore) {
  const double cy = y + 0.5;
  for (const std::size_t idx : plan.paint_order) {
    const auto& prep = plan.prepared[idx];
    const Box& b = plan.boxes[idx];
    if (!prep || y < b.y0 || y > b.y1) continue;
    const auto verts = prep->polygon.points();
    const bool masked = prep->polygon.ignore || plan.small[idx];
    for (int x = b.x0; x <= b.x1 && x < width; ++x) {
      if (!point_in_polygon<double>(verts, Point(x + 0.5, cy))) continue;
      if (masked) {
        ignore[x] = 1;
      } else {
        owner[x] = static_cast<std::int32_t>(idx + 1);
      }
    }
  }
}

}  // namespace

TsRaster rasterize_ts(std::span<const TextPolygon> polys, int width, int height, int workers) {
  const Plan plan = make_plan(polys, width, height);
  TsRaster out;
  out.ts = FloatPlane::Zero(height, width);
  out.ignore = Mask::Zero(height, width);
  out.instance_gt = InstanceMap(width, height);
  out.instance_gt.count = static_cast<int>(polys.size());
  out.skipped = plan.skipped;
  parallel_for(static_cast<std::size_t>(height), workers, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      auto owner = std::span<std::int32_t>(out.instance_gt.labels.row(y).data(), width);
      auto ign = std::span<std::uint8_t>(out.ignore.row(y).data(), width);
      rasterize_row(plan, static_cast<int>(y), width, owner, ign);
      for (int x = 0; x < width; ++x) out.ts(y, x) = owner[x] > 0 ? 1.0f : 0.0f;
    }
  });
  return out;
}

LabelSet generate_labels(std::span<const TextPolygon> polys, int width, int height, int workers) {
  const Plan plan = make_plan(polys, width, height);
  LabelSet out;
  out.ts = RasterMap(width, height, 1);
  out.tcbp = RasterMap(width, height, 1);
  out.tcd = RasterMap(width, height, 2);
  out.ignore = Mask::Zero(height, width);
  out.instance_gt = InstanceMap(width, height);
  out.instance_gt.count = static_cast<int>(polys.size());
  out.skipped = plan.skipped;
  parallel_for(static_cast<std::size_t>(height), workers, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t yy = y0; yy < y1; ++yy) {
      const int y = static_cast<int>(yy);
      auto owner = std::span<std::int32_t>(out.instance_gt.labels.row(y).data(), width);
      auto ign = std::span<std::uint8_t>(out.ignore.row(y).data(), width);
      rasterize_row(plan, y, width, owner, ign);
      for (int x = 0; x < width; ++x) {
        if (owner[x] == 0) continue;
        out.ts.at(0, y, x) = 1.0f;
        PixelLabel l;
        try {
          l = label_at(*plan.prepared[owner[x] - 1], Point(x + 0.5, y + 0.5));
        } catch (const GeometryError&) {
          continue;
        }
        out.tcbp.at(0, y, x) = static_cast<float>(l.tcbp);
        out.tcd.at(0, y, x) = static_cast<float>(l.tcd.x());
        out.tcd.at(1, y, x) = static_cast<float>(l.tcd.y());
      }
    }
  });
  return out;
}

}  // namespace textmountain
