#include "textmountain/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace textmountain {

PolygonMode parse_polygon_mode(std::string_view name) {
  if (name == "quad") return PolygonMode::Quad;
  if (name == "curved") return PolygonMode::Curved;
  if (name == "auto") return PolygonMode::Auto;
  throw std::invalid_argument("unknown polygon mode '" + std::string(name) + "' (expected quad, curved or auto)");
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  // Keeping left turns in y-down coordinates yields a clockwise-on-screen hull.
  auto turn = [](const Point& o, const Point& a, const Point& b) { return cross<double>(a - o, b - o); };
  for (const auto& p : pts) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (signed_area<double>(hull) < 0) std::reverse(hull.begin(), hull.end());
  return hull;
}

namespace {

std::array<Point, 4> rect_corners(const Vec2& axis, const Vec2& normal, double u0, double u1, double v0, double v1) {
  std::array<Point, 4> c = {axis * u0 + normal * v0, axis * u1 + normal * v0, axis * u1 + normal * v1,
                            axis * u0 + normal * v1};
  if (signed_area<double>(std::span<const Point>(c)) < 0) std::swap(c[1], c[3]);
  // Start at the corner nearest the image origin for a stable ordering.
  std::size_t start = 0;
  for (std::size_t i = 1; i < 4; ++i) {
    const double si = c[i].x() + c[i].y(), ss = c[start].x() + c[start].y();
    if (si < ss - 1e-9 || (std::abs(si - ss) <= 1e-9 && c[i].y() < c[start].y())) start = i;
  }
  std::rotate(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(start), c.end());
  return c;
}

}  // namespace

RotatedRect min_area_rect(const std::vector<Point>& points) {
  if (points.empty()) throw std::invalid_argument("min_area_rect: no points");
  const auto hull = convex_hull(points);
  RotatedRect best;
  double best_area = std::numeric_limits<double>::infinity();
  auto consider = [&](Vec2 axis) {
    axis.normalize();
    const Vec2 normal(-axis.y(), axis.x());
    double u0 = std::numeric_limits<double>::infinity(), u1 = -u0, v0 = u0, v1 = -u0;
    for (const auto& p : hull) {
      const double u = p.dot(axis), v = p.dot(normal);
      u0 = std::min(u0, u);
      u1 = std::max(u1, u);
      v0 = std::min(v0, v);
      v1 = std::max(v1, v);
    }
    const double area = (u1 - u0) * (v1 - v0);
    if (area < best_area - 1e-9) {
      best_area = area;
      double angle = std::atan2(axis.y(), axis.x());
      if (angle < 0) angle += std::numbers::pi;
      if (angle >= std::numbers::pi) angle -= std::numbers::pi;
      best.angle = angle;
      best.width = u1 - u0;
      best.height = v1 - v0;
      best.corners = rect_corners(axis, normal, u0, u1, v0, v1);
    }
  };
  if (hull.size() == 1) {
    consider(Vec2(1, 0));
  } else if (hull.size() == 2) {
    consider(hull[1] - hull[0]);
  } else {
    for (std::size_t i = 0; i < hull.size(); ++i) consider(hull[(i + 1) % hull.size()] - hull[i]);
  }
  return best;
}

std::vector<Point> trace_outer_contour(const Eigen::Ref<const LabelPlane>& labels, std::int32_t id) {
  const int h = static_cast<int>(labels.rows());
  const int w = static_cast<int>(labels.cols());
  auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && labels(y, x) == id; };
  int sx = -1, sy = -1;
  for (int y = 0; y < h && sx < 0; ++y) {
    for (int x = 0; x < w; ++x) {
      if (labels(y, x) == id) {
        sx = x;
        sy = y;
        break;
      }
    }
  }
  if (sx < 0) return {};

  // Walk pixel-corner vertices with the region on the right-hand side.
  int vx = sx, vy = sy, dx = 1, dy = 0;
  std::vector<Point> out;
  const std::size_t guard = 4 * static_cast<std::size_t>(w + 1) * static_cast<std::size_t>(h + 1);
  for (std::size_t step = 0; step < guard; ++step) {
    const int lx = dy, ly = -dx;  // left of travel, y down
    // Pixels touching the vertex ahead, left and right of the travel line.
    const double fx = vx + 0.5 * dx, fy = vy + 0.5 * dy;
    const int left_x = static_cast<int>(std::floor(fx + 0.5 * lx));
    const int left_y = static_cast<int>(std::floor(fy + 0.5 * ly));
    const int right_x = static_cast<int>(std::floor(fx - 0.5 * lx));
    const int right_y = static_cast<int>(std::floor(fy - 0.5 * ly));
    int ndx, ndy;
    if (inside(left_x, left_y)) {
      ndx = lx;
      ndy = ly;
    } else if (inside(right_x, right_y)) {
      ndx = dx;
      ndy = dy;
    } else {
      ndx = -lx;
      ndy = -ly;
    }
    // The start corner is entered heading north and left heading east.
    if (step > 0 && vx == sx && vy == sy && ndx == 1 && ndy == 0) break;
    if (ndx != dx || ndy != dy || out.empty()) out.emplace_back(vx, vy);
    dx = ndx;
    dy = ndy;
    vx += dx;
    vy += dy;
  }
  return out;
}

namespace {

void douglas_peucker(const std::vector<Point>& pts, std::size_t first, std::size_t last, double tol,
                     std::vector<bool>& keep) {
  if (last <= first + 1) return;
  double best = -1;
  std::size_t index = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = point_segment_distance<double>(pts[first], pts[last], pts[i]);
    if (d > best) {
      best = d;
      index = i;
    }
  }
  if (best > tol) {
    keep[index] = true;
    douglas_peucker(pts, first, index, tol, keep);
    douglas_peucker(pts, index, last, tol, keep);
  }
}

}  // namespace

namespace {

std::vector<std::size_t> simplify_indices(const std::vector<Point>& polygon, double tolerance) {
  const std::size_t n = polygon.size();
  std::vector<std::size_t> idx;
  if (n <= 3) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  // Anchor at vertex 0 and the vertex farthest from it.
  std::size_t far = 0;
  double far_d = -1;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = (polygon[i] - polygon[0]).squaredNorm();
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  std::vector<Point> ring(polygon);
  ring.push_back(polygon[0]);
  std::vector<bool> keep(n + 1, false);
  keep[0] = keep[far] = keep[n] = true;
  douglas_peucker(ring, 0, far, tolerance, keep);
  douglas_peucker(ring, far, n, tolerance, keep);
  if (std::count(keep.begin(), keep.end() - 1, true) < 3) {
    // Keep the farthest point from the anchor chord so the result has area.
    std::size_t extra = 0;
    double extra_d = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = point_segment_distance<double>(polygon[0], polygon[far], polygon[i]);
      if (d > extra_d) {
        extra_d = d;
        extra = i;
      }
    }
    keep[extra] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) idx.push_back(i);
  }
  return idx;
}

// Shifts each simplified edge to the middle of the band spanned by the
// contour run it replaces, so curved outlines do not shrink.
std::vector<Point> center_in_band(const std::vector<Point>& contour, const std::vector<std::size_t>& kept,
                                  double tolerance) {
  const std::size_t n = contour.size();
  const std::size_t m = kept.size();
  std::vector<Point> plain;
  for (auto i : kept) plain.push_back(contour[i]);
  if (m < 3) return plain;
  const double orient = signed_area<double>(contour) > 0 ? 1.0 : -1.0;
  std::vector<Vec2> dir(m), normal(m);
  std::vector<double> offset(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Point& a = contour[kept[j]];
    const Point& b = contour[kept[(j + 1) % m]];
    const Vec2 d = b - a;
    if (d.norm() < 1e-12) return plain;
    dir[j] = d.normalized();
    normal[j] = orient * Vec2(dir[j].y(), -dir[j].x());
    double lo = 0, hi = 0;
    for (std::size_t i = kept[j];; i = (i + 1) % n) {
      const double e = (contour[i] - a).dot(normal[j]);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      if (i == kept[(j + 1) % m]) break;
    }
    offset[j] = (lo + hi) / 2;
  }
  std::vector<Point> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t p = (j + m - 1) % m;
    const Point& v = contour[kept[j]];
    const Point a = v + offset[p] * normal[p];
    const Point b = v + offset[j] * normal[j];
    const double den = cross<double>(dir[p], dir[j]);
    Point q = (a + b) / 2;
    if (std::abs(den) > 0.35) {
      const double t = cross<double>(b - a, dir[j]) / den;
      const Point hit = a + t * dir[p];
      if ((hit - v).norm() <= tolerance) q = hit;
    }
    out[j] = q;
  }
  if (!is_simple<double>(out)) return plain;
  return out;
}

}  // namespace

std::vector<Point> simplify_closed(const std::vector<Point>& polygon, double tolerance) {
  std::vector<Point> out;
  for (auto i : simplify_indices(polygon, tolerance)) out.push_back(polygon[i]);
  return out;
}

namespace {

struct RowSpan {
  int y, x0, x1;
};

struct InstanceStats {
  std::vector<RowSpan> rows;
  std::int64_t pixels = 0;
  double ts_sum = 0;
};

std::vector<Point> contour_polygon(const InstanceMap& inst, std::int32_t id) {
  const auto contour = trace_outer_contour(inst.labels, id);
  double tol = kContourTolerance;
  auto kept = simplify_indices(contour, tol);
  while (kept.size() > kMaxContourVertices) {
    tol *= 1.25;
    kept = simplify_indices(contour, tol);
  }
  return center_in_band(contour, kept, tol);
}

}  // namespace

std::vector<Detection> instance_to_polygons(const InstanceMap& inst, const Eigen::Ref<const FloatPlane>& ts,
                                            PolygonMode mode) {
  const int k = inst.count;
  std::vector<InstanceStats> stats(k + 1);
  for (int y = 0; y < inst.height(); ++y) {
    for (int x = 0; x < inst.width(); ++x) {
      const int id = inst.labels(y, x);
      if (id <= 0 || id > k) continue;
      auto& s = stats[id];
      ++s.pixels;
      s.ts_sum += ts(y, x);
      if (s.rows.empty() || s.rows.back().y != y) {
        s.rows.push_back({y, x, x});
      } else {
        s.rows.back().x1 = x;
      }
    }
  }
  std::vector<Detection> out;
  for (int id = 1; id <= k; ++id) {
    const auto& s = stats[id];
    if (s.pixels < kMinInstancePixels) continue;
    std::vector<Point> centers;
    centers.reserve(2 * s.rows.size());
    for (const auto& r : s.rows) {
      centers.emplace_back(r.x0 + 0.5, r.y + 0.5);
      if (r.x1 != r.x0) centers.emplace_back(r.x1 + 0.5, r.y + 0.5);
    }
    // Pixel centers lie half a pixel inside the covered area.
    RotatedRect rect = min_area_rect(centers);
    const Vec2 axis(std::cos(rect.angle), std::sin(rect.angle));
    const Vec2 normal(-axis.y(), axis.x());
    Point center = Point::Zero();
    for (const auto& c : rect.corners) center += c / 4.0;
    rect.width += 1.0;
    rect.height += 1.0;
    const double hu = rect.width / 2, hv = rect.height / 2;
    const double cu = center.dot(axis), cv = center.dot(normal);
    rect.corners = rect_corners(axis, normal, cu - hu, cu + hu, cv - hv, cv + hv);

    Detection det;
    det.score = std::clamp(s.ts_sum / static_cast<double>(s.pixels), 0.0, 1.0);
    const bool use_rect = mode == PolygonMode::Quad ||
                          (mode == PolygonMode::Auto && static_cast<double>(s.pixels) >= kRectFillRatio * rect.area());
    if (use_rect) {
      det.polygon.assign(rect.corners.begin(), rect.corners.end());
    } else {
      det.polygon = contour_polygon(inst, id);
    }
    out.push_back(std::move(det));
  }
  return out;
}

DetectResult detect_pipeline(const RasterMap& maps, const GroupConfig& cfg, PolygonMode mode, int workers) {
  cfg.validate();
  if (maps.channels() < 2) throw std::invalid_argument("detect: maps need TS and TCBP channels");
  if (cfg.graph_source == GraphSource::Tcd && maps.channels() < 4) {
    throw std::invalid_argument("detect: TCD graph needs 4 channels (TS, TCBP, TCD x, TCD y)");
  }
  const auto ts = maps.channel(0);
  const auto tcbp = maps.channel(1);
  DetectResult out;
  Peaks peaks = extract_peaks(tcbp, ts, cfg);
  out.peak_count = peaks.seeds.count;
  const InstanceMap seeds = score_instances(peaks.seeds, ts, cfg);
  const NextMap next = cfg.graph_source == GraphSource::Tcbp ? next_from_tcbp(tcbp, peaks.text)
                                                             : next_from_tcd(maps.channel(2), maps.channel(3));
  out.instances = group_parallel(seeds, next, peaks.text, workers);
  out.detections = instance_to_polygons(out.instances, ts, mode);
  return out;
}

}  // namespace textmountain
