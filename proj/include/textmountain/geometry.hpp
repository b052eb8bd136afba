#pragma once

// Planar primitives shared by label generation, polygon fitting and
// evaluation. Image coordinates: x to the right, y down. All functions are
// templated on the scalar type and are pure.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace textmountain {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Point = Point2<double>;
using Vec2 = Point2<double>;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// z-component of the 2D cross product.
template <typename Scalar>
inline Scalar cross(const Point2<Scalar>& a, const Point2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Shoelace area. Positive for vertices ordered clockwise on screen (y down).
template <typename Scalar>
Scalar signed_area(std::span<const Point2<Scalar>> poly) {
  const std::size_t n = poly.size();
  Scalar acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += cross(poly[i], poly[(i + 1) % n]);
  }
  return acc / 2;
}

template <typename Scalar>
Point2<Scalar> polygon_centroid(std::span<const Point2<Scalar>> poly) {
  const std::size_t n = poly.size();
  Scalar a = 0;
  Point2<Scalar> c = Point2<Scalar>::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % n];
    const Scalar w = cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  if (std::abs(a) < std::numeric_limits<Scalar>::epsilon()) {
    Point2<Scalar> mean = Point2<Scalar>::Zero();
    for (const auto& p : poly) mean += p;
    return mean / static_cast<Scalar>(n);
  }
  return c / (3 * a);
}

/// Quarter turn that maps a side direction onto the inward normal when the
/// polygon is ordered clockwise on screen: (x, y) -> (-y, x).
template <typename Scalar>
inline Point2<Scalar> center_dir_from_side(const Point2<Scalar>& f) {
  return Point2<Scalar>(-f.y(), f.x());
}

/// Perpendicular vector from the supporting line of segment [a, b] to p,
/// i.e. p minus the foot of the perpendicular. Throws on a zero-length side.
template <typename Scalar>
Point2<Scalar> perp_from_line(const Point2<Scalar>& a, const Point2<Scalar>& b,
                              const Point2<Scalar>& p) {
  const Point2<Scalar> d = b - a;
  const Scalar len2 = d.squaredNorm();
  if (len2 <= Scalar(1e-18)) throw GeometryError("degenerate side (zero length)");
  const Scalar t = (p - a).dot(d) / len2;
  return p - (a + t * d);
}

template <typename Scalar>
struct SideProjection {
  Point2<Scalar> point;     // closest point on the polyline
  Scalar distance = 0;      // |p - point|
  std::size_t segment = 0;  // index of the segment holding `point`
};

/// Closest point on a polyline, clamped to segment endpoints. Ties keep the
/// earliest segment.
template <typename Scalar>
SideProjection<Scalar> closest_on_side(std::span<const Point2<Scalar>> side,
                                       const Point2<Scalar>& p) {
  if (side.size() < 2) throw GeometryError("side needs at least two points");
  SideProjection<Scalar> best;
  best.distance = std::numeric_limits<Scalar>::infinity();
  for (std::size_t i = 0; i + 1 < side.size(); ++i) {
    const Point2<Scalar> d = side[i + 1] - side[i];
    const Scalar len2 = d.squaredNorm();
    Scalar t = 0;
    if (len2 > 0) t = std::clamp((p - side[i]).dot(d) / len2, Scalar(0), Scalar(1));
    const Point2<Scalar> q = side[i] + t * d;
    const Scalar dist = (p - q).norm();
    if (dist < best.distance) {
      best.point = q;
      best.distance = dist;
      best.segment = i;
    }
  }
  return best;
}

/// A polyline side with its segment directions and the per-point directions
/// averaged from the adjacent segments.
template <typename Scalar>
struct SmoothedSide {
  std::vector<Point2<Scalar>> points;
  std::vector<Point2<Scalar>> segment_units;
  std::vector<Point2<Scalar>> point_units;
};

template <typename Scalar>
SmoothedSide<Scalar> smooth_side(std::span<const Point2<Scalar>> side) {
  const std::size_t n = side.size();
  if (n < 2) throw GeometryError("side needs at least two points");
  SmoothedSide<Scalar> out;
  out.points.assign(side.begin(), side.end());
  out.segment_units.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Point2<Scalar> d = side[i + 1] - side[i];
    const Scalar len = d.norm();
    if (len < Scalar(1e-9)) throw GeometryError("zero-length segment on side");
    out.segment_units.push_back(d / len);
  }
  out.point_units.reserve(n);
  out.point_units.push_back(out.segment_units.front());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Point2<Scalar> m = out.segment_units[i - 1] + out.segment_units[i];
    const Scalar len = m.norm();
    if (len < Scalar(1e-9)) throw GeometryError("antiparallel adjacent segments on side");
    out.point_units.push_back(m / len);
  }
  out.point_units.push_back(out.segment_units.back());
  return out;
}

/// Direction at a point b lying on segment `segment` of the side: the
/// distance-weighted blend of the two endpoint directions, normalized.
template <typename Scalar>
Point2<Scalar> interp_unit(const SmoothedSide<Scalar>& side, std::size_t segment,
                           const Point2<Scalar>& b) {
  const auto& p0 = side.points[segment];
  const auto& p1 = side.points[segment + 1];
  const Scalar d0 = (b - p0).norm();
  const Scalar d1 = (b - p1).norm();
  if (d0 == 0) return side.point_units[segment];
  if (d1 == 0) return side.point_units[segment + 1];
  const Point2<Scalar> f = d1 * side.point_units[segment] + d0 * side.point_units[segment + 1];
  const Scalar len = f.norm();
  if (len < Scalar(1e-9)) throw GeometryError("interpolated direction vanishes");
  return f / len;
}

template <typename Scalar>
Point2<Scalar> interp_unit(const SmoothedSide<Scalar>& side, const Point2<Scalar>& b) {
  const auto proj = closest_on_side<Scalar>(side.points, b);
  return interp_unit(side, proj.segment, b);
}

/// Distance from p to segment [a, b].
template <typename Scalar>
Scalar point_segment_distance(const Point2<Scalar>& a, const Point2<Scalar>& b,
                              const Point2<Scalar>& p) {
  const Point2<Scalar> seg[2] = {a, b};
  return closest_on_side<Scalar>(std::span<const Point2<Scalar>>(seg, 2), p).distance;
}

/// Even-odd containment with points on the boundary counted as inside.
template <typename Scalar>
bool point_in_polygon(std::span<const Point2<Scalar>> poly, const Point2<Scalar>& p,
                      Scalar boundary_eps = Scalar(1e-9)) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[j];
    const auto& b = poly[i];
    if (point_segment_distance(a, b, p) <= boundary_eps) return true;
    if ((b.y() > p.y()) != (a.y() > p.y())) {
      const Scalar x = b.x() + (p.y() - b.y()) * (a.x() - b.x()) / (a.y() - b.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

/// Distance from p to the closed polygon boundary.
template <typename Scalar>
Scalar boundary_distance(std::span<const Point2<Scalar>> poly, const Point2<Scalar>& p) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(poly[i], poly[(i + 1) % n], p));
  }
  return best;
}

/// True when no two non-adjacent edges intersect.
template <typename Scalar>
bool is_simple(std::span<const Point2<Scalar>> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  auto orient = [](const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& c) {
    const Point2<Scalar> ab = b - a, ac = c - a;
    const Scalar v = cross<Scalar>(ab, ac);
    const Scalar scale = std::max({Scalar(1), a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
    const Scalar eps = std::numeric_limits<Scalar>::epsilon() * 64 * scale * (ab.norm() + ac.norm());
    return (v > eps) - (v < -eps);
  };
  auto on_seg = [](const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& c) {
    return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
  };
  auto intersects = [&](const Point2<Scalar>& p1, const Point2<Scalar>& p2,
                        const Point2<Scalar>& q1, const Point2<Scalar>& q2) {
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_seg(p1, p2, q1)) return true;
    if (o2 == 0 && on_seg(p1, p2, q2)) return true;
    if (o3 == 0 && on_seg(q1, q2, p1)) return true;
    if (o4 == 0 && on_seg(q1, q2, p2)) return true;
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (intersects(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

}  // namespace textmountain
