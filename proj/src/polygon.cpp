#include "textmountain/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace textmountain {

TextPolygon TextPolygon::make(std::vector<Point> vertices, bool ignore) {
  TextPolygon poly;
  if (vertices.size() == 4) {
    poly.kind = PolygonKind::Quad;
  } else if (vertices.size() == 14) {
    poly.kind = PolygonKind::Curved14;
  } else {
    throw GeometryError("text polygon needs 4 or 14 vertices, got " + std::to_string(vertices.size()));
  }
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw GeometryError("non-finite vertex");
  }
  const double area = signed_area<double>(vertices);
  if (std::abs(area) < 1e-9) throw GeometryError("polygon has zero area");
  if (area < 0) {
    // Reversal keeps both Curved14 long sides as 7-point runs.
    std::reverse(vertices.begin(), vertices.end());
  }
  if (!is_simple<double>(vertices)) throw GeometryError("polygon is self-intersecting");
  poly.vertices = std::move(vertices);
  poly.ignore = ignore;
  return poly;
}

double TextPolygon::area() const { return std::abs(signed_area<double>(vertices)); }

SideSet sides_of(const TextPolygon& poly) {
  SideSet s;
  const auto& v = poly.vertices;
  if (poly.kind == PolygonKind::Quad) {
    for (int i = 0; i < 4; ++i) s.sides[i] = {v[i], v[(i + 1) % 4]};
    return s;
  }
  s.sides[0].assign(v.begin(), v.begin() + 7);
  s.sides[1] = {v[6], v[7]};
  s.sides[2].assign(v.begin() + 7, v.end());
  s.sides[3] = {v[13], v[0]};
  return s;
}

std::array<Vec2, 4> perp_vectors_quad(const TextPolygon& poly, const Point& p) {
  if (poly.kind != PolygonKind::Quad) throw GeometryError("perp_vectors_quad needs a quad");
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = perp_from_line<double>(poly.vertices[i], poly.vertices[(i + 1) % 4], p);
  }
  return out;
}

}  // namespace textmountain
