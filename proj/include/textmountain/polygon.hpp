#pragma once

#include "textmountain/geometry.hpp"

#include <array>
#include <vector>

namespace textmountain {

enum class PolygonKind { Quad, Curved14 };

/// An annotated text region. Vertices are stored clockwise on screen
/// (positive shoelace area with y down); `make` reorders if necessary.
struct TextPolygon {
  PolygonKind kind = PolygonKind::Quad;
  std::vector<Point> vertices;
  bool ignore = false;

  /// Validates vertex count (4 or 14), finiteness, nonzero area and
  /// simplicity. Throws GeometryError.
  static TextPolygon make(std::vector<Point> vertices, bool ignore = false);

  double area() const;
  std::span<const Point> points() const { return vertices; }
};

/// The four sides of a text polygon. For quads each side is one segment; for
/// Curved14 sides 0 and 2 are the 7-point long sides and 1 and 3 the end caps.
/// Opposite sides are (0, 2) and (1, 3).
struct SideSet {
  std::array<std::vector<Point>, 4> sides;
};

SideSet sides_of(const TextPolygon& poly);

/// Perpendicular vectors a_i from each quad side's supporting line to p.
std::array<Vec2, 4> perp_vectors_quad(const TextPolygon& poly, const Point& p);

}  // namespace textmountain
