#pragma once

// Ground-truth map generation: text score (TS), center-border probability
// (TCBP) and center direction (TCD) for quadrangle and curved text.

#include "textmountain/polygon.hpp"
#include "textmountain/raster.hpp"

#include <array>
#include <vector>

namespace textmountain {

/// Text lines thinner than this are marked ignore.
inline constexpr double kMinTextHeight = 10.0;

/// A polygon with its sides, smoothed curved sides and inward normals
/// precomputed for repeated per-pixel evaluation.
struct PreparedPolygon {
  TextPolygon polygon;
  SideSet sides;
  std::array<SmoothedSide<double>, 4> smoothed;  // Curved14 only
  std::array<Vec2, 4> inward_normals;            // Quad only

  explicit PreparedPolygon(TextPolygon poly);
};

/// TCBP, TCD and the local height at one point.
struct PixelLabel {
  double height = 0;
  double tcbp = 0;
  Vec2 tcd = Vec2::Zero();
};

/// Evaluates the quad or curved rule depending on the polygon kind. Throws
/// GeometryError when the local height collapses below 1e-6.
PixelLabel label_at(const PreparedPolygon& poly, const Point& p);

double tcbp_quad(const TextPolygon& poly, const Point& p);
Vec2 tcd_quad(const TextPolygon& poly, const Point& p);
double tcbp_curved(const PreparedPolygon& poly, const Point& p);
Vec2 tcd_curved(const PreparedPolygon& poly, const Point& p);

/// Height used by the small-text ignore rule: evaluated at the centroid for
/// quads, and at the midpoint of the two long sides' middle vertices for
/// curved polygons (whose centroid may fall outside the shape).
double reference_height(const PreparedPolygon& poly);

struct TsRaster {
  FloatPlane ts;
  Mask ignore;
  InstanceMap instance_gt;
  int skipped = 0;  // malformed polygons left out
};

/// Rasterizes TS, the ignore mask and ground-truth instance ids at pixel
/// centers. Overlaps go to the polygon with the smaller area.
TsRaster rasterize_ts(std::span<const TextPolygon> polys, int width, int height, int workers = 1);

struct LabelSet {
  RasterMap ts;    // 1 channel
  RasterMap tcbp;  // 1 channel
  RasterMap tcd;   // 2 channels, unit vectors in [-1, 1]
  Mask ignore;
  InstanceMap instance_gt;
  int skipped = 0;

  int width() const { return ts.width(); }
  int height() const { return ts.height(); }
};

LabelSet generate_labels(std::span<const TextPolygon> polys, int width, int height, int workers = 1);

/// Network-side codec for TCD: sigmoid outputs s in [0, 1] map to 2s - 1.
inline float decode_tcd(float s) { return 2.0f * s - 1.0f; }
inline float encode_tcd(float u) { return (u + 1.0f) * 0.5f; }

}  // namespace textmountain
