#pragma once

#include "textmountain/geometry.hpp"
#include "textmountain/grouping.hpp"
#include "textmountain/raster.hpp"

#include <string_view>
#include <vector>

namespace textmountain {

enum class PolygonMode {
  Quad,    // minimum-area rotated rectangle
  Curved,  // traced outer contour, simplified
  Auto,    // rectangle when it is filled well enough, contour otherwise
};

PolygonMode parse_polygon_mode(std::string_view name);

struct Detection {
  std::vector<Point> polygon;
  double score = 0;
};

inline constexpr int kMinInstancePixels = 10;
inline constexpr double kContourTolerance = 2.0;
inline constexpr std::size_t kMaxContourVertices = 14;
/// Auto mode keeps the rectangle when instance pixels cover this share of it.
inline constexpr double kRectFillRatio = 0.9;

/// Andrew's monotone chain. Returns the hull clockwise on screen (positive
/// shoelace area) without repeated endpoint; collinear points dropped.
std::vector<Point> convex_hull(std::vector<Point> points);

struct RotatedRect {
  std::array<Point, 4> corners;  // clockwise on screen
  double width = 0;              // along `angle`
  double height = 0;
  double angle = 0;  // radians in [0, pi)
  double area() const { return width * height; }
};

/// Minimum-area enclosing rectangle. One side of the optimum is collinear
/// with a hull edge, so each hull edge direction is tried.
RotatedRect min_area_rect(const std::vector<Point>& points);

/// Crack-following outer boundary of the 8-connected component holding the
/// first labeled pixel in scan order. Vertices sit on pixel corners, ordered
/// clockwise on screen.
std::vector<Point> trace_outer_contour(const Eigen::Ref<const LabelPlane>& labels, std::int32_t id);

/// Douglas-Peucker on a closed polygon.
std::vector<Point> simplify_closed(const std::vector<Point>& polygon, double tolerance);

std::vector<Detection> instance_to_polygons(const InstanceMap& inst, const Eigen::Ref<const FloatPlane>& ts,
                                            PolygonMode mode);

struct DetectResult {
  std::vector<Detection> detections;
  InstanceMap instances;
  int peak_count = 0;  // K from peak extraction, before scoring
};

/// Peaks, instance scoring, next-step graph, parallel climb, polygon fitting.
/// `maps` holds TS, TCBP and, for the TCD graph, the two decoded TCD
/// components as channels 2 and 3.
DetectResult detect_pipeline(const RasterMap& maps, const GroupConfig& cfg, PolygonMode mode, int workers = 1);

}  // namespace textmountain
