#pragma once

#include "textmountain/detect.hpp"
#include "textmountain/polygon.hpp"

#include <span>
#include <vector>

namespace textmountain {

/// Intersection over union of two simple polygons (any orientation).
/// Zero-area or invalid input yields 0.
double polygon_iou(std::span<const Point> a, std::span<const Point> b);

double polygon_area(std::span<const Point> poly);

struct GroundTruth {
  std::vector<Point> polygon;
  bool ignore = false;
};

std::vector<GroundTruth> to_ground_truth(std::span<const TextPolygon> polys);

struct ImageEval {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t ignored_detections = 0;
  std::int64_t gt_count = 0;  // non-ignored ground truths
  std::vector<double> matched_iou;  // IoU of each true positive, in match order
};

struct EvalResult {
  double precision = 0;
  double recall = 0;
  double f_measure = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::vector<ImageEval> per_image;
};

struct EvalConfig {
  double iou_min = 0.5;
  bool use_ignore = true;  // detections over DO-NOT-CARE regions are dropped
};

/// Detections in descending score order (input order on ties) claim the
/// unmatched ground truth of highest IoU >= iou_min. Detections whose IoU
/// with an ignore region reaches iou_min count neither as TP nor FP.
ImageEval match_image(std::span<const Detection> dets, std::span<const GroundTruth> gts, const EvalConfig& cfg = {});

/// Totals over images; precision, recall and F are 0 when undefined.
EvalResult summarize(std::vector<ImageEval> images);

EvalResult match_and_score(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                           const EvalConfig& cfg = {});

}  // namespace textmountain
