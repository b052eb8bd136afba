#include "textmountain/eval.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <numeric>

namespace textmountain {
namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;
using BgMulti = bg::model::multi_polygon<BgPolygon>;

BgPolygon to_boost(std::span<const Point> poly) {
  BgPolygon out;
  for (const auto& p : poly) bg::append(out.outer(), BgPoint(p.x(), p.y()));
  if (!poly.empty()) bg::append(out.outer(), BgPoint(poly[0].x(), poly[0].y()));
  bg::correct(out);
  return out;
}

}  // namespace

double polygon_area(std::span<const Point> poly) { return std::abs(signed_area<double>(poly)); }

double polygon_iou(std::span<const Point> a, std::span<const Point> b) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  const double area_a = polygon_area(a);
  const double area_b = polygon_area(b);
  if (area_a <= 0 || area_b <= 0) return 0.0;
  const BgPolygon pa = to_boost(a);
  const BgPolygon pb = to_boost(b);
  if (!bg::is_valid(pa) || !bg::is_valid(pb)) return 0.0;
  BgMulti inter;
  try {
    bg::intersection(pa, pb, inter);
  } catch (const bg::exception&) {
    return 0.0;
  }
  const double i = bg::area(inter);
  const double u = area_a + area_b - i;
  return u > 0 ? std::clamp(i / u, 0.0, 1.0) : 0.0;
}

std::vector<GroundTruth> to_ground_truth(std::span<const TextPolygon> polys) {
  std::vector<GroundTruth> out;
  out.reserve(polys.size());
  for (const auto& p : polys) out.push_back({p.vertices, p.ignore});
  return out;
}

ImageEval match_image(std::span<const Detection> dets, std::span<const GroundTruth> gts, const EvalConfig& cfg) {
  ImageEval out;
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  std::vector<bool> matched(gts.size(), false);
  for (const auto& g : gts) {
    if (!(cfg.use_ignore && g.ignore)) ++out.gt_count;
  }
  for (const std::size_t d : order) {
    const auto& poly = dets[d].polygon;
    bool dont_care = false;
    double best = -1;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = polygon_iou(poly, gts[g].polygon);
      if (cfg.use_ignore && gts[g].ignore) {
        dont_care = dont_care || iou >= cfg.iou_min;
        continue;
      }
      if (!matched[g] && iou >= cfg.iou_min && iou > best) {
        best = iou;
        best_gt = g;
      }
    }
    if (dont_care) {
      ++out.ignored_detections;
    } else if (best_gt < gts.size()) {
      matched[best_gt] = true;
      ++out.tp;
      out.matched_iou.push_back(best);
    } else {
      ++out.fp;
    }
  }
  out.fn = out.gt_count - out.tp;
  return out;
}

EvalResult summarize(std::vector<ImageEval> images) {
  EvalResult r;
  std::int64_t gts = 0;
  for (const auto& im : images) {
    r.tp += im.tp;
    r.fp += im.fp;
    r.fn += im.fn;
    gts += im.gt_count;
  }
  r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = gts > 0 ? static_cast<double>(r.tp) / static_cast<double>(gts) : 0.0;
  r.f_measure = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  r.per_image = std::move(images);
  return r;
}

EvalResult match_and_score(std::span<const Detection> dets, std::span<const GroundTruth> gts, const EvalConfig& cfg) {
  return summarize({match_image(dets, gts, cfg)});
}

}  // namespace textmountain
