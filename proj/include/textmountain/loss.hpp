#pragma once

// Training objectives evaluated between predicted maps and a LabelSet.
// Pure functions: no gradients, only objective values.

#include "textmountain/labelgen.hpp"
#include "textmountain/raster.hpp"

#include <cstdint>
#include <vector>

namespace textmountain {

inline constexpr double kProbabilityEps = 1e-7;
inline constexpr int kNegativesPerPositive = 3;
inline constexpr int kFallbackNegatives = 256;

struct LossWeights {
  double tcbp = 5.0;
  double tcd = 2.5;
};

struct LossReport {
  double l_ts = 0;
  double l_tcbp = 0;
  double l_tcd = 0;
  double total = 0;
  std::int64_t n_pos = 0;
  std::int64_t n_neg_selected = 0;
};

struct TsLoss {
  double value = 0;
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
  std::vector<std::int32_t> selected_negatives;  // flat pixel indices
};

/// Per-pixel binary cross-entropy with the prediction clamped to
/// [eps, 1 - eps].
double bce(double pred, double target);

/// Mean BCE over all positives plus the 3 * n_pos hardest negatives (or the
/// 256 hardest when the image has no positives). Ignored pixels take no part.
/// Hardest means highest loss, ties broken by lower pixel index.
TsLoss loss_ts(const Eigen::Ref<const FloatPlane>& pred_ts, const LabelSet& gt);

/// L1 on the text region, normalized by the text area.
double loss_tcbp(const Eigen::Ref<const FloatPlane>& pred_tcbp, const LabelSet& gt);

enum class BorderMask {
  Predicted,    // TS* and predicted TCBP < gamma
  GroundTruth,  // TS* and ground-truth TCBP < gamma
};

/// L1 over both TCD components on border pixels. `pred_ux`/`pred_uy` are
/// already decoded to [-1, 1].
double loss_tcd(const Eigen::Ref<const FloatPlane>& pred_ux, const Eigen::Ref<const FloatPlane>& pred_uy,
                const LabelSet& gt, const Eigen::Ref<const FloatPlane>& pred_tcbp, double gamma,
                BorderMask mask = BorderMask::Predicted);

/// total = l_ts + w.tcbp * l_tcbp + w.tcd * l_tcd.
LossReport total_loss(double l_ts, double l_tcbp, double l_tcd, const LossWeights& w = {});

/// All three losses from a prediction bundle (TS, TCBP, TCD x, TCD y with
/// TCD decoded).
LossReport compute_losses(const RasterMap& pred, const LabelSet& gt, double gamma = 0.6,
                          const LossWeights& w = {});

}  // namespace textmountain
