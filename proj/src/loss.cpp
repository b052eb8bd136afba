#include "textmountain/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace textmountain {
namespace {

void check_shape(const Eigen::Ref<const FloatPlane>& p, const LabelSet& gt, const char* what) {
  if (p.rows() != gt.height() || p.cols() != gt.width()) {
    throw std::invalid_argument(std::string(what) + ": prediction and ground truth sizes differ");
  }
}

}  // namespace

double bce(double pred, double target) {
  const double p = std::clamp(pred, kProbabilityEps, 1.0 - kProbabilityEps);
  return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

TsLoss loss_ts(const Eigen::Ref<const FloatPlane>& pred_ts, const LabelSet& gt) {
  check_shape(pred_ts, gt, "loss_ts");
  const auto target = gt.ts.channel(0);
  const int w = gt.width();

  TsLoss out;
  double pos_sum = 0;
  std::vector<std::pair<double, std::int32_t>> negatives;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      if (gt.ignore(y, x)) continue;
      const double t = target(y, x);
      const double l = bce(pred_ts(y, x), t);
      if (t > 0.5) {
        pos_sum += l;
        ++out.n_pos;
      } else {
        negatives.emplace_back(l, y * w + x);
      }
    }
  }
  const std::int64_t want = out.n_pos > 0 ? kNegativesPerPositive * out.n_pos : kFallbackNegatives;
  const auto take = static_cast<std::size_t>(std::min<std::int64_t>(want, static_cast<std::int64_t>(negatives.size())));
  auto harder = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; };
  std::nth_element(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(take), negatives.end(), harder);
  negatives.resize(take);
  std::sort(negatives.begin(), negatives.end(), [](const auto& a, const auto& b) { return a.second < b.second; });

  double neg_sum = 0;
  out.selected_negatives.reserve(take);
  for (const auto& [l, idx] : negatives) {
    neg_sum += l;
    out.selected_negatives.push_back(idx);
  }
  out.n_neg = static_cast<std::int64_t>(take);
  const std::int64_t omega = out.n_pos + out.n_neg;
  out.value = omega > 0 ? (pos_sum + neg_sum) / static_cast<double>(omega) : 0.0;
  return out;
}

double loss_tcbp(const Eigen::Ref<const FloatPlane>& pred_tcbp, const LabelSet& gt) {
  check_shape(pred_tcbp, gt, "loss_tcbp");
  const Plane<double> keep = gt.ts.channel(0).cast<double>() * (gt.ignore == 0).cast<double>();
  const double support = keep.sum();
  if (support <= 0) return 0.0;
  const Plane<double> diff = (pred_tcbp.cast<double>() - gt.tcbp.channel(0).cast<double>()).abs();
  return (keep * diff).sum() / support;
}

double loss_tcd(const Eigen::Ref<const FloatPlane>& pred_ux, const Eigen::Ref<const FloatPlane>& pred_uy,
                const LabelSet& gt, const Eigen::Ref<const FloatPlane>& pred_tcbp, double gamma, BorderMask mask) {
  check_shape(pred_ux, gt, "loss_tcd");
  check_shape(pred_uy, gt, "loss_tcd");
  check_shape(pred_tcbp, gt, "loss_tcd");
  using ConstRef = Eigen::Ref<const FloatPlane>;
  const ConstRef center = mask == BorderMask::Predicted ? ConstRef(pred_tcbp) : ConstRef(gt.tcbp.channel(0));
  const Plane<double> m = gt.ts.channel(0).cast<double>() * (gt.ignore == 0).cast<double>() *
                          (center < static_cast<float>(gamma)).cast<double>();
  const double support = m.sum();
  if (support <= 0) return 0.0;
  const Plane<double> l1 = (pred_ux.cast<double>() - gt.tcd.channel(0).cast<double>()).abs() +
                  (pred_uy.cast<double>() - gt.tcd.channel(1).cast<double>()).abs();
  return (m * l1).sum() / support;
}

LossReport total_loss(double l_ts, double l_tcbp, double l_tcd, const LossWeights& w) {
  LossReport r;
  r.l_ts = l_ts;
  r.l_tcbp = l_tcbp;
  r.l_tcd = l_tcd;
  r.total = l_ts + w.tcbp * l_tcbp + w.tcd * l_tcd;
  return r;
}

LossReport compute_losses(const RasterMap& pred, const LabelSet& gt, double gamma, const LossWeights& w) {
  if (pred.channels() < 4) throw std::invalid_argument("compute_losses: prediction needs 4 channels");
  const auto ts = loss_ts(pred.channel(0), gt);
  const double tcbp = loss_tcbp(pred.channel(1), gt);
  const double tcd = loss_tcd(pred.channel(2), pred.channel(3), gt, pred.channel(1), gamma);
  LossReport r = total_loss(ts.value, tcbp, tcd, w);
  r.n_pos = ts.n_pos;
  r.n_neg_selected = ts.n_neg;
  return r;
}

}  // namespace textmountain
