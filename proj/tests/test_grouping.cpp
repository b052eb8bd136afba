#include "oracles.hpp"
#include "textmountain/grouping.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace textmountain;

namespace {

FloatPlane row(std::initializer_list<float> v) {
  FloatPlane p(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (float x : v) p(0, i++) = x;
  return p;
}

bool same(const InstanceMap& a, const InstanceMap& b) {
  return a.labels.rows() == b.labels.rows() && a.labels.cols() == b.labels.cols() && (a.labels == b.labels).all();
}

TEST(GroupConfig, DefaultsAndValidation) {
  GroupConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.gamma, 0.6);
  EXPECT_DOUBLE_EQ(cfg.instance_score_min, 0.7);
  EXPECT_DOUBLE_EQ(cfg.ts_border_min, 0.6);
  EXPECT_EQ(cfg.graph_source, GraphSource::Tcbp);
  EXPECT_NO_THROW(cfg.validate());
  cfg.gamma = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW(parse_graph_source("sideways"), std::invalid_argument);
}

TEST(StepCode, RoundTripsOffsets) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const auto o = kStepOffsets[step_code(dx, dy)];
      EXPECT_EQ(o[0], dx);
      EXPECT_EQ(o[1], dy);
    }
  }
}

TEST(ExtractPeaks, SinglePeakInRow) {
  const FloatPlane ts = FloatPlane::Ones(1, 5);
  const auto p = extract_peaks(row({0.2f, 0.5f, 0.9f, 0.5f, 0.2f}), ts, {});
  EXPECT_EQ(p.seeds.count, 1);
  EXPECT_EQ(p.seeds.labels(0, 2), 1);
  EXPECT_EQ((p.seeds.labels != 0).count(), 1);
  EXPECT_EQ(p.border.cast<int>().sum(), 4);
}

TEST(ExtractPeaks, TwoPlateausSeparatedByValley) {
  const FloatPlane ts = FloatPlane::Ones(1, 7);
  const auto p = extract_peaks(row({0.9f, 0.9f, 0.3f, 0.3f, 0.9f, 0.9f, 0.9f}), ts, {});
  EXPECT_EQ(p.seeds.count, 2);
  EXPECT_EQ(p.seeds.labels(0, 0), 1);
  EXPECT_EQ(p.seeds.labels(0, 6), 2);
}

TEST(ExtractPeaks, AllBelowGammaIsBorder) {
  const FloatPlane ts = FloatPlane::Ones(3, 3);
  const auto p = extract_peaks(FloatPlane::Constant(3, 3, 0.6f), ts, {});
  EXPECT_EQ(p.seeds.count, 0);
  EXPECT_EQ(p.border.cast<int>().sum(), 9);
}

TEST(ExtractPeaks, DiagonalPeaksStaySeparate) {
  FloatPlane tcbp = FloatPlane::Zero(2, 2);
  tcbp(0, 0) = tcbp(1, 1) = 0.9f;
  const auto p = extract_peaks(tcbp, FloatPlane::Ones(2, 2), {});
  EXPECT_EQ(p.seeds.count, 2);
}

TEST(ExtractPeaks, LowTextScoreExcludesPixels) {
  const FloatPlane tcbp = FloatPlane::Constant(1, 3, 0.9f);
  const auto p = extract_peaks(tcbp, row({1.0f, 0.5f, 1.0f}), {});
  EXPECT_EQ(p.seeds.count, 2);
  EXPECT_EQ(p.text(0, 1), 0);
}

TEST(ScoreInstances, KeepsAndRemovesByMeanScore) {
  InstanceMap seeds(6, 1);
  seeds.labels << 1, 1, 2, 2, 3, 3;
  seeds.count = 3;
  const auto out = score_instances(seeds, row({0.95f, 0.95f, 0.65f, 0.65f, 0.7f, 0.7f}), {});
  EXPECT_EQ(out.count, 2);
  EXPECT_EQ(out.labels(0, 0), 1);
  EXPECT_EQ(out.labels(0, 2), 0);
  EXPECT_EQ(out.labels(0, 4), 2);
}

TEST(NextFromTcbp, UniqueMaximumNortheast) {
  FloatPlane t = FloatPlane::Constant(3, 3, 0.1f);
  t(0, 2) = 0.9f;
  const auto n = next_from_tcbp(t, Mask::Ones(3, 3));
  const auto o = n.offset(1, 1);
  EXPECT_EQ(o[0], 1);
  EXPECT_EQ(o[1], -1);
}

TEST(NextFromTcbp, TiesGoToFirstInScanOrder) {
  const auto n = next_from_tcbp(FloatPlane::Constant(3, 3, 0.5f), Mask::Ones(3, 3));
  const auto o = n.offset(1, 1);
  EXPECT_EQ(o[0], -1);
  EXPECT_EQ(o[1], -1);
}

TEST(NextFromTcbp, LocalMaximumStillMoves) {
  FloatPlane t = FloatPlane::Constant(3, 3, 0.1f);
  t(1, 1) = 0.9f;
  t(2, 1) = 0.3f;
  const auto n = next_from_tcbp(t, Mask::Ones(3, 3));
  EXPECT_EQ(n.step(1, 1), step_code(0, 1));
  EXPECT_EQ(n.step(2, 1), step_code(0, -1));
}

TEST(NextFromTcbp, NonTextKeepsSelfAndStepsStayInBounds) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<float> u(0, 1);
  FloatPlane t(9, 13);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
  Mask m = Mask::Ones(9, 13);
  m(4, 4) = 0;
  const auto n = next_from_tcbp(t, m);
  EXPECT_EQ(n.step(4, 4), kSelfStep);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 13; ++x) {
      const auto [dx, dy] = n.offset(x, y);
      EXPECT_TRUE(x + dx >= 0 && x + dx < 13 && y + dy >= 0 && y + dy < 9);
      if (m(y, x)) {
        EXPECT_NE(n.step(y, x), kSelfStep);
      }
    }
  }
}

TEST(NextFromTcd, QuantizationExamples) {
  const auto n = next_from_tcd(row({0.5f, 0.9f, 0.707f, 0.3f, 0.5f}), row({0.5f, 0.1f, 0.707f, -0.2f, 0.5f}));
  auto off = [&](int x) { return n.offset(x, 0); };
  EXPECT_EQ(off(1), (std::array<int, 2>{1, 0}));
  EXPECT_EQ(off(3), (std::array<int, 2>{0, 0}));
  // Row of height one: the vertical component is clamped away.
  EXPECT_EQ(off(2), (std::array<int, 2>{1, 0}));
  EXPECT_EQ(off(4), (std::array<int, 2>{0, 0}));
}

TEST(NextFromTcd, DiagonalAndBounds) {
  const FloatPlane ux = FloatPlane::Constant(3, 3, 0.707f);
  const FloatPlane uy = FloatPlane::Constant(3, 3, 0.707f);
  const auto n = next_from_tcd(ux, uy);
  EXPECT_EQ(n.offset(1, 1), (std::array<int, 2>{1, 1}));
  EXPECT_EQ(n.offset(2, 2), (std::array<int, 2>{0, 0}));
  EXPECT_EQ(n.offset(2, 0), (std::array<int, 2>{0, 1}));
}

TEST(QuantizeDirection, Boundary) {
  const float b = static_cast<float>(std::cos(3 * std::numbers::pi / 8));
  EXPECT_NEAR(b, 0.382683f, 1e-6f);
  EXPECT_EQ(quantize_direction(b), 0);
  EXPECT_EQ(quantize_direction(std::nextafter(b, 1.0f)), 1);
  EXPECT_EQ(quantize_direction(-b), 0);
  EXPECT_EQ(quantize_direction(std::nextafter(-b, -1.0f)), -1);
}

struct Pipeline {
  InstanceMap seeds;
  NextMap next;
  Mask text;
};

Pipeline tcbp_pipeline(const FloatPlane& tcbp, const FloatPlane& ts) {
  auto p = extract_peaks(tcbp, ts, {});
  Pipeline out;
  out.seeds = score_instances(p.seeds, ts, {});
  out.next = next_from_tcbp(tcbp, p.text);
  out.text = p.text;
  return out;
}

TEST(Group, RowClimbsToSinglePeak) {
  const auto in = tcbp_pipeline(row({0.2f, 0.5f, 0.9f, 0.5f, 0.2f}), FloatPlane::Ones(1, 5));
  for (int w : {1, 2, 8}) {
    const auto out = group_parallel(in.seeds, in.next, in.text, w);
    EXPECT_TRUE((out.labels == 1).all());
  }
  EXPECT_TRUE((group_sequential(in.seeds, in.next, in.text).labels == 1).all());
}

TEST(Group, TwoCycleWithoutPeakIsBlocked) {
  InstanceMap seeds(2, 1);
  NextMap next;
  next.step = Plane<std::uint8_t>(1, 2);
  next.step << step_code(1, 0), step_code(-1, 0);
  const Mask text = Mask::Ones(1, 2);
  EXPECT_TRUE((group_parallel(seeds, next, text, 2).labels == 0).all());
  EXPECT_TRUE((group_sequential(seeds, next, text).labels == 0).all());
}

TEST(Group, SelfStepIsBlocked) {
  InstanceMap seeds(3, 1);
  seeds.labels(0, 2) = 1;
  seeds.count = 1;
  NextMap next;
  next.step = Plane<std::uint8_t>(1, 3);
  next.step << kSelfStep, step_code(1, 0), kSelfStep;
  const Mask text = Mask::Ones(1, 3);
  const auto out = group_parallel(seeds, next, text);
  EXPECT_EQ(out.labels(0, 0), 0);
  EXPECT_EQ(out.labels(0, 1), 1);
  EXPECT_TRUE(same(out, group_sequential(seeds, next, text)));
}

TEST(Group, LeavingTextMaskBlocks) {
  InstanceMap seeds(4, 1);
  seeds.labels(0, 3) = 1;
  seeds.count = 1;
  NextMap next;
  next.step = Plane<std::uint8_t>::Constant(1, 4, step_code(1, 0));
  next.step(0, 3) = kSelfStep;
  Mask text = Mask::Ones(1, 4);
  text(0, 2) = 0;
  const auto out = group_parallel(seeds, next, text);
  EXPECT_EQ(out.labels(0, 0), 0);
  EXPECT_EQ(out.labels(0, 1), 0);
  EXPECT_EQ(out.labels(0, 3), 1);
}

TEST(Group, AllBackgroundLargeMapStaysEmpty) {
  const int w = 1280, h = 768;
  const FloatPlane zero = FloatPlane::Zero(h, w);
  const auto in = tcbp_pipeline(zero, zero);
  EXPECT_EQ(in.seeds.count, 0);
  EXPECT_EQ(in.text.cast<int>().sum(), 0);
  EXPECT_TRUE((group_parallel(in.seeds, in.next, in.text, 4).labels == 0).all());
}

TEST(Group, RadialTcdFieldLabelsEveryTextPixel) {
  const int n = 41;
  const double c = 20;
  FloatPlane ux(n, n), uy(n, n), ts = FloatPlane::Zero(n, n), tcbp = FloatPlane::Zero(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double dx = c - x, dy = c - y, r = std::hypot(dx, dy);
      ux(y, x) = r > 0 ? static_cast<float>(dx / r) : 0.f;
      uy(y, x) = r > 0 ? static_cast<float>(dy / r) : 0.f;
      if (r <= 20) {
        ts(y, x) = 1;
        tcbp(y, x) = static_cast<float>(1 - r / 20);
      }
    }
  }
  auto peaks = extract_peaks(tcbp, ts, {});
  const auto seeds = score_instances(peaks.seeds, ts, {});
  ASSERT_EQ(seeds.count, 1);
  const auto next = next_from_tcd(ux, uy);
  const auto out = group_parallel(seeds, next, peaks.text, 3);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (peaks.text(y, x)) {
        EXPECT_EQ(out.labels(y, x), 1) << x << "," << y;
      }
  EXPECT_TRUE(same(out, group_sequential(seeds, next, peaks.text)));
}

TEST(Group, PeaksKeepTheirLabels) {
  std::mt19937 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto c = oracle::random_grouping_case(rng, 17, 11);
    const auto out = group_parallel(c.seeds, c.next, c.text, 2);
    for (Eigen::Index i = 0; i < out.labels.size(); ++i) {
      if (c.seeds.labels.data()[i]) {
        EXPECT_EQ(out.labels.data()[i], c.seeds.labels.data()[i]);
      }
    }
  }
}

TEST(Group, MatchesLiteralWalkOracle) {
  std::mt19937 rng(21);
  for (int t = 0; t < 40; ++t) {
    const auto c = oracle::random_grouping_case(rng, 12, 9);
    const auto par = group_parallel(c.seeds, c.next, c.text, 3);
    const auto seq = group_sequential(c.seeds, c.next, c.text);
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 12; ++x) {
        if (!c.text(y, x) || c.seeds.labels(y, x)) continue;
        const auto expect = oracle::literal_walk(c.seeds, c.next, c.text, x, y);
        EXPECT_EQ(par.labels(y, x), expect);
        EXPECT_EQ(seq.labels(y, x), expect);
      }
    }
  }
}

TEST(Group, ParallelEqualsSequentialAcrossWorkerCounts) {
  std::mt19937 rng(99);
  for (int t = 0; t < 60; ++t) {
    const auto c = oracle::random_grouping_case(rng, 40 + t, 30);
    const auto seq = group_sequential(c.seeds, c.next, c.text);
    for (int w : {1, 2, 3, 8}) EXPECT_TRUE(same(group_parallel(c.seeds, c.next, c.text, w), seq));
  }
}

TEST(Group, RejectsMismatchedShapesAndEscapingSteps) {
  InstanceMap seeds(3, 3);
  NextMap next;
  next.step = Plane<std::uint8_t>::Constant(3, 4, kSelfStep);
  EXPECT_THROW(group_parallel(seeds, next, Mask::Ones(3, 3)), std::invalid_argument);
  next.step = Plane<std::uint8_t>::Constant(3, 3, step_code(-1, 0));
  EXPECT_THROW(group_sequential(seeds, next, Mask::Ones(3, 3)), std::invalid_argument);
}

}  // namespace
