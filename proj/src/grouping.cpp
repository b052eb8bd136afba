#include "textmountain/grouping.hpp"

#include "textmountain/parallel.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace textmountain {

GraphSource parse_graph_source(std::string_view name) {
  if (name == "tcbp") return GraphSource::Tcbp;
  if (name == "tcd") return GraphSource::Tcd;
  throw std::invalid_argument("unknown graph source '" + std::string(name) + "' (expected tcbp or tcd)");
}

void GroupConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  };
  check(gamma, "gamma");
  check(instance_score_min, "instance_score_min");
  check(ts_border_min, "ts_border_min");
}

Peaks extract_peaks(const Eigen::Ref<const FloatPlane>& tcbp, const Eigen::Ref<const FloatPlane>& ts,
                    const GroupConfig& cfg) {
  if (tcbp.rows() != ts.rows() || tcbp.cols() != ts.cols()) {
    throw std::invalid_argument("extract_peaks: TS and TCBP sizes differ");
  }
  const int h = static_cast<int>(ts.rows());
  const int w = static_cast<int>(ts.cols());
  Peaks out;
  out.text = (ts >= static_cast<float>(cfg.ts_border_min)).cast<std::uint8_t>();
  const Mask peak = (out.text > 0 && tcbp > static_cast<float>(cfg.gamma)).cast<std::uint8_t>();
  out.border = (out.text > 0 && peak == 0).cast<std::uint8_t>();
  out.seeds = InstanceMap(w, h);

  std::vector<std::array<int, 2>> stack;
  int next_id = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!peak(y, x) || out.seeds.labels(y, x) != 0) continue;
      const int id = ++next_id;
      out.seeds.labels(y, x) = id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + dx[k], ny = cy + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (!peak(ny, nx) || out.seeds.labels(ny, nx) != 0) continue;
          out.seeds.labels(ny, nx) = id;
          stack.push_back({nx, ny});
        }
      }
    }
  }
  out.seeds.count = next_id;
  return out;
}

InstanceMap score_instances(const InstanceMap& seeds, const Eigen::Ref<const FloatPlane>& ts,
                            const GroupConfig& cfg) {
  const int k = seeds.count;
  std::vector<double> sum(k + 1, 0.0);
  std::vector<std::int64_t> n(k + 1, 0);
  for (Eigen::Index y = 0; y < seeds.labels.rows(); ++y) {
    for (Eigen::Index x = 0; x < seeds.labels.cols(); ++x) {
      const int id = seeds.labels(y, x);
      if (id <= 0 || id > k) continue;
      sum[id] += ts(y, x);
      ++n[id];
    }
  }
  // Compared at float precision so a mean of exactly the threshold survives.
  const float threshold = static_cast<float>(cfg.instance_score_min);
  std::vector<std::int32_t> remap(k + 1, 0);
  int kept = 0;
  for (int id = 1; id <= k; ++id) {
    if (n[id] > 0 && static_cast<float>(sum[id] / n[id]) >= threshold) remap[id] = ++kept;
  }
  InstanceMap out(seeds.width(), seeds.height());
  out.labels = seeds.labels.unaryExpr([&](std::int32_t id) {
    return id > 0 && id <= k ? remap[id] : std::int32_t{0};
  });
  out.count = kept;
  return out;
}

NextMap next_from_tcbp(const Eigen::Ref<const FloatPlane>& tcbp, const Mask& text_mask) {
  const int h = static_cast<int>(tcbp.rows());
  const int w = static_cast<int>(tcbp.cols());
  NextMap out;
  out.step = Plane<std::uint8_t>::Constant(h, w, kSelfStep);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!text_mask(y, x)) continue;
      std::uint8_t best = kSelfStep;
      float best_value = 0;
      for (std::uint8_t k = 0; k < 8; ++k) {
        const int nx = x + kStepOffsets[k][0];
        const int ny = y + kStepOffsets[k][1];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const float v = tcbp(ny, nx);
        if (best == kSelfStep || v > best_value) {
          best = k;
          best_value = v;
        }
      }
      out.step(y, x) = best;
    }
  }
  return out;
}

int quantize_direction(float u) {
  static const float kBound = static_cast<float>(std::cos(3.0 * std::numbers::pi / 8.0));
  if (u > kBound) return 1;
  if (u < -kBound) return -1;
  return 0;
}

NextMap next_from_tcd(const Eigen::Ref<const FloatPlane>& ux, const Eigen::Ref<const FloatPlane>& uy) {
  if (ux.rows() != uy.rows() || ux.cols() != uy.cols()) {
    throw std::invalid_argument("next_from_tcd: component sizes differ");
  }
  const int h = static_cast<int>(ux.rows());
  const int w = static_cast<int>(ux.cols());
  NextMap out;
  out.step = Plane<std::uint8_t>::Constant(h, w, kSelfStep);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int dx = quantize_direction(ux(y, x));
      int dy = quantize_direction(uy(y, x));
      if (x + dx < 0 || x + dx >= w) dx = 0;
      if (y + dy < 0 || y + dy >= h) dy = 0;
      out.step(y, x) = step_code(dx, dy);
    }
  }
  return out;
}

namespace {

struct Graph {
  std::array<std::int32_t, 9> delta{};  // flat offset per step code
  const std::uint8_t* step = nullptr;
  std::vector<std::int32_t> walkers;
  std::int64_t positives = 0;

  std::int32_t next(std::int32_t i) const { return i + delta[step[i]]; }
};

// Only text pixels are ever followed, so only their steps are checked.
Graph build_graph(const InstanceMap& seeds, const NextMap& next, const Mask& text_mask) {
  const int h = seeds.height();
  const int w = seeds.width();
  if (next.width() != w || next.height() != h || text_mask.cols() != w || text_mask.rows() != h) {
    throw std::invalid_argument("grouping: seeds, next map and text mask sizes differ");
  }
  Graph g;
  g.step = next.step.data();
  for (std::size_t k = 0; k < kStepOffsets.size(); ++k) g.delta[k] = kStepOffsets[k][1] * w + kStepOffsets[k][0];
  const std::uint8_t* text = text_mask.data();
  const std::int32_t* seed = seeds.labels.data();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t i = y * w + x;
      if (!text[i]) continue;
      if (g.step[i] > kSelfStep) throw std::invalid_argument("grouping: invalid step code");
      const auto [dx, dy] = kStepOffsets[g.step[i]];
      if (x + dx < 0 || x + dx >= w || y + dy < 0 || y + dy >= h) {
        throw std::invalid_argument("grouping: next step leaves the image");
      }
      ++g.positives;
      if (seed[i] == 0) g.walkers.push_back(i);
    }
  }
  return g;
}

}  // namespace

InstanceMap group_parallel(const InstanceMap& seeds, const NextMap& next, const Mask& text_mask, int workers) {
  const Graph g = build_graph(seeds, next, text_mask);
  InstanceMap out = seeds;
  std::int32_t* color = out.labels.data();
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(out.labels.size()), 0);
  const std::uint8_t* text = text_mask.data();
  const std::int64_t limit = g.positives;

  parallel_for(g.walkers.size(), workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::int32_t> path;
    for (std::size_t w = begin; w < end; ++w) {
      const std::int32_t p = g.walkers[w];
      if (std::atomic_ref<std::int32_t>(color[p]).load(std::memory_order_relaxed) != 0 ||
          std::atomic_ref<std::uint8_t>(blocked[p]).load(std::memory_order_relaxed) != 0) {
        continue;  // resolved by an earlier walk through this pixel
      }
      path.clear();
      path.push_back(p);
      std::int32_t q = g.next(p);
      std::int32_t result = 0;
      // Brent cycle detection; a cycle holding no colored pixel never
      // reaches one, so stopping early matches the step-limit outcome.
      std::int32_t tortoise = p;
      std::int64_t power = 1, lam = 1;
      for (std::int64_t i = 1;; ++i) {
        std::atomic_ref<std::uint8_t> bq(blocked[q]);
        if (bq.load(std::memory_order_relaxed)) break;
        if (!text[q] || q == p || i > limit || q == tortoise) {
          bq.store(1, std::memory_order_relaxed);
          break;
        }
        const std::int32_t c = std::atomic_ref<std::int32_t>(color[q]).load(std::memory_order_relaxed);
        if (c != 0) {
          result = c;
          break;
        }
        if (power == lam) {
          tortoise = q;
          power *= 2;
          lam = 0;
        }
        ++lam;
        path.push_back(q);
        q = g.next(q);
      }
      // Every pixel on the walked chain shares its terminal.
      for (const std::int32_t x : path) {
        if (result != 0) {
          std::atomic_ref<std::int32_t>(color[x]).store(result, std::memory_order_relaxed);
        } else {
          std::atomic_ref<std::uint8_t>(blocked[x]).store(1, std::memory_order_relaxed);
        }
      }
    }
  });
  return out;
}

InstanceMap group_sequential(const InstanceMap& seeds, const NextMap& next, const Mask& text_mask) {
  const Graph g = build_graph(seeds, next, text_mask);
  InstanceMap out = seeds;
  const std::int32_t* seed = seeds.labels.data();
  const std::uint8_t* text = text_mask.data();
  std::vector<std::int32_t> visited(static_cast<std::size_t>(seeds.labels.size()), -1);
  for (const std::int32_t p : g.walkers) {
    visited[p] = p;
    std::int32_t q = g.next(p);
    std::int32_t result = 0;
    for (std::int64_t i = 1;; ++i) {
      if (!text[q] || q == p || i > g.positives) break;
      if (seed[q] != 0) {
        result = seed[q];
        break;
      }
      if (visited[q] == p) break;
      visited[q] = p;
      q = g.next(q);
    }
    out.labels.data()[p] = result;
  }
  return out;
}

}  // namespace textmountain
