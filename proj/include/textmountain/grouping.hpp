#pragma once

// Mountain-climbing pixel grouping: peaks of the center-border map seed the
// instances, and every other text pixel follows a per-pixel next-step graph
// until it reaches a colored pixel or a blocked route.

#include "textmountain/raster.hpp"

#include <array>
#include <cstdint>
#include <string_view>

namespace textmountain {

enum class GraphSource { Tcbp, Tcd };

GraphSource parse_graph_source(std::string_view name);

struct GroupConfig {
  double gamma = 0.6;               // peak threshold on TCBP
  double instance_score_min = 0.7;  // minimum mean TS over a peak
  double ts_border_min = 0.6;       // TS threshold for text pixels
  GraphSource graph_source = GraphSource::Tcbp;

  /// Throws std::invalid_argument unless every threshold lies in (0, 1).
  void validate() const;
};

/// The eight neighbor offsets in row-major scan order, then the self offset.
inline constexpr std::array<std::array<int, 2>, 9> kStepOffsets = {{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}, {0, 0}}};
inline constexpr std::uint8_t kSelfStep = 8;

/// Index into kStepOffsets of the offset (dx, dy), each in {-1, 0, 1}.
constexpr std::uint8_t step_code(int dx, int dy) {
  if (dx == 0 && dy == 0) return kSelfStep;
  const int r = (dy + 1) * 3 + (dx + 1);
  return static_cast<std::uint8_t>(r < 4 ? r : r - 1);
}

/// Per-pixel step code indexing kStepOffsets. Steps never leave the image.
struct NextMap {
  Plane<std::uint8_t> step;

  int width() const { return static_cast<int>(step.cols()); }
  int height() const { return static_cast<int>(step.rows()); }
  std::array<int, 2> offset(int x, int y) const { return kStepOffsets[step(y, x)]; }
};

struct Peaks {
  InstanceMap seeds;  // 4-connected components of peak pixels, ids 1..K
  Mask text;          // TS >= ts_border_min
  Mask border;        // text pixels that are not peaks
};

Peaks extract_peaks(const Eigen::Ref<const FloatPlane>& tcbp, const Eigen::Ref<const FloatPlane>& ts,
                    const GroupConfig& cfg);

/// Erases peaks whose mean TS is below instance_score_min and relabels the
/// survivors densely in their original order.
InstanceMap score_instances(const InstanceMap& seeds, const Eigen::Ref<const FloatPlane>& ts,
                            const GroupConfig& cfg);

/// Text pixels step to their largest in-bounds 8-neighbor (first in scan order
/// on ties); other pixels keep the self step.
NextMap next_from_tcbp(const Eigen::Ref<const FloatPlane>& tcbp, const Mask& text_mask);

/// Quantizes decoded TCD vectors: each component maps to +1 above
/// cos(3pi/8), -1 below its negative, 0 otherwise. Steps that would leave the
/// image are clamped to stay inside.
NextMap next_from_tcd(const Eigen::Ref<const FloatPlane>& ux, const Eigen::Ref<const FloatPlane>& uy);

/// Quantization of one TCD component.
int quantize_direction(float u);

/// Parallel climb. Every uncolored text pixel follows its chain and adopts
/// the color of the first colored pixel reached; chains that leave the text
/// mask, return to their start, cycle or exceed the positive-pixel count stay
/// 0. Output does not depend on `workers`.
InstanceMap group_parallel(const InstanceMap& seeds, const NextMap& next, const Mask& text_mask,
                           int workers = 1);

/// Single-walker reference with the same contract and no shared state
/// between walks.
InstanceMap group_sequential(const InstanceMap& seeds, const NextMap& next, const Mask& text_mask);

}  // namespace textmountain
