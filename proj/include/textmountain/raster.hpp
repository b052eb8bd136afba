#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace textmountain {

/// One image plane, indexed (row = y, col = x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using FloatPlane = Plane<float>;
using Mask = Plane<std::uint8_t>;
using LabelPlane = Plane<std::int32_t>;

/// W x H x C float raster, planar (channel-major), row-major inside a channel.
class RasterMap {
 public:
  using ChannelMap = Eigen::Map<FloatPlane>;
  using ConstChannelMap = Eigen::Map<const FloatPlane>;

  RasterMap() = default;
  RasterMap(int width, int height, int channels, float fill = 0.0f)
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 0) throw std::invalid_argument("negative raster size");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(width_) * height_; }

  ChannelMap channel(int c) {
    return ChannelMap(data_.data() + c * plane_size(), height_, width_);
  }
  ConstChannelMap channel(int c) const {
    return ConstChannelMap(data_.data() + c * plane_size(), height_, width_);
  }

  float& at(int c, int y, int x) { return data_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x]; }
  float at(int c, int y, int x) const { return data_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  /// Stacks equally sized planes into a multi-channel map.
  static RasterMap stack(std::initializer_list<const FloatPlane*> planes);

  bool operator==(const RasterMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Per-pixel text-instance ids, 0 = background. `count` is the largest id.
struct InstanceMap {
  LabelPlane labels;
  int count = 0;

  InstanceMap() = default;
  InstanceMap(int width, int height) : labels(LabelPlane::Zero(height, width)) {}

  int width() const { return static_cast<int>(labels.cols()); }
  int height() const { return static_cast<int>(labels.rows()); }
};

inline RasterMap RasterMap::stack(std::initializer_list<const FloatPlane*> planes) {
  if (planes.size() == 0) return {};
  const auto* first = *planes.begin();
  RasterMap out(static_cast<int>(first->cols()), static_cast<int>(first->rows()),
                static_cast<int>(planes.size()));
  int c = 0;
  for (const auto* p : planes) {
    if (p->rows() != first->rows() || p->cols() != first->cols()) {
      throw std::invalid_argument("plane size mismatch");
    }
    out.channel(c++) = *p;
  }
  return out;
}

}  // namespace textmountain
