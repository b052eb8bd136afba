#pragma once

#include "textmountain/detect.hpp"
#include "textmountain/labelgen.hpp"
#include "textmountain/polygon.hpp"
#include "textmountain/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace textmountain {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- TMM1 map container ------------------------------------------------------
// "TMM1", u32 LE width, height, channels, then W*H*C float32 LE values,
// channel-major and row-major within a channel.

inline constexpr std::size_t kMapHeaderBytes = 16;

std::vector<std::uint8_t> encode_map(const RasterMap& map);
RasterMap decode_map(std::span<const std::uint8_t> bytes);
void write_map(const std::filesystem::path& path, const RasterMap& map);
RasterMap read_map(const std::filesystem::path& path);

/// Instance maps travel as single-channel TMM1 files holding integer ids.
RasterMap instances_to_map(const InstanceMap& inst);
InstanceMap map_to_instances(const RasterMap& map);

// --- Annotations ---------------------------------------------------------------

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct AnnotationSet {
  std::vector<TextPolygon> polygons;
  std::vector<ParseIssue> issues;
};

/// One polygon per line: x1,y1,...,xn,yn with n = 4 or 14, optionally
/// followed by a transcription. A transcription of "###" marks the polygon
/// DO-NOT-CARE; any other transcription is discarded. Blank lines are
/// skipped and malformed lines are reported, never thrown.
AnnotationSet parse_annotation_text(std::string_view text);
AnnotationSet parse_annotations(const std::filesystem::path& path);

/// Writes polygons in the format parse_annotations reads.
std::string format_annotations(std::span<const TextPolygon> polys);
void write_annotations(const std::filesystem::path& path, std::span<const TextPolygon> polys);

// --- Detections ----------------------------------------------------------------
// One polygon per line with a trailing score. Files covering several images
// separate them with "# image <name>" header lines.

std::string format_detections(std::span<const Detection> dets);
void write_detections(const std::filesystem::path& path, std::span<const Detection> dets);

struct ImageDetections {
  std::string image;  // empty for single-image files
  std::vector<Detection> detections;
};

void write_detection_sets(const std::filesystem::path& path, std::span<const ImageDetections> sets);
std::vector<ImageDetections> read_detections(const std::filesystem::path& path);

// --- Rendering -------------------------------------------------------------------

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

using RgbImage = Plane<std::uint32_t>;  // packed 0xRRGGBB

RgbImage render_gray(const Eigen::Ref<const FloatPlane>& plane);
/// Hue from the vector angle, brightness from its length; zero is black.
RgbImage render_direction(const Eigen::Ref<const FloatPlane>& ux, const Eigen::Ref<const FloatPlane>& uy);
/// Background black, each instance id a distinct color.
RgbImage render_instances(const InstanceMap& inst);

void write_ppm(const std::filesystem::path& path, const RgbImage& image);

// --- Scene directories -----------------------------------------------------------
// A scene directory holds maps.tmm (TS, TCBP, TCD x, TCD y as consumed by
// detection), labels.tmm (TS, TCBP, TCD x, TCD y, ignore), instances.tmm and
// gt.txt. A dataset directory holds scene subdirectories.

inline constexpr const char* kMapsFile = "maps.tmm";
inline constexpr const char* kLabelsFile = "labels.tmm";
inline constexpr const char* kInstancesFile = "instances.tmm";
inline constexpr const char* kGroundTruthFile = "gt.txt";

RasterMap label_bundle(const LabelSet& labels);
RasterMap maps_from_labels(const LabelSet& labels);
LabelSet labels_from_bundle(const RasterMap& bundle);

void write_scene(const std::filesystem::path& dir, const LabelSet& labels, const RasterMap& maps,
                 std::span<const TextPolygon> polys);

/// Scene directories under `root`, sorted by name; `root` itself when it is
/// a scene.
std::vector<std::filesystem::path> list_scenes(const std::filesystem::path& root);

}  // namespace textmountain
