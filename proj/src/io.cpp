#include "textmountain/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace textmountain {
namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'T', 'M', 'M', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view token, double& value) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(value);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace

std::vector<std::uint8_t> encode_map(const RasterMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kMapHeaderBytes + 4 * map.data().size());
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.channels()));
  for (const float v : map.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

RasterMap decode_map(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMapHeaderBytes) {
    throw IoError("TMM1: truncated header (" + std::to_string(bytes.size()) + " bytes, expected at least 16)");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError("TMM1: bad magic");
  const std::uint64_t w = get_u32(bytes.data() + 4);
  const std::uint64_t h = get_u32(bytes.data() + 8);
  const std::uint64_t c = get_u32(bytes.data() + 12);
  if (c == 0) throw IoError("TMM1: zero channels");
  constexpr auto kIntMax = static_cast<std::uint64_t>(std::numeric_limits<int>::max());
  if (w > kIntMax || h > kIntMax || c > kIntMax) throw IoError("TMM1: dimension overflow");
  // w * h * c * 4 must fit comfortably; each factor is below 2^31.
  const unsigned __int128 values = static_cast<unsigned __int128>(w) * h * c;
  if (values > (std::numeric_limits<std::uint64_t>::max() - kMapHeaderBytes) / 4) {
    throw IoError("TMM1: dimension overflow");
  }
  const std::uint64_t expected = kMapHeaderBytes + 4 * static_cast<std::uint64_t>(values);
  if (bytes.size() != expected) {
    throw IoError("TMM1: size mismatch, expected " + std::to_string(expected) + " bytes, got " +
                  std::to_string(bytes.size()));
  }
  RasterMap map(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
  auto data = map.data();
  const std::uint8_t* p = bytes.data() + kMapHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i, p += 4) data[i] = std::bit_cast<float>(get_u32(p));
  return map;
}

void write_map(const fs::path& path, const RasterMap& map) {
  const auto bytes = encode_map(map);
  write_bytes(path, bytes.data(), bytes.size());
}

RasterMap read_map(const fs::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_map(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

RasterMap instances_to_map(const InstanceMap& inst) {
  RasterMap map(inst.width(), inst.height(), 1);
  map.channel(0) = inst.labels.cast<float>();
  return map;
}

InstanceMap map_to_instances(const RasterMap& map) {
  if (map.channels() != 1) throw IoError("instance map must have one channel");
  InstanceMap inst(map.width(), map.height());
  inst.labels = map.channel(0).cast<std::int32_t>();
  inst.count = inst.labels.size() > 0 ? std::max(0, inst.labels.maxCoeff()) : 0;
  return inst;
}

AnnotationSet parse_annotation_text(std::string_view text) {
  AnnotationSet out;
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::size_t line_no = 0;
  for (const auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto tokens = split(line, ',');
    std::vector<double> nums;
    std::size_t i = 0;
    for (; i < tokens.size(); ++i) {
      double v;
      if (!parse_number(tokens[i], v)) break;
      nums.push_back(v);
    }
    std::size_t take;
    if (nums.size() == 8 || nums.size() == 28) {
      take = nums.size();
    } else if (nums.size() > 28) {
      take = 28;
    } else if (nums.size() > 8) {
      take = 8;
    } else {
      out.issues.push_back({line_no, "expected 8 or 28 coordinates, found " + std::to_string(nums.size())});
      continue;
    }
    // Whatever follows the coordinates is the transcription.
    std::string transcription;
    for (std::size_t t = take; t < tokens.size(); ++t) {
      if (t > take) transcription += ',';
      transcription += tokens[t];
    }
    const bool ignore = trim(transcription) == "###";
    std::vector<Point> verts;
    for (std::size_t k = 0; k < take; k += 2) verts.emplace_back(nums[k], nums[k + 1]);
    try {
      out.polygons.push_back(TextPolygon::make(std::move(verts), ignore));
    } catch (const GeometryError& e) {
      out.issues.push_back({line_no, e.what()});
    }
  }
  return out;
}

AnnotationSet parse_annotations(const fs::path& path) { return parse_annotation_text(read_text(path)); }

std::string format_annotations(std::span<const TextPolygon> polys) {
  std::string out;
  for (const auto& p : polys) {
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      if (i) out += ',';
      append_number(out, p.vertices[i].x());
      out += ',';
      append_number(out, p.vertices[i].y());
    }
    if (p.ignore) out += ",###";
    out += '\n';
  }
  return out;
}

void write_annotations(const fs::path& path, std::span<const TextPolygon> polys) {
  const auto text = format_annotations(polys);
  write_bytes(path, text.data(), text.size());
}

std::string format_detections(std::span<const Detection> dets) {
  std::string out;
  for (const auto& d : dets) {
    for (const auto& p : d.polygon) {
      append_number(out, p.x());
      out += ',';
      append_number(out, p.y());
      out += ',';
    }
    append_number(out, d.score);
    out += '\n';
  }
  return out;
}

void write_detections(const fs::path& path, std::span<const Detection> dets) {
  const auto text = format_detections(dets);
  write_bytes(path, text.data(), text.size());
}

void write_detection_sets(const fs::path& path, std::span<const ImageDetections> sets) {
  std::string text;
  for (const auto& s : sets) {
    if (!s.image.empty()) text += "# image " + s.image + "\n";
    text += format_detections(s.detections);
  }
  write_bytes(path, text.data(), text.size());
}

std::vector<ImageDetections> read_detections(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<ImageDetections> out;
  std::size_t line_no = 0;
  for (const auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.starts_with("# image ")) {
      out.push_back({std::string(trim(line.substr(8))), {}});
      continue;
    }
    if (line.starts_with('#')) continue;
    std::vector<double> nums;
    for (const auto tok : split(line, ',')) {
      double v;
      if (!parse_number(tok, v)) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed detection line");
      }
      nums.push_back(v);
    }
    if (nums.size() < 7 || nums.size() % 2 == 0) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected x,y pairs and a score");
    }
    Detection d;
    d.score = nums.back();
    for (std::size_t k = 0; k + 1 < nums.size(); k += 2) d.polygon.emplace_back(nums[k], nums[k + 1]);
    if (out.empty()) out.push_back({});
    out.back().detections.push_back(std::move(d));
  }
  return out;
}

namespace {

std::uint32_t pack(double r, double g, double b) {
  auto q = [](double v) { return static_cast<std::uint32_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  return q(r) << 16 | q(g) << 8 | q(b);
}

std::uint32_t hsv(double hue_deg, double s, double v) {
  const double h = std::fmod(std::fmod(hue_deg, 360.0) + 360.0, 360.0) / 60.0;
  const double c = v * s;
  const double x = c * (1 - std::abs(std::fmod(h, 2.0) - 1));
  const double m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return pack(r + m, g + m, b + m);
}

}  // namespace

RgbImage render_gray(const Eigen::Ref<const FloatPlane>& plane) {
  return plane.unaryExpr([](float v) {
    const double g = std::isfinite(v) ? v : 0.0;
    return pack(g, g, g);
  });
}

RgbImage render_direction(const Eigen::Ref<const FloatPlane>& ux, const Eigen::Ref<const FloatPlane>& uy) {
  RgbImage out(ux.rows(), ux.cols());
  for (Eigen::Index y = 0; y < ux.rows(); ++y) {
    for (Eigen::Index x = 0; x < ux.cols(); ++x) {
      const double vx = ux(y, x), vy = uy(y, x);
      const double len = std::hypot(vx, vy);
      out(y, x) = len > 0 ? hsv(std::atan2(vy, vx) * 180.0 / std::numbers::pi, 1.0, std::min(len, 1.0)) : 0u;
    }
  }
  return out;
}

RgbImage render_instances(const InstanceMap& inst) {
  return inst.labels.unaryExpr([](std::int32_t id) -> std::uint32_t {
    if (id <= 0) return 0u;
    // Golden-angle hue steps keep neighbouring ids far apart on the wheel.
    const double hue = std::fmod(id * 137.50776405, 360.0);
    const double value = 0.55 + 0.45 * ((id / 7) % 2);
    return hsv(hue, 0.85, value) | 0x010101u;
  });
}

void write_ppm(const fs::path& path, const RgbImage& image) {
  std::string data = "P6\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  data.reserve(data.size() + 3 * static_cast<std::size_t>(image.size()));
  for (Eigen::Index y = 0; y < image.rows(); ++y) {
    for (Eigen::Index x = 0; x < image.cols(); ++x) {
      const std::uint32_t c = image(y, x);
      data.push_back(static_cast<char>((c >> 16) & 0xff));
      data.push_back(static_cast<char>((c >> 8) & 0xff));
      data.push_back(static_cast<char>(c & 0xff));
    }
  }
  write_bytes(path, data.data(), data.size());
}

RasterMap label_bundle(const LabelSet& labels) {
  const FloatPlane ts = labels.ts.channel(0);
  const FloatPlane tcbp = labels.tcbp.channel(0);
  const FloatPlane ux = labels.tcd.channel(0);
  const FloatPlane uy = labels.tcd.channel(1);
  const FloatPlane ignore = labels.ignore.cast<float>();
  return RasterMap::stack({&ts, &tcbp, &ux, &uy, &ignore});
}

RasterMap maps_from_labels(const LabelSet& labels) {
  const FloatPlane ts = labels.ts.channel(0);
  const FloatPlane tcbp = labels.tcbp.channel(0);
  const FloatPlane ux = labels.tcd.channel(0);
  const FloatPlane uy = labels.tcd.channel(1);
  return RasterMap::stack({&ts, &tcbp, &ux, &uy});
}

LabelSet labels_from_bundle(const RasterMap& bundle) {
  if (bundle.channels() != 5) throw IoError("label bundle must have 5 channels");
  LabelSet l;
  const int w = bundle.width(), h = bundle.height();
  l.ts = RasterMap(w, h, 1);
  l.tcbp = RasterMap(w, h, 1);
  l.tcd = RasterMap(w, h, 2);
  l.ts.channel(0) = bundle.channel(0);
  l.tcbp.channel(0) = bundle.channel(1);
  l.tcd.channel(0) = bundle.channel(2);
  l.tcd.channel(1) = bundle.channel(3);
  l.ignore = (bundle.channel(4) > 0.5f).cast<std::uint8_t>();
  l.instance_gt = InstanceMap(w, h);
  return l;
}

void write_scene(const fs::path& dir, const LabelSet& labels, const RasterMap& maps, std::span<const TextPolygon> polys) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_map(dir / kLabelsFile, label_bundle(labels));
  write_map(dir / kMapsFile, maps);
  write_map(dir / kInstancesFile, instances_to_map(labels.instance_gt));
  write_annotations(dir / kGroundTruthFile, polys);
}

std::vector<fs::path> list_scenes(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  if (fs::exists(root / kMapsFile) || fs::exists(root / kLabelsFile)) return {root};
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && (fs::exists(entry.path() / kMapsFile) || fs::exists(entry.path() / kLabelsFile))) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace textmountain
