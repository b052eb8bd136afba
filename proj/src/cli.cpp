#include "textmountain/cli.hpp"

#include "textmountain/eval.hpp"
#include "textmountain/io.hpp"
#include "textmountain/labelgen.hpp"
#include "textmountain/parallel.hpp"
#include "textmountain/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <random>

namespace textmountain {
namespace fs = std::filesystem;

namespace {

struct Size {
  int width = 0;
  int height = 0;
};

Size parse_size(const std::string& text) {
  int w = 0, h = 0;
  char x = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d%c%d%c", &w, &x, &h, &tail) != 3 || (x != 'x' && x != 'X') || w <= 0 || h <= 0) {
    throw std::invalid_argument("size must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  return {w, h};
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Options attached to every subcommand that groups pixels.
void add_group_options(CLI::App* cmd, RunConfig& run, std::string& source) {
  cmd->add_option("--gamma", run.group.gamma, "peak threshold on TCBP")->capture_default_str();
  cmd->add_option("--score-min", run.group.instance_score_min, "minimum mean TS of a peak")->capture_default_str();
  cmd->add_option("--ts-min", run.group.ts_border_min, "TS threshold for text pixels")->capture_default_str();
  cmd->add_option("--source", source, "next-step graph source")
      ->check(CLI::IsMember({"tcbp", "tcd"}))
      ->capture_default_str();
  cmd->add_option("--workers", run.workers, "worker threads (default: TM_WORKERS or all cores)");
}

struct GroupingInput {
  InstanceMap seeds;
  NextMap next;
  Mask text;
};

GroupingInput prepare_grouping(const RasterMap& maps, const GroupConfig& cfg) {
  if (maps.channels() < 2) throw std::invalid_argument("maps need TS and TCBP channels");
  auto peaks = extract_peaks(maps.channel(1), maps.channel(0), cfg);
  GroupingInput in;
  in.seeds = score_instances(peaks.seeds, maps.channel(0), cfg);
  if (cfg.graph_source == GraphSource::Tcd) {
    if (maps.channels() < 4) throw std::invalid_argument("the TCD graph needs 4 map channels");
    in.next = next_from_tcd(maps.channel(2), maps.channel(3));
  } else {
    in.next = next_from_tcbp(maps.channel(1), peaks.text);
  }
  in.text = std::move(peaks.text);
  return in;
}

int run_gen_labels(const std::string& ann, const std::string& size_text, const std::string& out_dir,
                   const RunConfig& run, std::ostream& out, std::ostream& err) {
  const Size size = parse_size(size_text);
  const auto set = parse_annotations(ann);
  for (const auto& issue : set.issues) err << ann << ":" << issue.line << ": " << issue.message << "\n";
  const int workers = resolve_workers(run.workers);
  const LabelSet labels = generate_labels(set.polygons, size.width, size.height, workers);
  write_scene(out_dir, labels, maps_from_labels(labels), set.polygons);
  out << "wrote labels for " << set.polygons.size() << " polygons to " << out_dir << "\n";
  return kExitOk;
}

int run_synth(int n, const std::string& size_text, double noise, double angle_noise, double curved_fraction,
              const std::string& out_dir, const RunConfig& run, std::ostream& out) {
  const Size size = parse_size(size_text);
  if (n < 0) throw std::invalid_argument("--n must be non-negative");
  SceneConfig scene;
  scene.width = size.width;
  scene.height = size.height;
  scene.curved_fraction = curved_fraction;
  NoiseConfig nc;
  nc.sigma = noise;
  nc.angle_deg = angle_noise >= 0 ? angle_noise : (noise > 0 ? 5.0 : 0.0);
  std::mt19937 rng(run.seed);
  const int workers = resolve_workers(run.workers);
  std::size_t total = 0;
  for (int i = 0; i < n; ++i) {
    const auto polys = random_scene(scene, rng);
    const LabelSet labels = generate_labels(polys, size.width, size.height, workers);
    RasterMap maps = maps_from_labels(labels);
    if (nc.sigma > 0 || nc.angle_deg > 0) maps = add_noise(maps, nc, rng);
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d", i);
    write_scene(fs::path(out_dir) / name, labels, maps, polys);
    total += polys.size();
  }
  out << "wrote " << n << " scenes with " << total << " texts to " << out_dir << "\n";
  return kExitOk;
}

int run_detect(const std::string& in_dir, const std::string& out_file, const RunConfig& run, std::ostream& out) {
  run.group.validate();
  const int workers = resolve_workers(run.workers);
  std::vector<ImageDetections> sets;
  std::size_t total = 0;
  for (const auto& scene : list_scenes(in_dir)) {
    const RasterMap maps = read_map(scene / kMapsFile);
    auto result = detect_pipeline(maps, run.group, run.mode, workers);
    total += result.detections.size();
    sets.push_back({scene.filename().string(), std::move(result.detections)});
  }
  write_detection_sets(out_file, sets);
  out << "detected " << total << " texts in " << sets.size() << " images\n";
  return kExitOk;
}

int run_eval(const std::string& det_file, const std::string& gt_path, const EvalConfig& cfg, std::ostream& out) {
  const auto sets = read_detections(det_file);
  std::vector<ImageEval> images;
  if (fs::is_directory(gt_path)) {
    std::map<std::string, const ImageDetections*> by_name;
    for (const auto& s : sets) by_name[s.image] = &s;
    const auto scenes = list_scenes(gt_path);
    for (const auto& scene : scenes) {
      const auto gts = to_ground_truth(parse_annotations(scene / kGroundTruthFile).polygons);
      const std::vector<Detection>* dets = nullptr;
      if (auto it = by_name.find(scene.filename().string()); it != by_name.end()) {
        dets = &it->second->detections;
      } else if (scenes.size() == 1 && sets.size() == 1) {
        dets = &sets.front().detections;
      }
      images.push_back(match_image(dets ? std::span<const Detection>(*dets) : std::span<const Detection>(), gts, cfg));
    }
  } else {
    const auto gts = to_ground_truth(parse_annotations(gt_path).polygons);
    std::vector<Detection> all;
    for (const auto& s : sets) all.insert(all.end(), s.detections.begin(), s.detections.end());
    images.push_back(match_image(all, gts, cfg));
  }
  const EvalResult r = summarize(std::move(images));
  out << "precision=" << fixed3(r.precision) << " recall=" << fixed3(r.recall) << " F=" << fixed3(r.f_measure)
      << " tp=" << r.tp << " fp=" << r.fp << " fn=" << r.fn << "\n";
  return kExitOk;
}

int run_loss(const std::string& pred_dir, const std::string& gt_dir, const RunConfig& run, bool gt_mask,
             std::ostream& out) {
  const auto preds = list_scenes(pred_dir);
  const auto gts = list_scenes(gt_dir);
  std::map<std::string, fs::path> gt_by_name;
  for (const auto& g : gts) gt_by_name[g.filename().string()] = g;
  LossReport sum;
  int n = 0;
  for (const auto& p : preds) {
    fs::path g;
    if (auto it = gt_by_name.find(p.filename().string()); it != gt_by_name.end()) {
      g = it->second;
    } else if (preds.size() == 1 && gts.size() == 1) {
      g = gts.front();
    } else {
      throw IoError("no ground truth for " + p.string());
    }
    const RasterMap pred = read_map(p / kMapsFile);
    const LabelSet labels = labels_from_bundle(read_map(g / kLabelsFile));
    if (pred.channels() < 4) throw IoError(p.string() + ": maps need 4 channels");
    const auto ts = loss_ts(pred.channel(0), labels);
    const double tcbp = loss_tcbp(pred.channel(1), labels);
    const double tcd = loss_tcd(pred.channel(2), pred.channel(3), labels, pred.channel(1), run.group.gamma,
                                gt_mask ? BorderMask::GroundTruth : BorderMask::Predicted);
    const LossReport r = total_loss(ts.value, tcbp, tcd, run.weights);
    out << p.filename().string() << ": l_ts=" << r.l_ts << " l_tcbp=" << r.l_tcbp << " l_tcd=" << r.l_tcd
        << " total=" << r.total << "\n";
    sum.l_ts += r.l_ts;
    sum.l_tcbp += r.l_tcbp;
    sum.l_tcd += r.l_tcd;
    sum.total += r.total;
    ++n;
  }
  if (n > 0) {
    out << "mean: l_ts=" << sum.l_ts / n << " l_tcbp=" << sum.l_tcbp / n << " l_tcd=" << sum.l_tcd / n
        << " total=" << sum.total / n << "\n";
  }
  return kExitOk;
}

template <typename Fn>
double best_ms(int repeat, Fn&& fn) {
  double best = 1e300;
  for (int i = 0; i < repeat; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

int run_bench(const std::string& input, const std::string& synthetic, int repeat, const RunConfig& run,
              std::ostream& out) {
  run.group.validate();
  std::vector<std::pair<std::string, RasterMap>> cases;
  if (!synthetic.empty()) {
    const Size size = parse_size(synthetic);
    std::mt19937 rng(run.seed);
    const auto polys = dense_scene(size.width, size.height, rng);
    cases.emplace_back("synthetic " + synthetic, maps_from_labels(generate_labels(polys, size.width, size.height)));
  } else if (fs::is_regular_file(input)) {
    cases.emplace_back(input, read_map(input));
  } else if (!input.empty()) {
    for (const auto& scene : list_scenes(input)) cases.emplace_back(scene.filename().string(), read_map(scene / kMapsFile));
  } else {
    throw std::invalid_argument("bench needs a map path or --synthetic WxH");
  }
  const int workers = resolve_workers(run.workers);
  double seq_total = 0, par_total = 0;
  for (const auto& [name, maps] : cases) {
    const GroupingInput in = prepare_grouping(maps, run.group);
    InstanceMap seq, par;
    const double seq_ms = best_ms(repeat, [&] { seq = group_sequential(in.seeds, in.next, in.text); });
    const double par_ms = best_ms(repeat, [&] { par = group_parallel(in.seeds, in.next, in.text, workers); });
    if (seq.labels.size() != par.labels.size() || (seq.labels != par.labels).any()) {
      throw std::runtime_error(name + ": parallel and sequential grouping disagree");
    }
    seq_total += seq_ms;
    par_total += par_ms;
    out << name << " (" << maps.width() << "x" << maps.height() << ", " << in.seeds.count
        << " instances): sequential " << fixed3(seq_ms) << " ms, parallel " << fixed3(par_ms) << " ms\n";
  }
  out << "sequential " << fixed3(seq_total) << " ms, parallel " << fixed3(par_total) << " ms with " << workers
      << " workers, speedup " << fixed3(par_total > 0 ? seq_total / par_total : 0.0) << "x\n";
  return kExitOk;
}

int run_render(const std::string& input, const std::string& out_file, bool instances, int channel, bool direction,
               std::ostream& out) {
  const RasterMap map = read_map(input);
  RgbImage image;
  if (instances || fs::path(input).filename() == kInstancesFile) {
    image = render_instances(map_to_instances(map));
  } else if (direction) {
    if (map.channels() < channel + 2) throw std::invalid_argument("direction rendering needs two channels");
    image = render_direction(map.channel(channel), map.channel(channel + 1));
  } else {
    if (channel < 0 || channel >= map.channels()) throw std::invalid_argument("channel out of range");
    image = render_gray(map.channel(channel));
  }
  write_ppm(out_file, image);
  out << "wrote " << out_file << "\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Text detection post-processing toolkit", "textmountain"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  RunConfig run;
  if (const char* w = std::getenv("TM_WORKERS")) run.workers = std::atoi(w);
  std::string source = "tcbp";
  std::string mode = "auto";
  std::string out_path;

  std::string ann, size_text = "640x640";
  auto* gen = app.add_subcommand("gen-labels", "generate TS, TCBP and TCD maps from an annotation file");
  gen->add_option("annotations", ann, "annotation file")->required();
  gen->add_option("size", size_text, "image size WIDTHxHEIGHT")->required();
  gen->add_option("-o,--out", out_path, "output scene directory")->required();
  gen->add_option("--workers", run.workers, "worker threads");

  int n = 1;
  double noise = 0, angle_noise = -1, curved_fraction = 0.25;
  auto* synth = app.add_subcommand("synth", "write random synthetic scenes with ground-truth maps");
  synth->add_option("--n", n, "number of scenes")->capture_default_str();
  synth->add_option("--size", size_text, "image size WIDTHxHEIGHT")->capture_default_str();
  synth->add_option("--noise", noise, "Gaussian sigma added to TS and TCBP")->capture_default_str();
  synth->add_option("--angle-noise", angle_noise, "TCD angle noise in degrees (default 5 when --noise > 0)");
  synth->add_option("--curved-fraction", curved_fraction, "share of curved texts")->capture_default_str();
  synth->add_option("--seed", run.seed, "random seed")->capture_default_str();
  synth->add_option("-o,--out", out_path, "output dataset directory")->required();
  synth->add_option("--workers", run.workers, "worker threads");

  std::string in_dir;
  auto* detect = app.add_subcommand("detect", "group pixels and fit polygons for every scene");
  detect->add_option("maps", in_dir, "scene or dataset directory")->required();
  detect->add_option("-o,--out", out_path, "detection file")->required();
  detect->add_option("--mode", mode, "polygon fitting")
      ->check(CLI::IsMember({"quad", "curved", "auto"}))
      ->capture_default_str();
  add_group_options(detect, run, source);

  std::string det_file, gt_path;
  EvalConfig eval_cfg;
  bool no_ignore = false;
  auto* eval = app.add_subcommand("eval", "score detections against ground truth");
  eval->add_option("detections", det_file, "detection file")->required();
  eval->add_option("gt", gt_path, "annotation file or dataset directory")->required();
  eval->add_option("--iou", eval_cfg.iou_min, "IoU threshold")->capture_default_str();
  eval->add_flag("--no-ignore", no_ignore, "treat ### regions as ordinary ground truth");

  std::string pred_dir, gt_dir;
  bool gt_mask = false;
  auto* loss = app.add_subcommand("loss", "evaluate the training objective of predicted maps");
  loss->add_option("pred", pred_dir, "directory of predicted maps")->required();
  loss->add_option("gt", gt_dir, "directory of label bundles")->required();
  loss->add_option("--gamma", run.group.gamma, "border threshold for the TCD mask")->capture_default_str();
  loss->add_option("--lambda-tcbp", run.weights.tcbp, "TCBP loss weight")->capture_default_str();
  loss->add_option("--lambda-tcd", run.weights.tcd, "TCD loss weight")->capture_default_str();
  loss->add_flag("--gt-border-mask", gt_mask, "mask the TCD loss with ground-truth TCBP");

  std::string bench_input, synthetic;
  int repeat = 5;
  auto* bench = app.add_subcommand("bench", "time parallel against sequential grouping");
  bench->add_option("maps", bench_input, "map file, scene or dataset directory");
  bench->add_option("--synthetic", synthetic, "generate a dense WIDTHxHEIGHT scene instead");
  bench->add_option("--seed", run.seed, "seed for --synthetic")->capture_default_str();
  bench->add_option("--repeat", repeat, "runs per measurement, best kept")->capture_default_str()->check(CLI::PositiveNumber);
  add_group_options(bench, run, source);

  std::string render_input;
  bool render_inst = false, render_dir = false;
  int channel = 0;
  auto* render = app.add_subcommand("render", "render a map or instance file as a PPM image");
  render->add_option("input", render_input, "TMM1 file")->required();
  render->add_option("-o,--out", out_path, "output PPM")->required();
  render->add_flag("--inst", render_inst, "input is an instance map");
  render->add_flag("--direction", render_dir, "render channels c, c+1 as a direction field");
  render->add_option("--channel", channel, "channel to render")->capture_default_str();

  std::vector<std::string> argv_storage{"textmountain"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    run.group.graph_source = parse_graph_source(source);
    run.mode = parse_polygon_mode(mode);
    if (gen->parsed()) return run_gen_labels(ann, size_text, out_path, run, out, err);
    if (synth->parsed()) return run_synth(n, size_text, noise, angle_noise, curved_fraction, out_path, run, out);
    if (detect->parsed()) return run_detect(in_dir, out_path, run, out);
    if (eval->parsed()) {
      eval_cfg.use_ignore = !no_ignore;
      return run_eval(det_file, gt_path, eval_cfg, out);
    }
    if (loss->parsed()) return run_loss(pred_dir, gt_dir, run, gt_mask, out);
    if (bench->parsed()) return run_bench(bench_input, synthetic, repeat, run, out);
    if (render->parsed()) return run_render(render_input, out_path, render_inst, channel, render_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace textmountain
