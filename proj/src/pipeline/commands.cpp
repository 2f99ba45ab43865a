#include "ltr/pipeline/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <map>

#include "ltr/error.hpp"
#include "ltr/io/image.hpp"
#include "ltr/io/ply.hpp"
#include "ltr/io/pose_file.hpp"
#include "ltr/metrics/completion.hpp"
#include "ltr/pipeline/scene.hpp"
#include "ltr/pipeline/transfer.hpp"

namespace ltr::pipeline {

namespace fs = std::filesystem;
using io::Json;
using pointcloud::PointCloud;

namespace {

fs::path output_dir(const PipelineConfig& config) {
  fs::create_directories(config.paths.output);
  return fs::path(config.paths.output);
}

Json finish(const PipelineConfig& config, Json per_class, Json mean, Json params, Json counts, Json extra = {}) {
  Json report{{"per_class", std::move(per_class)},
              {"mean", std::move(mean)},
              {"params", std::move(params)},
              {"counts", std::move(counts)}};
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it) report[it.key()] = it.value();
  io::write_json((output_dir(config) / "report.json").string(), report);
  return report;
}

std::vector<pointcloud::StampedCloud> manifest_scans(const PipelineConfig& config) {
  require_path(config.paths.frames, "frame manifest");
  return load_scans(read_manifest(config.paths.frames, config.paths.poses));
}

// ---- label map pairing ----

struct MapPair {
  std::string stem;
  std::string gt, pred, pred_conf, gt_conf;
};

std::string strip_suffix(std::string s) {
  for (const char* suffix : {"_label", "_gt"}) {
    const std::string x(suffix);
    if (s.size() > x.size() && s.compare(s.size() - x.size(), x.size(), x) == 0) return s.substr(0, s.size() - x.size());
  }
  return s;
}

std::string existing(const fs::path& p) { return fs::exists(p) ? p.string() : std::string(); }

std::vector<MapPair> pair_maps(const std::string& gt, const std::string& pred) {
  if (gt.empty() || pred.empty()) throw ConfigError("--gt and --pred are required");
  if (!fs::exists(gt)) throw IoError("not found: " + gt);
  if (!fs::exists(pred)) throw IoError("not found: " + pred);
  std::vector<MapPair> pairs;
  if (!fs::is_directory(gt)) {
    if (fs::is_directory(pred)) throw ConfigError("--gt is a file but --pred is a directory");
    const fs::path g(gt), p(pred);
    const std::string stem = strip_suffix(g.stem().string());
    const std::string pstem = strip_suffix(p.stem().string());
    pairs.push_back({stem, gt, pred, existing(p.parent_path() / (pstem + "_conf.png")),
                     existing(g.parent_path() / (stem + "_conf.png"))});
    return pairs;
  }
  if (!fs::is_directory(pred)) throw ConfigError("--gt is a directory but --pred is not");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(gt)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && e.path().extension() == ".png" && name.find("_conf.png") == std::string::npos &&
        name.find("_image.png") == std::string::npos)
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    const std::string stem = strip_suffix(f.stem().string());
    std::string p = existing(fs::path(pred) / (stem + "_label.png"));
    if (p.empty()) p = existing(fs::path(pred) / (stem + ".png"));
    if (p.empty()) throw IoError("no prediction for '" + stem + "' in " + pred);
    pairs.push_back({stem, f.string(), p, existing(fs::path(pred) / (stem + "_conf.png")),
                     existing(fs::path(gt) / (stem + "_conf.png"))});
  }
  if (pairs.empty()) throw IoError("no label maps in " + gt);
  return pairs;
}

struct LoadedPair {
  std::vector<int> gt, pred;
  std::vector<double> pred_conf, gt_conf;
};

LoadedPair load_pair(const MapPair& p) {
  LoadedPair out;
  const io::Image16 g = io::read_png16(p.gt), q = io::read_png16(p.pred);
  if (g.width != q.width || g.height != q.height) throw ShapeMismatch("label maps of '" + p.stem + "' differ in size");
  out.gt.assign(g.data.begin(), g.data.end());
  out.pred.assign(q.data.begin(), q.data.end());
  auto conf = [&](const std::string& path, std::vector<double>& dst) {
    if (path.empty()) return;
    const io::Image16 c = io::read_png16(path);
    if (c.width != g.width || c.height != g.height) throw ShapeMismatch("confidence map of '" + p.stem + "' differs in size");
    dst.reserve(c.data.size());
    for (std::uint16_t v : c.data) dst.push_back(decode_confidence(v));
  };
  conf(p.pred_conf, out.pred_conf);
  conf(p.gt_conf, out.gt_conf);
  return out;
}

std::vector<int> gt_label_vector(const io::Image16& gt, const crf::LabelSpace& labels, int ignore_class) {
  std::vector<int> out(gt.data.size(), learning::kIgnoreLabel);
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    const int code = gt.data[i];
    const int sem = code / 1000;
    if (sem == ignore_class) continue;
    std::optional<int> s = labels.find(sem, labels.mode() == crf::LabelMode::Instance ? code % 1000 : 0);
    if (!s) s = labels.find(sem, 0);
    if (s) out[i] = *s;
  }
  return out;
}

}  // namespace

Json cmd_accumulate(const PipelineConfig& config) {
  const std::vector<pointcloud::StampedCloud> scans = manifest_scans(config);
  std::vector<geometry::BoundingPrimitive> dynamic;
  if (!config.paths.primitives.empty()) {
    require_path(config.paths.primitives, "primitives");
    for (const auto& b : io::read_primitives(config.paths.primitives))
      if (b.dynamic) dynamic.push_back(b);
  }
  const PointCloud cloud = pointcloud::accumulate_static(scans, dynamic, config.dedup_radius);
  io::write_ply((output_dir(config) / "accumulated.ply").string(), cloud);
  std::size_t input = 0;
  for (const auto& s : scans) input += s.cloud.size();
  return finish(config, Json::object(), Json::object(),
                Json{{"dedup_radius", config.dedup_radius}, {"dynamic_primitives", dynamic.size()}},
                Json{{"scans", scans.size()}, {"input_points", input}, {"points", cloud.size()}});
}

Json cmd_detect_dynamic(const PipelineConfig& config) {
  const std::vector<pointcloud::StampedCloud> scans = manifest_scans(config);
  if (scans.empty()) throw InvalidArgument("the manifest has no scans");
  const dynamic_detect::DetectorOutput out = dynamic_detect::run_detector(scans, config.detector);
  const std::size_t n = out.cloud.size();
  io::PlyProperty dyn{"dynamic", io::PlyType::UInt8, std::vector<double>(n, 0.0)};
  io::PlyProperty cluster{"cluster", io::PlyType::Int32, std::vector<double>(n, -1.0)};
  Json clusters = Json::array();
  std::size_t dynamic_points = 0;
  for (std::size_t c = 0; c < out.detection.clusters.size(); ++c) {
    const auto& cl = out.detection.clusters[c];
    for (std::size_t i : cl.indices) cluster.values[i] = static_cast<double>(c);
    clusters.push_back(Json{{"index", c},
                            {"size", cl.indices.size()},
                            {"probability", cl.occupancy_probability},
                            {"dynamic", static_cast<bool>(out.detection.cluster_dynamic[c])}});
  }
  for (std::size_t i = 0; i < n; ++i)
    if (out.detection.dynamic[i]) {
      dyn.values[i] = 1.0;
      ++dynamic_points;
    }
  io::write_ply((output_dir(config) / "dynamic.ply").string(), out.cloud, {dyn, cluster});
  const auto& g = config.detector.grid;
  return finish(config, Json::object(), Json::object(),
                Json{{"voxel_size", g.voxel_size},
                     {"l_occ", g.l_occ},
                     {"l_free", g.l_free},
                     {"p_min", g.p_min},
                     {"p_max", g.p_max},
                     {"prob_threshold", config.detector.prob_threshold}},
                Json{{"scans", scans.size()},
                     {"points", n},
                     {"clusters", clusters.size()},
                     {"dynamic_points", dynamic_points}},
                Json{{"clusters", clusters}});
}

Json cmd_fit_trajectory(const PipelineConfig& config, std::optional<int> primitive_id) {
  require_path(config.paths.primitives, "primitives");
  std::vector<geometry::BoundingPrimitive> prims = io::read_primitives(config.paths.primitives);
  const std::vector<pointcloud::StampedCloud> scans = manifest_scans(config);
  std::vector<trajectory::TimedCloud> frames;
  for (const auto& s : scans) frames.push_back({s.timestamp, s.cloud.transformed(s.pose)});

  Json tracks = Json::array();
  std::size_t fitted = 0, skipped = 0;
  bool found = false;
  for (auto& b : prims) {
    if (!b.dynamic || (primitive_id && b.id != *primitive_id)) continue;
    found = true;
    trajectory::KeyframeSet keys{b.extents, b.dynamic_poses};
    std::vector<trajectory::TimedCloud> key_points;
    for (const auto& f : frames)
      if (b.pose_at(f.timestamp)) key_points.push_back(f);
    const trajectory::OccupancyTemplate tmpl = trajectory::build_template(keys, key_points, config.template_voxel);
    const trajectory::TrajectoryResult r = trajectory::interpolate_trajectory(keys, tmpl, frames, config.search);
    Json skips = Json::array();
    for (const auto& s : r.skipped) skips.push_back(Json{{"timestamp", s.timestamp}, {"reason", s.reason}});
    tracks.push_back(Json{{"id", b.id}, {"poses", io::timed_poses_to_json(r.poses)}, {"skipped", skips}});
    fitted += r.poses.size();
    skipped += r.skipped.size();
    if (!r.poses.empty()) {
      b.dynamic_poses = r.poses;
      b.pose = r.poses.front().pose;
    }
  }
  if (primitive_id && !found) throw InvalidArgument("no dynamic primitive with id " + std::to_string(*primitive_id));
  const fs::path out = output_dir(config);
  io::write_json((out / "trajectory.json").string(), tracks);
  io::write_primitives((out / "primitives_fitted.json").string(), prims);
  return finish(config, Json::object(), Json::object(),
                Json{{"voxel_size", config.template_voxel}, {"window", config.search.window}, {"step", config.search.step}},
                Json{{"objects", tracks.size()}, {"poses", fitted}, {"skipped", skipped}});
}

Json cmd_train(const PipelineConfig& config) {
  const SceneBatch batch = load_batch(config);
  crf::ModelWeights initial = config.paths.weights.empty() ? crf::ModelWeights::defaults(config.classes)
                                                           : load_model_weights(config);
  initial.widths = config.widths;

  std::vector<learning::TrainingSample> samples;
  Json failures = Json::array();
  for (const Frame& f : batch.frames) {
    if (f.ground_truth.empty()) continue;
    try {
      FrameProblem fp = build_frame_problem(batch, f, initial.classes, config);
      const io::Image16 gt = io::read_png16(f.ground_truth);
      if (gt.width != fp.pixels.width || gt.height != fp.pixels.height)
        throw FrameFailure("ground truth size differs from the camera");
      learning::TrainingSample s{fp.labels, std::move(fp.pixels), std::move(fp.points),
                                 gt_label_vector(gt, fp.labels, config.metrics.ignore_class)};
      s.validate();
      samples.push_back(std::move(s));
    } catch (const std::exception& e) {
      failures.push_back(Json{{"frame", f.name}, {"error", e.what()}});
    }
  }
  if (samples.empty()) throw InvalidArgument("no frame with a usable ground-truth label map");

  learning::TrainOptions opts = config.training;
  opts.objective.lattice = config.inference.lattice;
  Json cv = Json::array();
  if (config.cross_validate) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sc : learning::cross_validate_lambda(samples, initial, opts, learning::default_lambda_grid())) {
      cv.push_back(Json{{"lambda", sc.lambda}, {"validation_loss", sc.validation_loss}});
      if (sc.validation_loss < best) {
        best = sc.validation_loss;
        opts.lambda = sc.lambda;
      }
    }
  }
  std::vector<double> losses;
  const crf::ModelWeights trained =
      learning::train(samples, initial, opts, [&](const learning::TrainStep& s) { losses.push_back(s.batch_loss); });
  io::write_weights((output_dir(config) / "weights.json").string(), trained);

  Json per_class = Json::object();
  for (int c = 0; c < trained.classes.size(); ++c)
    per_class[std::to_string(trained.classes.classes[static_cast<std::size_t>(c)].id)] =
        Json{{"pixel_constraint", trained.pixel_constraint[c]},
             {"pixel_probability", trained.pixel_probability[c]},
             {"point_constraint", trained.point_constraint[c]}};
  return finish(config, per_class,
                Json{{"first_batch_loss", losses.empty() ? 0.0 : losses.front()},
                     {"last_batch_loss", losses.empty() ? 0.0 : losses.back()}},
                Json{{"lambda", opts.lambda},
                     {"batch_size", opts.batch_size},
                     {"iterations", opts.objective.iterations},
                     {"filter", crf::to_string(opts.objective.filter)},
                     {"constraints", crf::to_string(opts.objective.constraints)},
                     {"seed", opts.seed}},
                Json{{"samples", samples.size()}, {"steps", losses.size()}, {"failed", failures.size()}},
                Json{{"cross_validation", cv}, {"failures", failures}});
}

Json cmd_evaluate_semantic(const PipelineConfig& config, const SemanticEvalOptions& options) {
  if (!(options.density > 0.0 && options.density <= 1.0)) throw ConfigError("density must be in (0, 1]");
  std::vector<int> gt, pred;
  std::vector<double> weight, pred_conf;
  const std::vector<MapPair> pairs = pair_maps(options.gt, options.pred);
  for (const MapPair& p : pairs) {
    LoadedPair l = load_pair(p);
    for (std::size_t i = 0; i < l.gt.size(); ++i) {
      const int sem = l.gt[i] / 1000;
      gt.push_back(sem == config.metrics.ignore_class ? metrics::kIgnore : sem);
      pred.push_back(l.pred[i] / 1000);
    }
    if (options.gt_confidence) {
      if (l.gt_conf.empty()) throw IoError("no ground-truth confidence map for '" + p.stem + "'");
      weight.insert(weight.end(), l.gt_conf.begin(), l.gt_conf.end());
    }
    if (options.density < 1.0) {
      if (l.pred_conf.empty()) throw IoError("no prediction confidence map for '" + p.stem + "'");
      pred_conf.insert(pred_conf.end(), l.pred_conf.begin(), l.pred_conf.end());
    }
  }
  const metrics::SemanticScores s =
      options.density < 1.0 ? metrics::confidence_filtered_eval(gt, pred, pred_conf, options.density, {}, metrics::kIgnore)
                            : metrics::evaluate_semantic(gt, pred, weight, {}, metrics::kIgnore);
  Json per_class = Json::object();
  for (const auto& [c, iou] : s.per_class) per_class[std::to_string(c)] = iou;
  return finish(config, per_class, Json{{"miou", s.miou}, {"accuracy", s.accuracy}},
                Json{{"density", options.density},
                     {"gt_confidence", options.gt_confidence},
                     {"ignore_class", config.metrics.ignore_class}},
                Json{{"frames", pairs.size()}, {"pixels", gt.size()}, {"weight", s.weight}});
}

Json cmd_evaluate_instance(const PipelineConfig& config, const InstanceEvalOptions& options) {
  const std::vector<MapPair> pairs = pair_maps(options.gt, options.pred);
  std::vector<int> all_gt, all_pred;
  std::map<int, std::pair<double, int>> score_sum;  // pred code -> (confidence sum, pixels)
  std::map<int, std::pair<double, int>> per_instance;
  double miou_sum = 0.0;
  int scored_frames = 0;
  for (const MapPair& p : pairs) {
    const LoadedPair l = load_pair(p);
    std::vector<int> gt(l.gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i)
      gt[i] = l.gt[i] / 1000 == config.metrics.ignore_class ? metrics::kIgnore : l.gt[i];
    const metrics::InstanceScores s = metrics::instance_miou(gt, l.pred, {}, config.metrics.matching);
    if (!s.per_instance.empty()) {
      miou_sum += s.miou;
      ++scored_frames;
    }
    for (const auto& [code, iou] : s.per_instance) {
      per_instance[code].first += iou;
      ++per_instance[code].second;
    }
    if (!l.pred_conf.empty())
      for (std::size_t i = 0; i < l.pred.size(); ++i) {
        score_sum[l.pred[i]].first += l.pred_conf[i];
        ++score_sum[l.pred[i]].second;
      }
    all_gt.insert(all_gt.end(), gt.begin(), gt.end());
    all_pred.insert(all_pred.end(), l.pred.begin(), l.pred.end());
  }
  std::map<int, double> scores;
  for (const auto& [code, v] : score_sum) scores[code] = v.first / v.second;
  const metrics::ApScores ap = metrics::average_precision(all_gt, all_pred, {}, scores, config.metrics.ap);
  Json per_class = Json::object();
  for (const auto& [code, v] : per_instance) per_class[std::to_string(code)] = v.first / v.second;
  return finish(config, per_class,
                Json{{"miou", scored_frames ? miou_sum / scored_frames : 0.0},
                     {"ap", ap.ap},
                     {"ap50", ap.ap50},
                     {"ap25", ap.ap25}},
                Json{{"matching", config.metrics.matching == metrics::Matching::Greedy ? "greedy" : "optimal"},
                     {"ap_integration",
                      config.metrics.ap == metrics::ApIntegration::Interpolated101 ? "interpolated101" : "all_points"}},
                Json{{"frames", pairs.size()}, {"scored_frames", scored_frames}, {"instances", per_instance.size()}});
}

Json cmd_evaluate_completion(const PipelineConfig& config, const CompletionEvalOptions& options) {
  require_path(options.gt, "ground-truth cloud");
  require_path(options.pred, "predicted cloud");
  PointCloud gt = io::read_ply(options.gt).cloud, pred = io::read_ply(options.pred).cloud;
  for (PointCloud* c : {&gt, &pred})
    for (int& l : c->labels) l = l < 0 ? metrics::kIgnore : l / 1000;
  metrics::CompletionOptions opts;
  opts.threshold = config.metrics.completion_threshold;
  std::optional<dynamic_detect::OccupancyGrid> grid;
  if (options.observed_from_scans) {
    grid.emplace(config.detector.grid);
    for (const auto& s : manifest_scans(config)) grid->integrate_scan(s.pose.translation(), s.cloud.transformed(s.pose));
    opts.observed = &*grid;
  }
  const metrics::CompletionScores s = metrics::completion_metrics(gt, pred, opts);
  Json per_class = Json::object();
  Json mean{{"completeness", s.completeness},
            {"accuracy", s.accuracy ? Json(*s.accuracy) : Json(nullptr)},
            {"f1", s.f1 ? Json(*s.f1) : Json(nullptr)}};
  if (s.semantic) {
    for (const auto& [c, iou] : s.semantic->per_class) per_class[std::to_string(c)] = iou;
    mean["miou"] = s.semantic->miou;
  }
  return finish(config, per_class, mean,
                Json{{"threshold", opts.threshold}, {"observed_from_scans", options.observed_from_scans}},
                Json{{"gt_points", s.gt_points}, {"pred_points", s.pred_points}, {"scored_pred_points", s.scored_pred_points}});
}

Json cmd_evaluate_trajectory(const PipelineConfig& config, const TrajectoryEvalOptions& options) {
  require_path(options.gt, "ground-truth poses");
  require_path(options.est, "estimated poses");
  std::map<int, geometry::Pose> gt_map, est_map;
  for (const auto& p : io::read_poses(options.gt)) gt_map[p.frame_index().value_or(0)] = p;
  for (const auto& p : io::read_poses(options.est)) est_map[p.frame_index().value_or(0)] = p;
  std::vector<geometry::Pose> gt, est;
  for (const auto& [f, p] : gt_map)
    if (auto it = est_map.find(f); it != est_map.end()) {
      gt.push_back(p);
      est.push_back(it->second);
    }
  if (gt.empty()) throw LengthMismatch("no frame index is shared by both pose files");
  const auto align = options.similarity ? metrics::Alignment::Similarity : metrics::Alignment::Rigid;
  const metrics::TrajectoryErrors e =
      options.windowed ? metrics::windowed_ape_rpe(gt, est, config.metrics.trajectory_window, config.metrics.rpe_delta, align)
                       : metrics::ape_rpe(gt, est, config.metrics.rpe_delta, align);
  return finish(config, Json::object(),
                Json{{"ape", e.ape_mean}, {"ape_std", e.ape_std}, {"rpe", e.rpe_mean}, {"rpe_std", e.rpe_std}},
                Json{{"rpe_delta", config.metrics.rpe_delta},
                     {"windowed", options.windowed},
                     {"window", config.metrics.trajectory_window},
                     {"alignment", options.similarity ? "similarity" : "rigid"}},
                Json{{"frames", gt.size()}, {"rpe_pairs", e.rpe_pairs}});
}

}  // namespace ltr::pipeline
