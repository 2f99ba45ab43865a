#include "ltr/pipeline/config.hpp"

#include <filesystem>

#include "ltr/error.hpp"

namespace ltr::pipeline {

namespace fs = std::filesystem;
using io::Json;

namespace {

template <class T>
void get(const Json& j, const char* key, T& value) {
  if (!j.is_object()) throw ConfigError("expected an object around '" + std::string(key) + "'");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    value = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("'") + key + "' has the wrong type");
  }
}

const Json& section(const Json& j, const char* key) {
  static const Json empty = Json::object();
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_object()) throw ConfigError(std::string("section '") + key + "' must be an object");
  return *it;
}

template <class T>
void put(Json& j, const char* key, const T& value, const char* comment) {
  j[std::string("_") + key] = comment;
  j[key] = value;
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

template <class F>
auto parse_enum(const std::string& name, const char* what, F&& f) {
  try {
    return f(name);
  } catch (const Error&) {
    throw ConfigError(std::string("invalid ") + what + " '" + name + "'");
  }
}

metrics::Matching matching_from_string(const std::string& s) {
  if (s == "greedy") return metrics::Matching::Greedy;
  if (s == "optimal") return metrics::Matching::Optimal;
  throw ConfigError("matching must be greedy or optimal");
}

metrics::ApIntegration ap_from_string(const std::string& s) {
  if (s == "interpolated101") return metrics::ApIntegration::Interpolated101;
  if (s == "all_points") return metrics::ApIntegration::AllPoints;
  throw ConfigError("ap_integration must be interpolated101 or all_points");
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

crf::InferenceOptions PipelineConfig::default_inference() {
  crf::InferenceOptions o;
  o.lattice.spacing = 0.5;
  o.lattice.cutoff = 4.0;
  return o;
}

void PipelineConfig::validate() const {
  try {
    classes.validate();
    camera.validate();
    widths.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  check(inference.iterations >= 1, "crf.iterations must be >= 1");
  check(inference.lattice.spacing > 0.0 && inference.lattice.cutoff > 0.0, "lattice spacing and cutoff must be > 0");
  check(visibility_splat_px >= 0.0 && visibility_slack >= 0.0, "visibility parameters must be >= 0");
  check(dedup_radius >= 0.0, "accumulation.dedup_radius must be >= 0");
  check(normal_neighbors >= 3, "accumulation.normal_neighbors must be >= 3");
  check(detector.grid.voxel_size > 0.0, "occupancy.voxel_size must be > 0");
  check(detector.grid.p_min < 0.0 && detector.grid.p_max > 0.0, "occupancy clamps must bracket 0");
  check(detector.grid.l_occ > 0.0 && detector.grid.l_free < 0.0, "occupancy increments have the wrong sign");
  check(detector.prob_threshold >= 0.0 && detector.prob_threshold <= 1.0, "detection.prob_threshold must be in [0, 1]");
  check(detector.growing.angle_threshold_deg > 0.0, "detection.angle_threshold_deg must be > 0");
  check(detector.growing.neighbor_radius > 0.0, "detection.neighbor_radius must be > 0");
  check(template_voxel > 0.0, "trajectory.voxel_size must be > 0");
  check(search.window >= 0.0 && search.step > 0.0, "trajectory search window/step invalid");
  check(training.batch_size >= 1, "learning.batch_size must be >= 1");
  check(training.epochs >= 1 || training.steps >= 1, "learning needs epochs or steps");
  check(training.lambda >= 0.0, "learning.lambda must be >= 0");
  check(training.objective.iterations >= 1, "learning.iterations must be >= 1");
  check(training.optimizer.rho > 0.0 && training.optimizer.rho < 1.0, "learning.rho must be in (0, 1)");
  check(training.optimizer.epsilon > 0.0, "learning.epsilon must be > 0");
  check(metrics.completion_threshold > 0.0, "metrics.completion_threshold must be > 0");
  check(metrics.trajectory_window >= 3, "metrics.trajectory_window must be >= 3");
  check(metrics.rpe_delta > 0.0, "metrics.rpe_delta must be > 0");
  check(threads >= 0, "threads must be >= 0");
}

void require_path(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path not set");
  if (!fs::exists(path)) throw ConfigError(what + " not found: " + path);
}

PipelineConfig load_config(const std::string& path) {
  const Json j = io::read_json(path);
  return config_from_json(j, fs::path(path).parent_path().string());
}

PipelineConfig config_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  const Json& paths = section(j, "paths");
  get(paths, "frames", c.paths.frames);
  get(paths, "primitives", c.paths.primitives);
  get(paths, "weights", c.paths.weights);
  get(paths, "cloud", c.paths.cloud);
  get(paths, "poses", c.paths.poses);
  get(paths, "output", c.paths.output);
  for (std::string* p : {&c.paths.frames, &c.paths.primitives, &c.paths.weights, &c.paths.cloud, &c.paths.poses,
                         &c.paths.output})
    *p = resolve(base_dir, *p);

  std::string mode = crf::to_string(c.mode);
  get(j, "mode", mode);
  c.mode = parse_enum(mode, "mode", crf::label_mode_from_string);
  get(j, "threads", c.threads);
  get(j, "seed", c.seed);

  const Json& classes = section(j, "classes");
  if (classes.contains("list")) {
    int sky = c.classes.sky_id;
    get(classes, "sky_id", sky);
    try {
      c.classes = io::classes_from_json(classes["list"], sky);
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
  } else {
    get(classes, "sky_id", c.classes.sky_id);
  }

  const Json& cam = section(j, "camera");
  get(cam, "fx", c.camera.fx);
  get(cam, "fy", c.camera.fy);
  get(cam, "cx", c.camera.cx);
  get(cam, "cy", c.camera.cy);
  get(cam, "width", c.camera.width);
  get(cam, "height", c.camera.height);

  const Json& crf = section(j, "crf");
  get(crf, "iterations", c.inference.iterations);
  std::string filter = crf::to_string(c.inference.filter), constraints = crf::to_string(c.inference.constraints);
  get(crf, "filter", filter);
  get(crf, "constraints", constraints);
  c.inference.filter = parse_enum(filter, "filter", crf::filter_mode_from_string);
  c.inference.constraints = parse_enum(constraints, "constraints", crf::constraint_mode_from_string);
  const Json& lattice = section(crf, "lattice");
  get(lattice, "spacing", c.inference.lattice.spacing);
  get(lattice, "cutoff", c.inference.lattice.cutoff);
  if (crf.contains("widths")) {
    try {
      c.widths = io::widths_from_json(crf["widths"]);
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
  }

  const Json& vis = section(j, "visibility");
  get(vis, "splat_radius_px", c.visibility_splat_px);
  get(vis, "slack", c.visibility_slack);

  const Json& acc = section(j, "accumulation");
  get(acc, "dedup_radius", c.dedup_radius);
  get(acc, "normal_neighbors", c.normal_neighbors);
  c.detector.dedup_radius = c.dedup_radius;
  c.detector.normal_neighbors = c.normal_neighbors;

  const Json& occ = section(j, "occupancy");
  auto& g = c.detector.grid;
  get(occ, "voxel_size", g.voxel_size);
  std::array<double, 3> origin{g.origin.x(), g.origin.y(), g.origin.z()};
  get(occ, "origin", origin);
  g.origin = geometry::Vec3(origin[0], origin[1], origin[2]);
  get(occ, "l_occ", g.l_occ);
  get(occ, "l_free", g.l_free);
  get(occ, "p_min", g.p_min);
  get(occ, "p_max", g.p_max);

  const Json& det = section(j, "detection");
  get(det, "angle_threshold_deg", c.detector.growing.angle_threshold_deg);
  get(det, "curvature_threshold", c.detector.growing.curvature_threshold);
  get(det, "min_cluster", c.detector.growing.min_cluster);
  get(det, "neighbor_radius", c.detector.growing.neighbor_radius);
  get(det, "prob_threshold", c.detector.prob_threshold);
  if (det.contains("free_threshold") && !det["free_threshold"].is_null()) {
    double f = 0.0;
    get(det, "free_threshold", f);
    c.detector.free_threshold = f;
  }

  const Json& traj = section(j, "trajectory");
  get(traj, "voxel_size", c.template_voxel);
  get(traj, "window", c.search.window);
  get(traj, "step", c.search.step);

  const Json& learn = section(j, "learning");
  auto& t = c.training;
  get(learn, "batch_size", t.batch_size);
  get(learn, "epochs", t.epochs);
  get(learn, "steps", t.steps);
  get(learn, "lambda", t.lambda);
  get(learn, "whiten", t.whiten);
  get(learn, "iterations", t.objective.iterations);
  std::string lfilter = crf::to_string(t.objective.filter), lconstraints = crf::to_string(t.objective.constraints);
  get(learn, "filter", lfilter);
  get(learn, "constraints", lconstraints);
  t.objective.filter = parse_enum(lfilter, "learning.filter", crf::filter_mode_from_string);
  t.objective.constraints = parse_enum(lconstraints, "learning.constraints", crf::constraint_mode_from_string);
  get(learn, "rho", t.optimizer.rho);
  get(learn, "epsilon", t.optimizer.epsilon);
  get(learn, "cross_validate", c.cross_validate);

  const Json& met = section(j, "metrics");
  get(met, "completion_threshold", c.metrics.completion_threshold);
  std::string matching = c.metrics.matching == metrics::Matching::Greedy ? "greedy" : "optimal";
  std::string ap = c.metrics.ap == metrics::ApIntegration::Interpolated101 ? "interpolated101" : "all_points";
  get(met, "matching", matching);
  get(met, "ap_integration", ap);
  c.metrics.matching = matching_from_string(matching);
  c.metrics.ap = ap_from_string(ap);
  get(met, "trajectory_window", c.metrics.trajectory_window);
  get(met, "rpe_delta", c.metrics.rpe_delta);
  get(met, "ignore_class", c.metrics.ignore_class);

  c.training.seed = c.seed;
  c.training.objective.threads = c.threads;
  c.validate();
  return c;
}

Json config_to_json(const PipelineConfig& c) {
  Json j = Json::object();
  j["_about"] = "Label transfer pipeline configuration. Keys starting with '_' are comments.";

  Json paths = Json::object();
  put(paths, "frames", c.paths.frames, "frame manifest: [{name, timestamp, frame, pose{t,q}, image, probabilities, scan, scan_pose, ground_truth}]");
  put(paths, "primitives", c.paths.primitives, "bounding primitive list");
  put(paths, "weights", c.paths.weights, "model weights written by train-weights");
  put(paths, "cloud", c.paths.cloud, "optional static world cloud (PLY); accumulated from the scans when empty");
  put(paths, "poses", c.paths.poses, "optional camera-to-world pose file indexed by frame; manifest poses take precedence");
  put(paths, "output", c.paths.output, "output directory");
  put(j, "paths", paths, "relative paths resolve against this file's directory");

  put(j, "mode", crf::to_string(c.mode), "semantic | instance");
  put(j, "threads", c.threads, "worker threads over frames; 0 = hardware concurrency");
  put(j, "seed", c.seed, "seed for every random choice (batch sampling)");

  Json classes = Json::object();
  put(classes, "sky_id", c.classes.sky_id, "semantic id of sky; required in the list");
  put(classes, "list", io::classes_to_json(c.classes), "label-map class ids; weights are indexed in this order");
  put(j, "classes", classes, "semantic classes");

  Json cam = Json::object();
  put(cam, "fx", c.camera.fx, "focal length x, pixels");
  put(cam, "fy", c.camera.fy, "focal length y, pixels");
  put(cam, "cx", c.camera.cx, "principal point x, pixels");
  put(cam, "cy", c.camera.cy, "principal point y, pixels");
  put(cam, "width", c.camera.width, "image width");
  put(cam, "height", c.camera.height, "image height");
  put(j, "camera", cam, "pinhole intrinsics shared by all frames");

  Json crf = Json::object();
  put(crf, "iterations", c.inference.iterations, "mean-field iterations, >= 1");
  put(crf, "filter", crf::to_string(c.inference.filter), "exact | lattice");
  put(crf, "constraints", crf::to_string(c.inference.constraints), "hard: inadmissible labels stay at zero mass; soft: masked at initialization only");
  Json lattice = Json::object();
  put(lattice, "spacing", c.inference.lattice.spacing, "vertex spacing in kernel-width units, > 0");
  put(lattice, "cutoff", c.inference.lattice.cutoff, "blur radius in kernel-width units, > 0");
  put(crf, "lattice", lattice, "permutohedral lattice");
  Json widths = io::widths_to_json(c.widths);
  widths["_smooth_position"] = "pixel smoothness kernel, pixels";
  widths["_appearance_position"] = "appearance kernel position, pixels";
  widths["_appearance_color"] = "appearance kernel color, 0-255 units";
  widths["_point_position"] = "3D kernel position, meters";
  widths["_point_normal"] = "3D kernel normal z-component";
  widths["_cross_position"] = "pixel-point kernel, pixels";
  put(crf, "widths", widths, "Gaussian kernel widths (fixed, override the weights file)");
  put(j, "crf", crf, "CRF inference");

  Json vis = Json::object();
  put(vis, "splat_radius_px", c.visibility_splat_px, "depth-buffer splat radius, pixels");
  put(vis, "slack", c.visibility_slack, "relative depth slack");
  put(j, "visibility", vis, "point visibility test");

  Json acc = Json::object();
  put(acc, "dedup_radius", c.dedup_radius, "meters; first observation wins");
  put(acc, "normal_neighbors", c.normal_neighbors, "k for PCA normals, >= 3");
  put(j, "accumulation", acc, "scan accumulation");

  Json occ = Json::object();
  const auto& g = c.detector.grid;
  put(occ, "voxel_size", g.voxel_size, "meters");
  put(occ, "origin", std::array<double, 3>{g.origin.x(), g.origin.y(), g.origin.z()}, "grid origin");
  put(occ, "l_occ", g.l_occ, "log-odds hit increment");
  put(occ, "l_free", g.l_free, "log-odds miss increment");
  put(occ, "p_min", g.p_min, "lower clamp (absorbing)");
  put(occ, "p_max", g.p_max, "upper clamp");
  put(j, "occupancy", occ, "occupancy grid");

  Json det = Json::object();
  put(det, "angle_threshold_deg", c.detector.growing.angle_threshold_deg, "region growing normal angle");
  put(det, "curvature_threshold", c.detector.growing.curvature_threshold, "region growing seed curvature");
  put(det, "min_cluster", c.detector.growing.min_cluster, "smallest kept cluster");
  put(det, "neighbor_radius", c.detector.growing.neighbor_radius, "meters");
  put(det, "prob_threshold", c.detector.prob_threshold, "cluster is dynamic when its free fraction exceeds this");
  put(det, "free_threshold", c.detector.free_threshold ? Json(*c.detector.free_threshold) : Json(nullptr),
      "log-odds at or below which a voxel is free; null = p_min");
  put(j, "detection", det, "dynamic object detection");

  Json traj = Json::object();
  put(traj, "voxel_size", c.template_voxel, "occupancy template voxel, meters");
  put(traj, "window", c.search.window, "search window along the spline, meters");
  put(traj, "step", c.search.step, "search step, meters");
  put(j, "trajectory", traj, "dynamic object trajectory fitting");

  Json learn = Json::object();
  const auto& t = c.training;
  put(learn, "batch_size", t.batch_size, "frames per step");
  put(learn, "epochs", t.epochs, "used when steps is 0");
  put(learn, "steps", t.steps, "optimizer steps; 0 = epochs * ceil(frames / batch_size)");
  put(learn, "lambda", t.lambda, "L2 regularizer");
  put(learn, "whiten", t.whiten, "standardize unary feature channels");
  put(learn, "iterations", t.objective.iterations, "unrolled mean-field iterations");
  put(learn, "filter", crf::to_string(t.objective.filter), "exact | lattice");
  put(learn, "constraints", crf::to_string(t.objective.constraints), "hard | soft");
  put(learn, "rho", t.optimizer.rho, "ADADELTA decay");
  put(learn, "epsilon", t.optimizer.epsilon, "ADADELTA conditioner");
  put(learn, "cross_validate", c.cross_validate, "pick lambda from 1e-4..1e2 by 3-fold validation");
  put(j, "learning", learn, "weight estimation");

  Json met = Json::object();
  put(met, "completion_threshold", c.metrics.completion_threshold, "meters");
  put(met, "matching", c.metrics.matching == metrics::Matching::Greedy ? "greedy" : "optimal", "greedy | optimal");
  put(met, "ap_integration", c.metrics.ap == metrics::ApIntegration::Interpolated101 ? "interpolated101" : "all_points",
      "interpolated101 | all_points");
  put(met, "trajectory_window", c.metrics.trajectory_window, "frames per local window");
  put(met, "rpe_delta", c.metrics.rpe_delta, "meters");
  put(met, "ignore_class", c.metrics.ignore_class, "ground-truth semantic id left out of scoring");
  put(j, "metrics", met, "evaluation");
  return j;
}

crf::ModelWeights load_model_weights(const PipelineConfig& config) {
  require_path(config.paths.weights, "weights");
  crf::ModelWeights w = io::read_weights(config.paths.weights);
  w.widths = config.widths;
  return w;
}

}  // namespace ltr::pipeline
