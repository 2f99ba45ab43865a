#pragma once

#include <cstdint>
#include <string>

#include "ltr/crf/inference.hpp"
#include "ltr/dynamic_detect/detector.hpp"
#include "ltr/io/json_io.hpp"
#include "ltr/learning/train.hpp"
#include "ltr/metrics/instance.hpp"
#include "ltr/metrics/trajectory_eval.hpp"
#include "ltr/trajectory/template_match.hpp"

namespace ltr::pipeline {

struct Paths {
  std::string frames;       // frame manifest (JSON)
  std::string primitives;   // primitive list (JSON)
  std::string weights;      // model weights (JSON)
  std::string cloud;        // optional pre-accumulated static cloud (PLY, world frame)
  std::string poses;        // optional camera pose file, looked up by frame index
  std::string output = "output";
};

struct MetricParams {
  double completion_threshold = 0.2;
  metrics::Matching matching = metrics::Matching::Greedy;
  metrics::ApIntegration ap = metrics::ApIntegration::Interpolated101;
  int trajectory_window = 50;
  double rpe_delta = 1.0;
  int ignore_class = 0;  // ground-truth semantic id excluded from scoring
};

struct PipelineConfig {
  Paths paths;
  crf::LabelMode mode = crf::LabelMode::Semantic;
  crf::ClassSet classes = crf::ClassSet::street_default();
  geometry::CameraIntrinsics camera{552.55, 552.55, 682.05, 238.77, 1408, 376};
  crf::KernelWidths widths;
  crf::InferenceOptions inference = default_inference();
  double visibility_splat_px = 2.0;
  double visibility_slack = 0.01;
  double dedup_radius = 0.05;
  int normal_neighbors = 10;
  dynamic_detect::DetectorParams detector;
  double template_voxel = 0.2;
  trajectory::SearchParams search;
  learning::TrainOptions training;
  bool cross_validate = false;
  MetricParams metrics;
  int threads = 1;
  std::uint64_t seed = 0;

  /// Lattice spacing coarser than the library default: pipeline frames are
  /// large and the residual approximation error is far below label noise.
  static crf::InferenceOptions default_inference();

  /// Throws ConfigError for values outside their documented ranges.
  void validate() const;
};

/// Relative paths are resolved against the config file's directory. Missing
/// keys keep their defaults; unknown keys and keys starting with '_' are ignored.
/// Throws ConfigError / IoError / FormatError.
PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json(const io::Json& j, const std::string& base_dir = "");
/// Every field with a sibling "_<key>" comment.
io::Json config_to_json(const PipelineConfig& config);

/// Throws ConfigError when `path` is empty or does not exist.
void require_path(const std::string& path, const std::string& what);

/// Config widths replace the file's widths; the widths are fixed hyperparameters.
crf::ModelWeights load_model_weights(const PipelineConfig& config);

}  // namespace ltr::pipeline
