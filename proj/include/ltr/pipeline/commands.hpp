#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltr/io/json_io.hpp"
#include "ltr/pipeline/config.hpp"

namespace ltr::pipeline {

// Thin wrappers behind the CLI subcommands. Each writes its outputs into
// paths.output and returns the JSON report it wrote as report.json.

/// Static accumulation of the manifest's scans (dynamic primitives excluded
/// when a primitive file is configured) into accumulated.ply.
io::Json cmd_accumulate(const PipelineConfig& config);

/// Occupancy-based dynamic detection; dynamic.ply carries per-point
/// `dynamic` and `cluster` properties.
io::Json cmd_detect_dynamic(const PipelineConfig& config);

/// Fits the trajectory of every dynamic primitive (or only `primitive_id`)
/// from its annotated keyframes; writes trajectory.json and
/// primitives_fitted.json with the recovered poses.
io::Json cmd_fit_trajectory(const PipelineConfig& config, std::optional<int> primitive_id = std::nullopt);

/// Trains weights on the manifest frames that carry a ground-truth label
/// map; starts from paths.weights when set. Writes weights.json.
io::Json cmd_train(const PipelineConfig& config);

struct SemanticEvalOptions {
  std::string gt;              // label PNG or directory of them
  std::string pred;            // label PNG or directory with <stem>_label.png
  bool gt_confidence = false;  // weight pixels by <stem>_conf.png next to the gt
  double density = 1.0;        // < 1 keeps the most confident predictions
};

/// Pairs files by stem; a gt stem S matches S_label.png or S.png in the
/// prediction directory, and S_conf.png supplies confidences.
io::Json cmd_evaluate_semantic(const PipelineConfig& config, const SemanticEvalOptions& options);

struct InstanceEvalOptions {
  std::string gt;
  std::string pred;
};

/// Per-frame instance mIoU (averaged over frames) and AP over all frames;
/// an instance's score is its mean predicted confidence when available.
io::Json cmd_evaluate_instance(const PipelineConfig& config, const InstanceEvalOptions& options);

struct CompletionEvalOptions {
  std::string gt;    // PLY
  std::string pred;  // PLY
  bool observed_from_scans = false;  // score predictions only where the manifest scans observed
};

io::Json cmd_evaluate_completion(const PipelineConfig& config, const CompletionEvalOptions& options);

struct TrajectoryEvalOptions {
  std::string gt;    // pose file
  std::string est;   // pose file
  bool windowed = false;
  bool similarity = false;
};

/// Poses are paired by frame index.
io::Json cmd_evaluate_trajectory(const PipelineConfig& config, const TrajectoryEvalOptions& options);

}  // namespace ltr::pipeline
