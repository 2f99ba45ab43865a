#pragma once

#include <map>
#include <string>
#include <vector>

#include "ltr/crf/fields.hpp"
#include "ltr/crf/labels.hpp"
#include "ltr/io/image.hpp"
#include "ltr/pipeline/scene.hpp"

namespace ltr::pipeline {

/// The CRF inputs of one frame.
struct FrameProblem {
  crf::LabelSpace labels;
  crf::PixelField pixels;
  crf::PointField points;
  std::vector<std::size_t> fused_index;  // frame cloud row -> fused cloud row
};

/// Resolves the frame's primitives, builds both fields and reads the
/// image and probability map. Throws FrameFailure for missing or
/// mismatched per-frame inputs.
FrameProblem build_frame_problem(const SceneBatch& batch, const Frame& frame, const crf::ClassSet& classes,
                                 const PipelineConfig& config);

struct FrameResult {
  int width = 0;
  int height = 0;
  std::vector<int> codes;          // semantic·1000 + instance per pixel
  std::vector<double> confidence;  // per pixel
  std::vector<crf::PointVote> votes;
};

FrameResult transfer_frame(const SceneBatch& batch, const Frame& frame, const crf::ModelWeights& weights,
                           const PipelineConfig& config);

/// Throws InvalidArgument for codes outside [0, 65535].
io::Image16 encode_label_map(const std::vector<int>& codes, int width, int height);
/// round(65535·c), c clamped to [0, 1].
io::Image16 encode_confidence_map(const std::vector<double>& confidence, int width, int height);
double decode_confidence(std::uint16_t v);

struct FrameFailureInfo {
  std::string frame;
  std::string error;
};

struct TransferSummary {
  int frames = 0;
  int processed = 0;
  std::vector<FrameFailureInfo> failures;
  std::size_t fused_points = 0;
  std::size_t unknown_points = 0;
  std::map<int, std::size_t> pixels_per_class;
  double mean_confidence = 0.0;
};

/// Writes `<name>_label.png` and `<name>_conf.png` per frame, `fused.ply`
/// (encoded labels and confidences) and `report.json` into paths.output.
/// Failed frames are recorded and skipped.
TransferSummary cmd_transfer(const PipelineConfig& config);

}  // namespace ltr::pipeline
