#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ltr/crf/inference.hpp"

namespace ltr::crf {

/// Argmax labels (ties to the lowest label) and entropy confidence
/// 1 - H(Q)/ln S, per pixel and per point.
struct LabelResult {
  int width = 0;
  int height = 0;
  std::vector<int> pixel_labels;
  std::vector<double> pixel_confidence;
  std::vector<int> point_labels;
  std::vector<double> point_confidence;
};

LabelResult extract_labels_confidence(const MarginalField& q);
int argmax_label(const Eigen::Ref<const Eigen::RowVectorXd>& q);
double entropy_confidence(const Eigen::Ref<const Eigen::RowVectorXd>& q);

inline constexpr int kUnknownLabel = -1;

/// Wire encoding (semantic·1000 + instance) of a primitive's label; stuff
/// classes and semantic mode use instance 0.
int encode_primitive(const geometry::BoundingPrimitive& b, LabelMode mode, const ClassSet& classes);

/// One frame's verdict on an accumulated point, with an encoded label.
struct PointVote {
  std::size_t point = 0;
  int label = 0;
  double confidence = 0.0;
};

struct FusedLabels {
  std::vector<int> labels;
  std::vector<double> confidences;
};

/// Majority vote per point (ties to the lowest label) with the mean
/// confidence of the majority votes. Points without votes take the label of
/// their enclosing primitives when those share one class (confidence 1),
/// otherwise kUnknownLabel with confidence 0.
FusedLabels fuse_point_labels(const pointcloud::PointCloud& cloud, const std::vector<PointVote>& votes,
                              const std::vector<geometry::BoundingPrimitive>& primitives, LabelMode mode,
                              const ClassSet& classes);

/// An external per-pixel instance probability map for one semantic class.
struct InstanceHypothesis {
  int semantic_class = 0;
  std::vector<double> probability;  // P
};

/// For each label, the hypothesis matched to it (or nullopt). A hypothesis
/// matches an instance label of its class when at least half of the
/// instance's real points project into its high-probability (>= 0.5)
/// region; each hypothesis goes to the instance with the largest such share.
std::vector<std::optional<int>> match_hypotheses(const std::vector<InstanceHypothesis>& hypotheses,
                                                 const PointField& points, const LabelSpace& labels, int width,
                                                 int height);

/// Instance-mode probabilities from class probabilities (P×classes, class-set
/// order): each label takes its class's mass, scaled by a matched hypothesis
/// (or by the remaining mass for unmatched instances), then rows renormalize.
std::vector<double> instance_probabilities(const std::vector<double>& class_probabilities, const LabelSpace& labels,
                                           const std::vector<InstanceHypothesis>& hypotheses,
                                           const std::vector<std::optional<int>>& matches, int pixel_count);

}  // namespace ltr::crf
