#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ltr/metrics/semantic.hpp"

namespace ltr::metrics {

/// Instance maps hold semantic_class·1000 + instance_id per pixel; id 0
/// marks stuff. Only segments with a nonzero id are instances.
inline int semantic_of(int code) { return code / 1000; }
inline int instance_of(int code) { return code % 1000; }
inline bool is_instance(int code) { return code >= 0 && instance_of(code) != 0; }

enum class Matching { Greedy, Optimal };

struct InstanceMatchResult {
  std::map<int, int> assignment;  // gt code -> pred code
  std::map<std::pair<int, int>, double> pair_iou;  // weighted IoU of every overlapping same-class pair
};

/// One-to-one matching of same-class instances. Greedy takes pairs by
/// descending IoU (ties to the lower gt, then pred code); Optimal maximizes
/// the summed IoU. Pairs with zero IoU are never matched.
InstanceMatchResult match_instances(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                                    Matching matching = Matching::Greedy);

struct InstanceScores {
  std::map<int, double> per_instance;  // gt code -> weighted IoU after relabeling
  double miou = 0.0;
  InstanceMatchResult match;
};

/// Predictions are relabeled through the matching; each gt instance then
/// scores its weighted IoU. Unmatched predictions count as false positives.
InstanceScores instance_miou(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                             Matching matching = Matching::Greedy);

enum class ApIntegration { Interpolated101, AllPoints };

struct ApScores {
  double ap = 0.0;  // mean over IoU thresholds 0.5:0.05:0.95
  double ap50 = 0.0;
  double ap25 = 0.0;
  std::map<double, double> per_threshold;
};

/// Per class and threshold, predictions in descending score (ties to the
/// lower code) claim the best-overlapping unmatched gt instance when its
/// IoU reaches the threshold. AP is averaged over classes with gt instances.
/// Predicted instances without an entry in `scores` get score 1.
ApScores average_precision(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                           const std::map<int, double>& scores,
                           ApIntegration integration = ApIntegration::Interpolated101);

/// Area under one precision/recall curve.
double integrate_pr(const std::vector<double>& precision, const std::vector<double>& recall,
                    ApIntegration integration);

}  // namespace ltr::metrics
