#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace ltr::metrics {

inline constexpr int kIgnore = -1;

/// Confidence mass per (gt, pred) pair.
class WeightedConfusion {
 public:
  void add(int gt, int pred, double weight);

  /// Pixels whose gt equals `ignore` are skipped. `conf` may be empty
  /// (unit weights). Throws ShapeMismatch; InvalidArgument for conf outside [0, 1].
  static WeightedConfusion from_maps(std::span<const int> gt, std::span<const int> pred,
                                     std::span<const double> conf, int ignore = kIgnore);

  double mass(int gt, int pred) const;
  /// Σ TP / Σ (TP ∪ FP ∪ FN); nullopt when the union has no mass.
  std::optional<double> iou(int c) const;
  double gt_mass(int c) const;
  double total() const { return total_; }
  double correct() const { return correct_; }
  /// Classes with positive gt mass, ascending.
  std::vector<int> gt_classes() const;

 private:
  std::map<std::pair<int, int>, double> cells_;
  std::map<int, double> gt_mass_, pred_mass_;
  double total_ = 0.0;
  double correct_ = 0.0;
};

std::optional<double> weighted_iou(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                                   int c);

struct SemanticScores {
  std::map<int, double> per_class;  // classes present in gt
  double miou = 0.0;
  double accuracy = 0.0;
  double weight = 0.0;  // total confidence mass evaluated
};

/// Per-class weighted IoU over the classes present in gt (restricted to
/// `classes` when non-empty), their unweighted mean, and Σ_correct c / Σ c.
SemanticScores evaluate_semantic(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                                 std::span<const int> classes = {}, int ignore = kIgnore);
SemanticScores evaluate_semantic(const WeightedConfusion& confusion, std::span<const int> classes = {});

double miou(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
            std::span<const int> classes = {});
double pixel_accuracy(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf);

/// Keeps the ⌈density·P⌉ non-ignored pixels of highest `confidence` (ties
/// to the lower index) and evaluates them with unit weights.
SemanticScores confidence_filtered_eval(std::span<const int> gt, std::span<const int> pred,
                                        std::span<const double> confidence, double density,
                                        std::span<const int> classes = {}, int ignore = kIgnore);

}  // namespace ltr::metrics
