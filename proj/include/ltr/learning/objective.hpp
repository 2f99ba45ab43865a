#pragma once

#include <vector>

#include "ltr/crf/inference.hpp"

namespace ltr::learning {

inline constexpr int kIgnoreLabel = -1;
inline constexpr double kLossFloor = 1e-12;

/// One training frame. `ground_truth` holds a label index of `labels` per
/// pixel, or kIgnoreLabel.
struct TrainingSample {
  crf::LabelSpace labels;
  crf::PixelField pixels;
  crf::PointField points;
  std::vector<int> ground_truth;

  /// Throws InvalidArgument on shape mismatches or out-of-range labels.
  void validate() const;
};

struct ObjectiveOptions {
  int iterations = 5;
  crf::FilterMode filter = crf::FilterMode::Exact;
  crf::LatticeParams lattice;
  crf::ConstraintMode constraints = crf::ConstraintMode::Hard;
  int threads = 1;
};

struct Evaluation {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // in ModelWeights::parameters() order
};

/// Σ_n Σ_i -log max(Q_{n,i}(s*), 1e-12) + λ‖Θ‖², Q after `iterations`
/// synchronous mean-field updates.
double loss(const crf::ModelWeights& w, const std::vector<TrainingSample>& batch,
            const ObjectiveOptions& options = {});

/// Data term of a single sample (no regularizer).
double sample_loss(const crf::ModelWeights& w, const TrainingSample& sample, const ObjectiveOptions& options = {});

/// Loss and its gradient by reverse-mode differentiation through the
/// unrolled mean-field iterations.
Evaluation evaluate(const crf::ModelWeights& w, const std::vector<TrainingSample>& batch,
                    const ObjectiveOptions& options = {});

/// Central differences with step 1e-6·(1+|θ|).
Eigen::VectorXd finite_difference_gradient(const crf::ModelWeights& w, const std::vector<TrainingSample>& batch,
                                           const ObjectiveOptions& options = {});

}  // namespace ltr::learning
