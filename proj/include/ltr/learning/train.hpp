#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ltr/learning/adadelta.hpp"
#include "ltr/learning/objective.hpp"

namespace ltr::learning {

struct TrainOptions {
  int batch_size = 16;
  int epochs = 30;
  int steps = 0;  // optimizer steps; 0 = epochs · ceil(samples / batch_size)
  double lambda = 1e-3;
  bool whiten = true;
  std::uint64_t seed = 0;
  ObjectiveOptions objective;
  OptimizerState optimizer;
};

/// Mean and standard deviation of the raw unary feature channels (pixel ξ,
/// pixel -log p, point ξ) over every entry of every sample. A constant
/// channel keeps stddev 1.
crf::Whitening compute_whitening(const std::vector<TrainingSample>& samples);

struct TrainStep {
  int step = 0;
  double batch_loss = 0.0;
};

/// ADADELTA on batches drawn uniformly with replacement. Whitening (when
/// enabled) is computed once up front and stored in the returned weights.
crf::ModelWeights train(const std::vector<TrainingSample>& samples, const crf::ModelWeights& initial,
                        const TrainOptions& options, const std::function<void(const TrainStep&)>& on_step = {});

struct LambdaScore {
  double lambda = 0.0;
  double validation_loss = 0.0;  // data term summed over held-out folds
};

/// {1e-4, 1e-3, ..., 1e2}.
std::vector<double> default_lambda_grid();

/// k-fold cross-validation (sample n goes to fold n mod k). Returns one
/// score per grid value, in grid order.
std::vector<LambdaScore> cross_validate_lambda(const std::vector<TrainingSample>& samples,
                                               const crf::ModelWeights& initial, const TrainOptions& options,
                                               const std::vector<double>& grid, int folds = 3);

}  // namespace ltr::learning
