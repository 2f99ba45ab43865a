#include "ltr/learning/train.hpp"

#include <cmath>
#include <random>

#include "ltr/error.hpp"

namespace ltr::learning {

crf::Whitening compute_whitening(const std::vector<TrainingSample>& samples) {
  if (samples.empty()) throw InvalidArgument("whitening needs at least one sample");
  std::vector<crf::UnaryFeatures> raw;
  raw.reserve(samples.size());
  for (const auto& s : samples) raw.push_back(crf::unary_features(s.pixels, s.points, crf::Whitening{}));

  auto channel = [](const crf::UnaryFeatures& f, int c) -> const crf::Matrix& {
    return c == 0 ? f.pixel_constraint : c == 1 ? f.pixel_nll : f.point_constraint;
  };
  crf::Whitening w;
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0, count = 0.0;
    for (const auto& f : raw) {
      sum += channel(f, c).sum();
      count += static_cast<double>(channel(f, c).size());
    }
    if (count == 0.0) continue;
    const double mean = sum / count;
    double sq = 0.0;
    for (const auto& f : raw) sq += (channel(f, c).array() - mean).square().sum();
    const double sd = std::sqrt(sq / count);
    w.mean[c] = mean;
    w.stddev[c] = sd > 1e-12 ? sd : 1.0;
  }
  return w;
}

crf::ModelWeights train(const std::vector<TrainingSample>& samples, const crf::ModelWeights& initial,
                        const TrainOptions& options, const std::function<void(const TrainStep&)>& on_step) {
  if (samples.empty()) throw InvalidArgument("training needs at least one sample");
  if (options.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  crf::ModelWeights w = initial;
  w.lambda = options.lambda;
  if (options.whiten) w.whitening = compute_whitening(samples);
  w.validate();

  const int n = static_cast<int>(samples.size());
  const int steps =
      options.steps > 0 ? options.steps : options.epochs * ((n + options.batch_size - 1) / options.batch_size);
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  OptimizerState state = options.optimizer;
  Eigen::VectorXd theta = w.parameters();
  std::vector<TrainingSample> batch(options.batch_size);
  for (int step = 0; step < steps; ++step) {
    for (auto& b : batch) b = samples[pick(rng)];
    const Evaluation e = evaluate(w, batch, options.objective);
    adadelta_step(state, theta, e.gradient);
    w.set_parameters(theta);
    if (on_step) on_step({step, e.loss});
  }
  return w;
}

std::vector<double> default_lambda_grid() { return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2}; }

std::vector<LambdaScore> cross_validate_lambda(const std::vector<TrainingSample>& samples,
                                               const crf::ModelWeights& initial, const TrainOptions& options,
                                               const std::vector<double>& grid, int folds) {
  const int n = static_cast<int>(samples.size());
  if (folds < 2 || folds > n) throw InvalidArgument("folds must be in [2, sample count]");
  std::vector<LambdaScore> scores;
  for (double lambda : grid) {
    LambdaScore score{lambda, 0.0};
    for (int k = 0; k < folds; ++k) {
      std::vector<TrainingSample> fit, held;
      for (int i = 0; i < n; ++i) (i % folds == k ? held : fit).push_back(samples[i]);
      TrainOptions o = options;
      o.lambda = lambda;
      crf::ModelWeights w = train(fit, initial, o);
      w.lambda = 0.0;
      score.validation_loss += loss(w, held, options.objective);
    }
    scores.push_back(score);
  }
  return scores;
}

}  // namespace ltr::learning
