#include "ltr/learning/objective.hpp"

#include <algorithm>
#include <cmath>

#include "ltr/error.hpp"
#include "ltr/parallel.hpp"

namespace ltr::learning {

using crf::kKernelCount;
using crf::Matrix;

void TrainingSample::validate() const {
  pixels.validate();
  points.validate();
  if (pixels.labels != labels.size() || points.labels != labels.size())
    throw InvalidArgument("training sample fields disagree with its label space");
  if (static_cast<int>(ground_truth.size()) != pixels.size())
    throw InvalidArgument("ground truth must have one entry per pixel");
  for (int s : ground_truth)
    if (s != kIgnoreLabel && (s < 0 || s >= labels.size()))
      throw InvalidArgument("ground-truth label " + std::to_string(s) + " outside the label space");
}

namespace {

struct Forward {
  crf::CrfProblem problem;
  crf::UnaryFeatures features;
  crf::FilterSet filters;
  std::vector<Matrix> q;                                  // Q_0 .. Q_T
  std::vector<std::array<Matrix, kKernelCount>> filtered;  // A_1 .. A_T
};

Forward forward(const crf::ModelWeights& w, const TrainingSample& s, const ObjectiveOptions& o) {
  if (o.iterations < 1) throw InvalidArgument("iterations must be >= 1");
  s.validate();
  Forward f;
  const crf::FrameWeights fw = crf::expand(w, s.labels);
  f.features = crf::unary_features(s.pixels, s.points, fw.whitening);
  f.problem = crf::assemble(s.pixels, s.points, crf::build_unaries(f.features, fw), fw);
  f.filters = crf::make_filters(f.problem, o.filter, o.lattice);
  const auto* mask = o.constraints == crf::ConstraintMode::Hard ? &f.problem.admissible : nullptr;
  f.q.push_back(crf::masked_softmax(-f.problem.unary, &f.problem.admissible));
  f.filtered.resize(o.iterations);
  for (int t = 0; t < o.iterations; ++t) {
    const Matrix m = crf::pairwise_messages(f.problem, f.filters, f.q.back(), &f.filtered[t]);
    f.q.push_back(crf::masked_softmax(-f.problem.unary - m, mask));
  }
  return f;
}

double data_loss(const Forward& f, const TrainingSample& s) {
  double l = 0.0;
  for (int i = 0; i < s.pixels.size(); ++i)
    if (s.ground_truth[i] != kIgnoreLabel) l -= std::log(std::max(f.q.back()(i, s.ground_truth[i]), kLossFloor));
  return l;
}

// dz = Q ⊙ (g - <Q, g>) row-wise: the softmax Jacobian applied to g.
Matrix softmax_backward(const Matrix& q, const Matrix& g) {
  const Eigen::VectorXd dot = (q.array() * g.array()).rowwise().sum();
  return (q.array() * (g.array().colwise() - dot.array())).matrix();
}

Evaluation sample_evaluation(const crf::ModelWeights& w, const TrainingSample& s, const ObjectiveOptions& o) {
  const Forward f = forward(w, s, o);
  const crf::CrfProblem& p = f.problem;
  Evaluation e;
  e.loss = data_loss(f, s);

  Matrix g = Matrix::Zero(p.size(), p.labels);
  for (int i = 0; i < s.pixels.size(); ++i) {
    const int t = s.ground_truth[i];
    if (t == kIgnoreLabel) continue;
    const double v = f.q.back()(i, t);
    if (v > kLossFloor) g(i, t) = -1.0 / v;
  }

  crf::FrameGradient fg(p.labels);
  Matrix du = Matrix::Zero(p.size(), p.labels);
  Matrix scratch;
  for (int t = o.iterations; t >= 1; --t) {
    const Matrix dz = softmax_backward(f.q[t], g);
    du -= dz;
    const Matrix dm = -dz;
    g.setZero();
    for (int k = 0; k < kKernelCount; ++k) {
      fg.compat[k] += f.filtered[t - 1][k].transpose() * dm;
      f.filters[k]->apply(dm * p.compat[k], scratch);
      g += scratch;
    }
  }
  du -= softmax_backward(f.q[0], g);

  const int np = s.pixels.size();
  const auto dpix = du.topRows(np).array();
  fg.pixel_constraint = (dpix * f.features.pixel_constraint.array()).colwise().sum().transpose();
  fg.pixel_probability = (dpix * f.features.pixel_nll.array()).colwise().sum().transpose();
  fg.point_constraint = -(du.bottomRows(p.size() - np).array() * f.features.point_constraint.array())
                             .colwise()
                             .sum()
                             .transpose();
  e.gradient = Eigen::VectorXd::Zero(w.parameter_count());
  crf::accumulate_gradient(w, s.labels, fg, e.gradient);
  return e;
}

void check_batch(const std::vector<TrainingSample>& batch) {
  if (batch.empty()) throw InvalidArgument("batch must not be empty");
}

}  // namespace

double sample_loss(const crf::ModelWeights& w, const TrainingSample& sample, const ObjectiveOptions& options) {
  return data_loss(forward(w, sample, options), sample);
}

double loss(const crf::ModelWeights& w, const std::vector<TrainingSample>& batch, const ObjectiveOptions& options) {
  check_batch(batch);
  std::vector<double> parts(batch.size());
  parallel_for(static_cast<int>(batch.size()), options.threads,
               [&](int n) { parts[n] = sample_loss(w, batch[n], options); });
  double l = w.lambda * w.parameters().squaredNorm();
  for (double v : parts) l += v;
  return l;
}

Evaluation evaluate(const crf::ModelWeights& w, const std::vector<TrainingSample>& batch,
                    const ObjectiveOptions& options) {
  check_batch(batch);
  std::vector<Evaluation> parts(batch.size());
  parallel_for(static_cast<int>(batch.size()), options.threads,
               [&](int n) { parts[n] = sample_evaluation(w, batch[n], options); });
  const Eigen::VectorXd theta = w.parameters();
  Evaluation e{w.lambda * theta.squaredNorm(), 2.0 * w.lambda * theta};
  for (const auto& part : parts) {
    e.loss += part.loss;
    e.gradient += part.gradient;
  }
  return e;
}

Eigen::VectorXd finite_difference_gradient(const crf::ModelWeights& w, const std::vector<TrainingSample>& batch,
                                           const ObjectiveOptions& options) {
  const Eigen::VectorXd theta = w.parameters();
  Eigen::VectorXd g(theta.size());
  crf::ModelWeights probe = w;
  for (int k = 0; k < theta.size(); ++k) {
    const double h = 1e-6 * (1.0 + std::abs(theta[k]));
    Eigen::VectorXd t = theta;
    t[k] = theta[k] + h;
    probe.set_parameters(t);
    const double up = loss(probe, batch, options);
    t[k] = theta[k] - h;
    probe.set_parameters(t);
    const double down = loss(probe, batch, options);
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace ltr::learning
