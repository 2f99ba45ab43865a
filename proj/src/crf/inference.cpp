#include "ltr/crf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltr/error.hpp"

namespace ltr::crf {

std::string to_string(ConstraintMode mode) { return mode == ConstraintMode::Hard ? "hard" : "soft"; }

ConstraintMode constraint_mode_from_string(const std::string& name) {
  if (name == "hard") return ConstraintMode::Hard;
  if (name == "soft") return ConstraintMode::Soft;
  throw InvalidArgument("unknown constraint mode '" + name + "'");
}

void CrfProblem::validate() const {
  if (labels < 2) throw InvalidArgument("a CRF needs at least two labels");
  if (unary.cols() != labels || admissible.size() != static_cast<std::size_t>(unary.rows()) * labels)
    throw InvalidArgument("unary and admissibility shapes disagree");
  if (pixel_count() > unary.rows()) throw InvalidArgument("more pixels than variables");
  if (!unary.allFinite()) throw NonFiniteUnary("unary energy is not finite");
  for (int i = 0; i < size(); ++i) {
    bool any = false;
    for (int s = 0; s < labels; ++s) any = any || admissible[static_cast<std::size_t>(i) * labels + s];
    if (!any) throw InvalidArgument("variable " + std::to_string(i) + " has no admissible label");
  }
  for (const auto& m : compat)
    if (m.rows() != labels || m.cols() != labels || (m - m.transpose()).cwiseAbs().maxCoeff() > 0.0)
      throw InvalidArgument("compatibility must be a symmetric labels×labels matrix");
}

CrfProblem assemble(const PixelField& pixels, const PointField& points, const Unaries& unaries,
                    const FrameWeights& weights) {
  pixels.validate();
  points.validate();
  if (pixels.labels != weights.labels || points.labels != weights.labels)
    throw InvalidArgument("fields and weights disagree on the label count");
  CrfProblem p;
  p.labels = weights.labels;
  p.width = pixels.width;
  p.height = pixels.height;
  const int np = pixels.size();
  const int nm = points.size();
  p.unary.resize(np + nm, p.labels);
  p.unary.topRows(np) = unaries.pixel;
  p.unary.bottomRows(nm) = unaries.point;
  p.admissible = pixels.admissible;
  p.admissible.insert(p.admissible.end(), points.admissible.begin(), points.admissible.end());
  p.kernels = kernel_features(pixels, points, weights.widths);
  for (int k = 0; k < kKernelCount; ++k) p.compat[k] = weights.compat[k].matrix;
  p.validate();
  return p;
}

FilterSet make_filters(const CrfProblem& problem, FilterMode mode, const LatticeParams& lattice) {
  FilterSet f;
  for (int k = 0; k < kKernelCount; ++k) f[k] = make_filter(problem.kernels[k], mode, lattice);
  return f;
}

Matrix masked_softmax(const Matrix& logits, const std::vector<std::uint8_t>* mask) {
  const int s = static_cast<int>(logits.cols());
  Matrix q(logits.rows(), s);
  for (int i = 0; i < logits.rows(); ++i) {
    const std::uint8_t* m = mask ? &(*mask)[static_cast<std::size_t>(i) * s] : nullptr;
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < s; ++k)
      if (!m || m[k]) mx = std::max(mx, logits(i, k));
    double z = 0.0;
    for (int k = 0; k < s; ++k) {
      q(i, k) = (!m || m[k]) ? std::exp(logits(i, k) - mx) : 0.0;
      z += q(i, k);
    }
    q.row(i) /= z;
  }
  return q;
}

Matrix pairwise_messages(const CrfProblem& problem, const FilterSet& filters, const Matrix& q,
                         std::array<Matrix, kKernelCount>* filtered) {
  Matrix m = Matrix::Zero(q.rows(), q.cols());
  Matrix a;
  for (int k = 0; k < kKernelCount; ++k) {
    filters[k]->apply(q, a);
    m.noalias() += a * problem.compat[k];
    if (filtered) (*filtered)[k] = a;
  }
  return m;
}

MarginalField mean_field_infer(const CrfProblem& problem, const InferenceOptions& options) {
  if (options.iterations < 1) throw InvalidArgument("iterations must be >= 1");
  problem.validate();
  const FilterSet filters = make_filters(problem, options.filter, options.lattice);
  const auto* update_mask = options.constraints == ConstraintMode::Hard ? &problem.admissible : nullptr;
  MarginalField out{problem.width, problem.height, masked_softmax(-problem.unary, &problem.admissible)};
  for (int it = 0; it < options.iterations; ++it)
    out.q = masked_softmax(-problem.unary - pairwise_messages(problem, filters, out.q), update_mask);
  return out;
}

MarginalField mean_field_infer(const PixelField& pixels, const PointField& points, const Unaries& unaries,
                               const FrameWeights& weights, const InferenceOptions& options) {
  return mean_field_infer(assemble(pixels, points, unaries, weights), options);
}

namespace {

// For each variable, its (kernel, member) memberships.
std::vector<std::vector<std::pair<int, int>>> memberships(const CrfProblem& p) {
  std::vector<std::vector<std::pair<int, int>>> m(p.size());
  for (int k = 0; k < kKernelCount; ++k)
    for (int a = 0; a < p.kernels[k].size(); ++a) m[p.kernels[k].variables[a]].emplace_back(k, a);
  return m;
}

}  // namespace

MarginalField mean_field_sequential(const CrfProblem& problem, int sweeps, ConstraintMode constraints,
                                    const std::function<void(const Matrix&)>& on_update) {
  if (sweeps < 1) throw InvalidArgument("sweeps must be >= 1");
  problem.validate();
  const int s = problem.labels;
  const auto member = memberships(problem);
  MarginalField out{problem.width, problem.height, masked_softmax(-problem.unary, &problem.admissible)};
  Eigen::RowVectorXd msg(s);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int i = 0; i < problem.size(); ++i) {
      msg.setZero();
      for (auto [k, a] : member[i]) {
        const KernelFeatures& kf = problem.kernels[k];
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(s);
        for (int b = 0; b < kf.size(); ++b)
          if (kf.couples(a, b)) acc += kf.value(a, b) * out.q.row(kf.variables[b]);
        msg += acc * problem.compat[k];
      }
      Matrix logits = -(problem.unary.row(i) + msg);
      std::vector<std::uint8_t> mask(problem.admissible.begin() + static_cast<std::ptrdiff_t>(i) * s,
                                     problem.admissible.begin() + static_cast<std::ptrdiff_t>(i + 1) * s);
      out.q.row(i) = masked_softmax(logits, constraints == ConstraintMode::Hard ? &mask : nullptr);
      if (on_update) on_update(out.q);
    }
  }
  return out;
}

double compute_energy(const CrfProblem& problem, const std::vector<int>& labeling) {
  if (static_cast<int>(labeling.size()) != problem.size()) throw InvalidArgument("labeling size mismatch");
  double e = 0.0;
  for (int i = 0; i < problem.size(); ++i) e += problem.unary(i, labeling[i]);
  for (int k = 0; k < kKernelCount; ++k) {
    const KernelFeatures& kf = problem.kernels[k];
    for (int a = 0; a < kf.size(); ++a)
      for (int b = a + 1; b < kf.size(); ++b)
        if (kf.couples(a, b))
          e += problem.compat[k](labeling[kf.variables[a]], labeling[kf.variables[b]]) * kf.value(a, b);
  }
  return e;
}

double free_energy(const CrfProblem& problem, const Matrix& q) {
  double f = (q.array() * problem.unary.array()).sum();
  for (int k = 0; k < kKernelCount; ++k) {
    const KernelFeatures& kf = problem.kernels[k];
    for (int a = 0; a < kf.size(); ++a)
      for (int b = a + 1; b < kf.size(); ++b)
        if (kf.couples(a, b))
          f += kf.value(a, b) * (q.row(kf.variables[a]) * problem.compat[k] * q.row(kf.variables[b]).transpose())(0, 0);
  }
  for (int i = 0; i < q.rows(); ++i)
    for (int s = 0; s < q.cols(); ++s)
      if (q(i, s) > 0.0) f += q(i, s) * std::log(q(i, s));
  return f;
}

}  // namespace ltr::crf
