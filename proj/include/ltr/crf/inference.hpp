#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "ltr/crf/fields.hpp"
#include "ltr/crf/kernels.hpp"

namespace ltr::crf {

/// Hard keeps inadmissible labels at zero mass in every update; Soft only
/// masks the initialization and then lets the weighted ξ terms act.
enum class ConstraintMode { Hard, Soft };
std::string to_string(ConstraintMode mode);
ConstraintMode constraint_mode_from_string(const std::string& name);

struct InferenceOptions {
  int iterations = 10;
  FilterMode filter = FilterMode::Lattice;
  LatticeParams lattice;
  ConstraintMode constraints = ConstraintMode::Hard;
};

/// One frame's CRF: variables are the pixels (rows [0, P)) followed by the
/// points (rows [P, P+M)).
struct CrfProblem {
  int labels = 0;
  int width = 0;
  int height = 0;
  Matrix unary;                        // (P+M)×S
  std::vector<std::uint8_t> admissible;  // (P+M)×S
  std::array<KernelFeatures, kKernelCount> kernels;
  std::array<Eigen::MatrixXd, kKernelCount> compat;  // symmetric S×S

  int pixel_count() const { return width * height; }
  int size() const { return static_cast<int>(unary.rows()); }
  /// Throws NonFiniteUnary or InvalidArgument.
  void validate() const;
};

CrfProblem assemble(const PixelField& pixels, const PointField& points, const Unaries& unaries,
                    const FrameWeights& weights);

struct MarginalField {
  int width = 0;
  int height = 0;
  Matrix q;  // (P+M)×S

  int pixel_count() const { return width * height; }
  int point_count() const { return static_cast<int>(q.rows()) - pixel_count(); }
};

using FilterSet = std::array<std::unique_ptr<KernelFilter>, kKernelCount>;
FilterSet make_filters(const CrfProblem& problem, FilterMode mode, const LatticeParams& lattice = {});

/// Row-wise softmax of `logits`; entries with mask 0 get zero mass.
Matrix masked_softmax(const Matrix& logits, const std::vector<std::uint8_t>* mask);

/// Pairwise energies m_i(s) = Σ_κ Σ_s' μ_κ(s,s') [Σ_j k_κ(i,j) Q_j(s')].
/// Optionally returns the per-kernel filter outputs.
Matrix pairwise_messages(const CrfProblem& problem, const FilterSet& filters, const Matrix& q,
                         std::array<Matrix, kKernelCount>* filtered = nullptr);

/// Synchronous mean field. Throws InvalidArgument for iterations < 1.
MarginalField mean_field_infer(const CrfProblem& problem, const InferenceOptions& options = {});
MarginalField mean_field_infer(const PixelField& pixels, const PointField& points, const Unaries& unaries,
                               const FrameWeights& weights, const InferenceOptions& options = {});

/// Exact mean field updating one variable at a time in index order.
/// `on_update` sees the marginals after every single-variable update.
MarginalField mean_field_sequential(const CrfProblem& problem, int sweeps, ConstraintMode constraints,
                                    const std::function<void(const Matrix&)>& on_update = {});

/// Gibbs energy of a full labeling by direct summation.
double compute_energy(const CrfProblem& problem, const std::vector<int>& labeling);

/// E_Q[E] - H(Q) in closed form for a factorized Q.
double free_energy(const CrfProblem& problem, const Matrix& q);

}  // namespace ltr::crf
