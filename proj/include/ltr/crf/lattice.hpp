#pragma once

#include <cstdint>
#include <vector>

namespace ltr::crf {

struct LatticeParams {
  /// Distance between adjacent lattice vertices, in kernel-width units.
  double spacing = 0.01;
  /// Vertex pairs farther apart than this (kernel-width units) are not blurred.
  double cutoff = 5.0;
};

/// Permutohedral-lattice approximation of the unit-width Gaussian filter
///   out_i = Σ_{j≠i} exp(-|f_i - f_j|² / 2) · in_j.
/// Each feature is splatted onto the d+1 vertices of its enclosing simplex
/// with barycentric weights, the occupied vertices are blurred with an exact
/// sparse Gaussian whose variance is reduced by the splat/slice spread, and
/// the result is sliced back with the same weights. The implied kernel is
/// symmetric, so the filter is its own adjoint. The self term is removed
/// using the implied kernel's diagonal.
class PermutohedralLattice {
 public:
  /// `features` is N×d row-major. Throws InvalidArgument for d < 1 or a
  /// spacing too coarse to compensate.
  PermutohedralLattice(const std::vector<double>& features, int dim, const LatticeParams& params = {});

  int size() const { return n_; }
  int dim() const { return d_; }
  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t blur_pairs() const { return blur_col_.size(); }

  /// `in` and `out` are N×channels row-major; `out` is overwritten.
  void filter(const double* in, double* out, int channels) const;

  /// Implied kernel value between inputs i and j, for diagnostics.
  double kernel(int i, int j) const;

 private:
  int n_ = 0;
  int d_ = 0;
  std::size_t vertex_count_ = 0;
  std::vector<std::uint32_t> splat_vertex_;  // N×(d+1)
  std::vector<double> splat_weight_;         // N×(d+1)
  std::vector<std::size_t> blur_row_;  // CSR upper triangle over vertices
  std::vector<std::uint32_t> blur_col_;
  std::vector<float> blur_weight_;
  std::vector<double> self_;
};

/// Per-axis variance of the barycentric splat for a lattice of unit spacing,
/// averaged over positions (used for variance compensation).
double splat_variance(int dim);

}  // namespace ltr::crf
