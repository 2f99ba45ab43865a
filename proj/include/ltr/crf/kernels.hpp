#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ltr/crf/fields.hpp"
#include "ltr/crf/lattice.hpp"

namespace ltr::crf {

/// Scaled features of one kernel over a subset of the CRF variables
/// (pixel rows first, then point rows). A bipartite kernel only couples
/// members [0, split) with members [split, n).
struct KernelFeatures {
  int dim = 0;
  std::vector<int> variables;
  std::vector<double> features;  // variables.size() × dim
  int split = -1;

  int size() const { return static_cast<int>(variables.size()); }
  bool bipartite() const { return split >= 0; }
  /// exp(-|f_a - f_b|²/2) for members a, b.
  double value(int a, int b) const;
  /// Whether members a and b interact at all.
  bool couples(int a, int b) const;
};

/// Smoothness (p/θ1) and appearance (p/θ2, c/θ3) over pixels; (p3d/θ, n_z/θ)
/// over real points; pixel positions against point projections (/θ^PL).
std::array<KernelFeatures, kKernelCount> kernel_features(const PixelField& pixels, const PointField& points,
                                                         const KernelWidths& widths);

enum class FilterMode { Exact, Lattice };
std::string to_string(FilterMode mode);
FilterMode filter_mode_from_string(const std::string& name);

/// Linear map out_i = Σ_{j coupled to i, j≠i} k(f_i, f_j) · in_j over the
/// full (P+M)×S variable matrix; rows outside the kernel are zero. The map
/// is symmetric, so it is also its own adjoint.
class KernelFilter {
 public:
  virtual ~KernelFilter() = default;
  virtual void apply(const Matrix& in, Matrix& out) const = 0;
};

std::unique_ptr<KernelFilter> make_filter(const KernelFeatures& kernel, FilterMode mode,
                                          const LatticeParams& lattice = {});

}  // namespace ltr::crf
