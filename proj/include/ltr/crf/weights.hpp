#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ltr/crf/label_space.hpp"

namespace ltr::crf {

/// Fixed Gaussian kernel widths (not learned).
struct KernelWidths {
  double smooth_position = 3.0;      // pixels
  double appearance_position = 50.0;  // pixels
  double appearance_color = 15.0;     // color units
  double point_position = 0.5;        // meters
  double point_normal = 0.1;          // normal z-component
  double cross_position = 3.0;        // pixels

  void validate() const;
};

enum class Kernel { Smoothness = 0, Appearance = 1, Points = 2, Cross = 3 };
inline constexpr int kKernelCount = 4;
std::string to_string(Kernel k);

/// Label compatibility of one kernel. Tied to (intra, inter) unless `full`
/// holds a symmetric class×class matrix (semantic mode only).
struct Compatibility {
  double intra = -0.1;
  double inter = 0.1;
  std::optional<Eigen::MatrixXd> full;
};

/// Per-channel standardization of the unary features: pixel constraint ξ,
/// pixel negative log-probability, point constraint ξ.
struct Whitening {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> stddev{1.0, 1.0, 1.0};

  double apply(int channel, double x) const { return (x - mean[channel]) / stddev[channel]; }
  bool is_identity() const;
};

/// Learned parameters Θ (class-indexed) plus fixed hyperparameters.
struct ModelWeights {
  ClassSet classes;
  Eigen::VectorXd pixel_constraint;   // w^P_1 per class
  Eigen::VectorXd pixel_probability;  // w^P_2 per class
  Eigen::VectorXd point_constraint;   // w^L per class
  std::array<Compatibility, kKernelCount> compat;
  KernelWidths widths;
  Whitening whitening;
  double lambda = 0.0;

  /// Unary weights 1, tied compatibilities intra -0.1 / inter +0.1.
  static ModelWeights defaults(const ClassSet& classes);

  /// Throws InvalidArgument on size mismatches, asymmetric matrices or bad widths.
  void validate() const;

  /// Flat Θ: the three unary vectors, then each kernel's (intra, inter) or
  /// upper-triangular matrix entries.
  int parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);
};

struct ParameterGroup {
  std::string name;
  int offset = 0;
  int count = 0;
};
std::vector<ParameterGroup> parameter_groups(const ModelWeights& w);

/// Weights expanded to the labels of one frame.
struct FrameWeights {
  int labels = 0;
  Eigen::VectorXd pixel_constraint;
  Eigen::VectorXd pixel_probability;
  Eigen::VectorXd point_constraint;
  struct Compat {
    bool tied = true;
    double intra = 0.0;
    double inter = 0.0;
    Eigen::MatrixXd matrix;  // always filled, labels×labels
  };
  std::array<Compat, kKernelCount> compat;
  KernelWidths widths;
  Whitening whitening;
};

/// Throws InvalidArgument for a full compatibility matrix in instance mode.
FrameWeights expand(const ModelWeights& w, const LabelSpace& labels);

/// Gradient with respect to the expanded weights of one frame.
struct FrameGradient {
  Eigen::VectorXd pixel_constraint;
  Eigen::VectorXd pixel_probability;
  Eigen::VectorXd point_constraint;
  std::array<Eigen::MatrixXd, kKernelCount> compat;  // labels×labels, d/dμ(s, s')

  explicit FrameGradient(int labels = 0);
};

/// Adds the chain-rule image of `g` in Θ coordinates to `out`.
void accumulate_gradient(const ModelWeights& w, const LabelSpace& labels, const FrameGradient& g,
                         Eigen::VectorXd& out);

}  // namespace ltr::crf
