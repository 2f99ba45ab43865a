#pragma once

#include <Eigen/Core>

namespace ltr::learning {

struct OptimizerState {
  double rho = 0.95;
  double epsilon = 1e-8;
  Eigen::VectorXd mean_sq_gradient;  // E[g²]
  Eigen::VectorXd mean_sq_update;    // E[Δx²]
};

/// One ADADELTA update of `theta` in place; returns Δ. Zero-sized running
/// averages are initialized on first use. Throws NonFiniteGradient.
Eigen::VectorXd adadelta_step(OptimizerState& state, Eigen::VectorXd& theta, const Eigen::VectorXd& gradient);

}  // namespace ltr::learning
