#include "ltr/learning/adadelta.hpp"

#include "ltr/error.hpp"

namespace ltr::learning {

Eigen::VectorXd adadelta_step(OptimizerState& state, Eigen::VectorXd& theta, const Eigen::VectorXd& gradient) {
  if (gradient.size() != theta.size()) throw InvalidArgument("gradient and parameters differ in length");
  if (!gradient.allFinite()) throw NonFiniteGradient("gradient contains NaN or infinity");
  const Eigen::Index n = theta.size();
  if (state.mean_sq_gradient.size() == 0) state.mean_sq_gradient = Eigen::VectorXd::Zero(n);
  if (state.mean_sq_update.size() == 0) state.mean_sq_update = Eigen::VectorXd::Zero(n);
  if (state.mean_sq_gradient.size() != n || state.mean_sq_update.size() != n)
    throw InvalidArgument("optimizer state does not match the parameter count");

  const double rho = state.rho, eps = state.epsilon;
  state.mean_sq_gradient = rho * state.mean_sq_gradient.array() + (1.0 - rho) * gradient.array().square();
  const Eigen::VectorXd delta = -((state.mean_sq_update.array() + eps).sqrt() /
                                  (state.mean_sq_gradient.array() + eps).sqrt() * gradient.array())
                                     .matrix();
  state.mean_sq_update = rho * state.mean_sq_update.array() + (1.0 - rho) * delta.array().square();
  theta += delta;
  return delta;
}

}  // namespace ltr::learning
