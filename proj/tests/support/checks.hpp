#pragma once

#include <Eigen/Core>
#include <algorithm>

namespace ltr::sim {

/// ‖a - b‖ / max(‖a‖, ‖b‖, floor): relative error of a gradient block.
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-6) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

}  // namespace ltr::sim
