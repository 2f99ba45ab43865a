#include "ltr/pointcloud/normals.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ltr/error.hpp"
#include "ltr/pointcloud/kdtree.hpp"

namespace ltr::pointcloud {

NormalEstimate estimate_normals(const PointCloud& cloud, int k,
                                const std::vector<Vec3>& sensor_origins) {
  if (k < 3) throw InvalidArgument("normal estimation needs k >= 3");
  if (cloud.size() < static_cast<std::size_t>(k)) throw InvalidArgument("fewer points than k");

  const bool use_sensor = cloud.has_frame_index() && !sensor_origins.empty();
  const KdTree tree(cloud.positions);
  NormalEstimate out;
  out.cloud = cloud;
  out.cloud.normals.assign(cloud.size(), Vec3::UnitZ());
  out.curvature.assign(cloud.size(), 0.0);
  out.degenerate.assign(cloud.size(), false);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nn = tree.knn(cloud.positions[i], static_cast<std::size_t>(k));
    Vec3 mean = Vec3::Zero();
    for (const auto& [j, d2] : nn) mean += cloud.positions[j];
    mean /= static_cast<double>(nn.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& [j, d2] : nn) {
      const Vec3 d = cloud.positions[j] - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(nn.size());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Vec3 lambda = eig.eigenvalues();  // ascending
    const double sum = lambda.sum();
    out.curvature[i] = sum > 0.0 ? std::max(0.0, lambda(0)) / sum : 0.0;
    if (std::abs(lambda(1) - lambda(0)) <= 1e-12) {
      out.degenerate[i] = true;
      continue;
    }
    Vec3 n = eig.eigenvectors().col(0).normalized();
    if (use_sensor) {
      const int f = cloud.frame_index[i];
      if (f >= 0 && static_cast<std::size_t>(f) < sensor_origins.size()) {
        if (n.dot(sensor_origins[f] - cloud.positions[i]) < 0.0) n = -n;
      } else if (n.z() < 0.0) {
        n = -n;
      }
    } else if (n.z() < 0.0) {
      n = -n;
    }
    out.cloud.normals[i] = n;
  }
  return out;
}

}  // namespace ltr::pointcloud
