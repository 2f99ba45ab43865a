#pragma once

#include <vector>

#include "ltr/pointcloud/point_cloud.hpp"

namespace ltr::pointcloud {

struct NormalEstimate {
  PointCloud cloud;                 // input with normals filled
  std::vector<double> curvature;    // λ0 / (λ0 + λ1 + λ2)
  std::vector<bool> degenerate;     // smallest two eigenvalues tied; normal forced to +z
};

/// PCA normals over the k nearest neighbours (the point itself included).
/// Normals face the sensor origin of the point's frame when `sensor_origins`
/// is indexed by frame_index; otherwise they point into the +z half-space.
/// Throws InvalidArgument unless k >= 3 and N >= k.
NormalEstimate estimate_normals(const PointCloud& cloud, int k,
                                const std::vector<Vec3>& sensor_origins = {});

}  // namespace ltr::pointcloud
