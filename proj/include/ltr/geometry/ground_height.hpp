#pragma once

#include <vector>

#include "ltr/geometry/pose.hpp"
#include "ltr/pointcloud/point_cloud.hpp"

namespace ltr::geometry {

struct GroundHeightOptions {
  int neighbors = 10;
  double search_radius = 5.0;
};

/// Height for each bird's-eye polygon vertex: start from the height of the
/// nearest camera (in x/y), then take the median z of the k nearest cloud
/// points around (x, y, camera height) within the search radius.
/// Throws EmptyNeighborhood when a vertex has no point within the radius.
std::vector<double> estimate_ground_heights(const std::vector<Vec2>& polygon_xy,
                                            const std::vector<Pose>& cameras,
                                            const pointcloud::PointCloud& cloud,
                                            const GroundHeightOptions& options = {});

}  // namespace ltr::geometry
