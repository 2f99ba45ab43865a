#pragma once

#include <vector>

#include "ltr/geometry/camera.hpp"
#include "ltr/pointcloud/point_cloud.hpp"

namespace ltr::pointcloud {

struct VisibilityMask {
  std::vector<bool> visible;
  std::vector<Vec2> projection;  // π_l; undefined where not visible
  std::vector<double> depth;

  std::vector<std::size_t> visible_indices() const;
};

/// Splatted min-depth buffer test. `pose` maps camera to world.
/// A point is visible iff it projects into the image with positive depth
/// and depth <= buffer + slack·depth at its own pixel.
VisibilityMask determine_visibility(const PointCloud& cloud, const Pose& pose,
                                    const geometry::CameraIntrinsics& intr,
                                    double splat_radius_px = 2.0, double slack = 0.01);

}  // namespace ltr::pointcloud
