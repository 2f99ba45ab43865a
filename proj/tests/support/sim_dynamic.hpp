#pragma once

#include <vector>

#include "ltr/geometry/primitive.hpp"
#include "ltr/pointcloud/point_cloud.hpp"

namespace ltr::sim {

/// A fixed sensor looking down +x at a wall, with a box driving away from the
/// sensor through the space in front of the wall and then leaving the scene.
struct MovingBoxScene {
  geometry::Vec3 sensor = geometry::Vec3::Zero();
  std::vector<pointcloud::PointCloud> scans;  // world frame
  std::vector<bool> box_present;              // per scan
  double wall_x = 10.1;
};

struct MovingBoxOptions {
  int scans_with_box = 28;
  int scans_after = 14;
  double start_x = 2.0;
  double step = 0.25;
  geometry::Vec3 half_extents{0.4, 0.6, 0.8};
  double fov = 0.35;          // half-angle, radians, both axes
  double angular_step = 0.012;
};

MovingBoxScene make_moving_box_scene(const MovingBoxOptions& options = {});

/// Ray cast against an axis-aligned box; returns the entry distance if hit.
bool ray_box(const geometry::Vec3& o, const geometry::Vec3& d, const geometry::Vec3& center,
             const geometry::Vec3& half, double& t);

}  // namespace ltr::sim
