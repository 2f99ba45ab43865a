#pragma once

#include <vector>

#include "ltr/trajectory/template_match.hpp"

namespace ltr::sim {

/// A box-shaped vehicle driving at constant velocity past a fixed sensor,
/// scanned by a ray fan that also sees the ground plane.
struct ConstantVelocityScene {
  trajectory::KeyframeSet keys;
  std::vector<trajectory::TimedCloud> frames;
  std::vector<geometry::Pose> truth;
};

ConstantVelocityScene make_constant_velocity_scene(int frames = 20, std::vector<int> keyframes = {0, 10, 19});

/// Ray-fan scan of a posed box plus the ground plane z = 0.
pointcloud::PointCloud scan_box(const geometry::Vec3& sensor, const geometry::Pose& box_pose,
                                const geometry::Vec3& half, double angular_step = 0.01);

}  // namespace ltr::sim
