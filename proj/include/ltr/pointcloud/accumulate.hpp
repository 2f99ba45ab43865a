#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ltr/geometry/primitive.hpp"
#include "ltr/pointcloud/point_cloud.hpp"

namespace ltr::pointcloud {

using geometry::BoundingPrimitive;

/// One sensor capture: points in the sensor frame plus the sensor-to-world pose.
struct StampedCloud {
  Pose pose;
  PointCloud cloud;
  double timestamp = 0.0;
  int frame = 0;
};

/// Sequential fusion into the world frame. Points enclosed by a dynamic
/// primitive (at its pose for the point's timestamp) are excluded; a point
/// is dropped when an already kept point lies within `dedup_radius`, so the
/// first observation wins. Kept points carry `frame_index` = source frame.
PointCloud accumulate_static(const std::vector<StampedCloud>& frames,
                             const std::vector<BoundingPrimitive>& dynamic_primitives,
                             double dedup_radius = 0.05);

using PoseResolver = std::function<std::optional<Pose>(double timestamp)>;

/// Object-centred accumulation of one dynamic primitive.
struct DynamicAccumulation {
  PointCloud canonical;
  std::vector<geometry::TimedPose> placements;

  /// Canonical cloud mapped back into the world at the placement for `timestamp`.
  /// Throws MissingPose if the timestamp was not part of the accumulation.
  PointCloud place(double timestamp) const;
};

/// Collects, for every frame, the points inside `primitive` at that frame's
/// resolved pose and maps them into the canonical object frame. Without a
/// resolver the primitive's exact dynamic poses are used.
/// Throws MissingPose when a frame timestamp cannot be resolved.
DynamicAccumulation accumulate_dynamic(const std::vector<StampedCloud>& frames,
                                       const BoundingPrimitive& primitive,
                                       const PoseResolver& resolver = {});

}  // namespace ltr::pointcloud
