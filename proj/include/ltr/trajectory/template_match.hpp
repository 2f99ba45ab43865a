#pragma once

#include <string>
#include <unordered_set>

#include "ltr/pointcloud/point_cloud.hpp"
#include "ltr/pointcloud/voxel_key.hpp"
#include "ltr/trajectory/spline.hpp"

namespace ltr::trajectory {

using pointcloud::PointCloud;
using pointcloud::VoxelKey;

/// Union of voxelized object-frame points over all keyframes. Voxel index
/// of a local point is floor(local / voxel_size + 0.5), so index 0 is
/// centred on the primitive origin.
struct OccupancyTemplate {
  double voxel_size = 0.2;
  Vec3 half_extents = Vec3::Ones();
  std::unordered_set<VoxelKey, pointcloud::VoxelKeyHash> occupied;

  VoxelKey key_of(const Vec3& local) const;
};

struct TimedCloud {
  double timestamp = 0.0;
  PointCloud cloud;  // world frame
};

/// Throws InvalidArgument when a timestamp is not a keyframe and
/// NoPointsInPrimitive when no keyframe encloses any point.
OccupancyTemplate build_template(const KeyframeSet& keys, const std::vector<TimedCloud>& per_timestamp_points,
                                 double voxel_size = 0.2);

struct SearchParams {
  double window = 2.0;  // ± arc length, meters
  double step = 0.05;   // meters
};

struct MatchResult {
  Pose pose;
  double offset = 0.0;  // arc-length offset from spline(t)
  std::size_t score = 0;
};

/// Count of template voxels also occupied by the points that fall inside the
/// primitive placed at `pose`.
std::size_t overlap_score(const OccupancyTemplate& tmpl, const Pose& pose, const PointCloud& points);

/// Slides the primitive along the spline within ±window of spline(t) and
/// keeps the best overlap; ties go to the smallest |offset|, negative first.
/// Candidates beyond the spline span are skipped.
/// Throws EmptyScan when no point lies within twice the extents of spline(t).
MatchResult match_pose(const OccupancyTemplate& tmpl, const PoseSpline& spline, double t, const PointCloud& points,
                       const SearchParams& search = {});

struct SkippedFrame {
  double timestamp = 0.0;
  std::string reason;
};

struct TrajectoryResult {
  std::vector<TimedPose> poses;
  std::vector<SkippedFrame> skipped;
};

/// Keyframe timestamps return the annotated pose verbatim; other in-span
/// frames are matched. Frames outside the keyframe span or with empty
/// scans are reported in `skipped`. Throws InvalidArgument for unsorted frames.
TrajectoryResult interpolate_trajectory(const KeyframeSet& keys, const OccupancyTemplate& tmpl,
                                        const std::vector<TimedCloud>& frames, const SearchParams& search = {});

}  // namespace ltr::trajectory
