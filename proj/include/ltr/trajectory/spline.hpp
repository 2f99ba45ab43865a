#pragma once

#include <vector>

#include "ltr/geometry/primitive.hpp"

namespace ltr::trajectory {

using geometry::Pose;
using geometry::TimedPose;
using geometry::Vec3;

struct KeyframeSet {
  Vec3 half_extents = Vec3::Ones();
  std::vector<TimedPose> keyframes;
};

/// Interpolating pose track: Catmull-Rom positions (non-uniform tangents,
/// duplicated end knots) and per-segment shortest-arc slerp of orientations.
class PoseSpline {
 public:
  PoseSpline() = default;
  /// Throws InvalidArgument (< 2 keyframes or unsorted) / DuplicateTimestamp.
  explicit PoseSpline(std::vector<TimedPose> keyframes);

  double first_time() const { return times_.front(); }
  double last_time() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }

  /// Evaluation clamps t to the keyframe span.
  Vec3 position(double t) const;
  Eigen::Quaterniond orientation(double t) const;
  Pose pose(double t) const;

  /// Arc length from the first keyframe to time t, and its inverse.
  double arc_length(double t) const;
  double time_at_arc(double s) const;
  double total_length() const { return arc_.empty() ? 0.0 : arc_.back(); }

 private:
  std::size_t segment(double t) const;

  std::vector<double> times_;
  std::vector<Vec3> points_;
  std::vector<Vec3> tangents_;
  std::vector<Eigen::Quaterniond> rotations_;
  // Dense arc-length table.
  std::vector<double> arc_times_;
  std::vector<double> arc_;
};

PoseSpline fit_spline(const KeyframeSet& keys);

}  // namespace ltr::trajectory
