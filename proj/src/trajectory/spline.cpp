#include "ltr/trajectory/spline.hpp"

#include <algorithm>
#include <cmath>

#include "ltr/error.hpp"

namespace ltr::trajectory {

namespace {
constexpr int kArcSamplesPerSegment = 512;
}

PoseSpline::PoseSpline(std::vector<TimedPose> keyframes) {
  if (keyframes.size() < 2) throw InvalidArgument("a pose spline needs at least 2 keyframes");
  for (std::size_t i = 1; i < keyframes.size(); ++i) {
    if (keyframes[i].timestamp == keyframes[i - 1].timestamp)
      throw DuplicateTimestamp("keyframe timestamp " + std::to_string(keyframes[i].timestamp) + " repeats");
    if (keyframes[i].timestamp < keyframes[i - 1].timestamp)
      throw InvalidArgument("keyframes must be sorted by timestamp");
  }
  const std::size_t n = keyframes.size();
  for (const auto& k : keyframes) {
    times_.push_back(k.timestamp);
    points_.push_back(k.pose.translation());
    rotations_.emplace_back(k.pose.rotation());
    rotations_.back().normalize();
  }
  // Shortest arc between neighbours.
  for (std::size_t i = 1; i < n; ++i)
    if (rotations_[i].dot(rotations_[i - 1]) < 0.0) rotations_[i].coeffs() *= -1.0;

  tangents_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    tangents_[i] = (points_[b] - points_[a]) / (times_[b] - times_[a]);
  }

  arc_times_.push_back(times_.front());
  arc_.push_back(0.0);
  Vec3 prev = points_.front();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (int j = 1; j <= kArcSamplesPerSegment; ++j) {
      const double t = times_[k] + (times_[k + 1] - times_[k]) * j / kArcSamplesPerSegment;
      const Vec3 p = position(t);
      arc_times_.push_back(t);
      arc_.push_back(arc_.back() + (p - prev).norm());
      prev = p;
    }
  }
}

std::size_t PoseSpline::segment(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(k, times_.size() - 2);
}

Vec3 PoseSpline::position(double t) const {
  t = std::clamp(t, first_time(), last_time());
  const std::size_t k = segment(t);
  const double h = times_[k + 1] - times_[k];
  const double u = (t - times_[k]) / h;
  if (u == 0.0) return points_[k];
  if (u == 1.0) return points_[k + 1];
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  return h00 * points_[k] + h10 * h * tangents_[k] + h01 * points_[k + 1] + h11 * h * tangents_[k + 1];
}

Eigen::Quaterniond PoseSpline::orientation(double t) const {
  t = std::clamp(t, first_time(), last_time());
  const std::size_t k = segment(t);
  const double u = (t - times_[k]) / (times_[k + 1] - times_[k]);
  if (u == 0.0) return rotations_[k];
  if (u == 1.0) return rotations_[k + 1];
  return rotations_[k].slerp(u, rotations_[k + 1]);
}

Pose PoseSpline::pose(double t) const {
  return Pose(orientation(t).normalized().toRotationMatrix(), position(t));
}

double PoseSpline::arc_length(double t) const {
  t = std::clamp(t, first_time(), last_time());
  auto it = std::upper_bound(arc_times_.begin(), arc_times_.end(), t);
  if (it == arc_times_.end()) return arc_.back();
  const std::size_t j = static_cast<std::size_t>(it - arc_times_.begin());
  const std::size_t i = j - 1;
  const double w = (t - arc_times_[i]) / (arc_times_[j] - arc_times_[i]);
  return arc_[i] + w * (arc_[j] - arc_[i]);
}

double PoseSpline::time_at_arc(double s) const {
  if (s <= 0.0) return first_time();
  if (s >= arc_.back()) return last_time();
  auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - arc_.begin());
  const std::size_t i = j - 1;
  const double len = arc_[j] - arc_[i];
  const double w = len > 0.0 ? (s - arc_[i]) / len : 0.0;
  return arc_times_[i] + w * (arc_times_[j] - arc_times_[i]);
}

PoseSpline fit_spline(const KeyframeSet& keys) { return PoseSpline(keys.keyframes); }

}  // namespace ltr::trajectory
