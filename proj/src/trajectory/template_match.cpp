#include "ltr/trajectory/template_match.hpp"

#include <cmath>

#include "ltr/error.hpp"

namespace ltr::trajectory {

namespace {

bool inside(const Vec3& local, const Vec3& half, double scale = 1.0) {
  return std::abs(local.x()) <= scale * half.x() && std::abs(local.y()) <= scale * half.y() &&
         std::abs(local.z()) <= scale * half.z();
}

const TimedPose* keyframe_at(const KeyframeSet& keys, double t) {
  for (const auto& k : keys.keyframes)
    if (std::abs(k.timestamp - t) <= 1e-9) return &k;
  return nullptr;
}

}  // namespace

VoxelKey OccupancyTemplate::key_of(const Vec3& local) const {
  return {static_cast<std::int64_t>(std::floor(local.x() / voxel_size + 0.5)),
          static_cast<std::int64_t>(std::floor(local.y() / voxel_size + 0.5)),
          static_cast<std::int64_t>(std::floor(local.z() / voxel_size + 0.5))};
}

OccupancyTemplate build_template(const KeyframeSet& keys, const std::vector<TimedCloud>& per_timestamp_points,
                                 double voxel_size) {
  if (!(voxel_size > 0.0)) throw InvalidArgument("voxel size must be positive");
  OccupancyTemplate tmpl;
  tmpl.voxel_size = voxel_size;
  tmpl.half_extents = keys.half_extents;
  for (const auto& tc : per_timestamp_points) {
    const TimedPose* kf = keyframe_at(keys, tc.timestamp);
    if (!kf) throw InvalidArgument("template timestamp " + std::to_string(tc.timestamp) + " is not a keyframe");
    for (const Vec3& p : tc.cloud.positions) {
      const Vec3 local = kf->pose.inverse_transform(p);
      if (inside(local, keys.half_extents)) tmpl.occupied.insert(tmpl.key_of(local));
    }
  }
  if (tmpl.occupied.empty()) throw NoPointsInPrimitive("no keyframe encloses any point");
  return tmpl;
}

std::size_t overlap_score(const OccupancyTemplate& tmpl, const Pose& pose, const PointCloud& points) {
  std::unordered_set<VoxelKey, pointcloud::VoxelKeyHash> hit;
  for (const Vec3& p : points.positions) {
    const Vec3 local = pose.inverse_transform(p);
    if (!inside(local, tmpl.half_extents)) continue;
    const VoxelKey k = tmpl.key_of(local);
    if (tmpl.occupied.count(k)) hit.insert(k);
  }
  return hit.size();
}

MatchResult match_pose(const OccupancyTemplate& tmpl, const PoseSpline& spline, double t, const PointCloud& points,
                       const SearchParams& search) {
  if (!(search.step > 0.0) || !(search.window >= 0.0)) throw InvalidArgument("invalid search parameters");
  if (t < spline.first_time() - 1e-9 || t > spline.last_time() + 1e-9)
    throw InvalidArgument("match time outside the keyframe span");

  const Pose center = spline.pose(t);
  PointCloud near;
  // Candidates never leave a ball of radius window + |extents| around the centre.
  const double reach = search.window + tmpl.half_extents.norm();
  bool any_close = false;
  for (const Vec3& p : points.positions) {
    if (inside(center.inverse_transform(p), tmpl.half_extents, 2.0)) any_close = true;
    if ((p - center.translation()).norm() <= reach) near.positions.push_back(p);
  }
  if (!any_close) throw EmptyScan("no point within twice the primitive extents");

  const double s0 = spline.arc_length(t);
  const long steps = static_cast<long>(std::floor(search.window / search.step + 1e-9));
  MatchResult best{center, 0.0, 0};
  bool have = false;
  // Visit 0, -1, +1, -2, +2, ... so a strict improvement test keeps the preferred tie.
  for (long i = 0; i <= 2 * steps; ++i) {
    const long k = (i % 2 == 1) ? -(i + 1) / 2 : i / 2;
    const double offset = static_cast<double>(k) * search.step;
    const double s = s0 + offset;
    if (s < -1e-9 || s > spline.total_length() + 1e-9) continue;
    const Pose cand = k == 0 ? center : spline.pose(spline.time_at_arc(s));
    const std::size_t score = overlap_score(tmpl, cand, near);
    if (!have || score > best.score) {
      best = {cand, offset, score};
      have = true;
    }
  }
  return best;
}

TrajectoryResult interpolate_trajectory(const KeyframeSet& keys, const OccupancyTemplate& tmpl,
                                        const std::vector<TimedCloud>& frames, const SearchParams& search) {
  const PoseSpline spline = fit_spline(keys);
  TrajectoryResult out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && !(frames[i].timestamp > frames[i - 1].timestamp))
      throw InvalidArgument("frames must be strictly increasing in time");
    const double t = frames[i].timestamp;
    if (const TimedPose* kf = keyframe_at(keys, t)) {
      out.poses.push_back({t, kf->pose});
      continue;
    }
    if (t < spline.first_time() || t > spline.last_time()) {
      out.skipped.push_back({t, "outside keyframe span"});
      continue;
    }
    try {
      out.poses.push_back({t, match_pose(tmpl, spline, t, frames[i].cloud, search).pose});
    } catch (const EmptyScan& e) {
      out.skipped.push_back({t, e.what()});
    }
  }
  return out;
}

}  // namespace ltr::trajectory
