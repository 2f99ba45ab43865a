#pragma once

#include <vector>

#include "ltr/geometry/pose.hpp"

namespace ltr::metrics {

using geometry::Mat3;
using geometry::Pose;
using geometry::Vec3;

/// dst ≈ scale · rotation · src + translation.
struct Similarity {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// Least-squares similarity (or rigid motion with with_scale = false).
/// Throws DegenerateConfiguration for fewer than 3 points or collinear
/// sources; LengthMismatch when the lists differ in length.
Similarity umeyama_align(const std::vector<Vec3>& src, const std::vector<Vec3>& dst, bool with_scale = true);

enum class Alignment { Rigid, Similarity };

struct TrajectoryErrors {
  double ape_mean = 0.0;  // meters
  double ape_std = 0.0;
  double rpe_mean = 0.0;  // percent of traveled distance
  double rpe_std = 0.0;
  int ape_count = 0;
  int rpe_pairs = 0;
};

/// APE: position error after aligning `est` to `gt`. RPE: for each frame i
/// and the first j whose gt arc length from i reaches `rpe_delta`, the
/// translation of (gt_i⁻¹gt_j)⁻¹(est_i⁻¹est_j) divided by that arc length,
/// in percent. Throws LengthMismatch.
TrajectoryErrors ape_rpe(const std::vector<Pose>& gt, const std::vector<Pose>& est, double rpe_delta = 1.0,
                         Alignment alignment = Alignment::Rigid);

/// ape_rpe over consecutive windows of `window` frames (a shorter tail of
/// at least 3 frames forms its own window), each aligned separately;
/// means and deviations are averaged over windows.
TrajectoryErrors windowed_ape_rpe(const std::vector<Pose>& gt, const std::vector<Pose>& est, int window = 50,
                                  double rpe_delta = 1.0, Alignment alignment = Alignment::Similarity);

}  // namespace ltr::metrics
