#include "ltr/metrics/trajectory_eval.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>

#include "ltr/error.hpp"

namespace ltr::metrics {

namespace {

Eigen::Matrix3Xd columns(const std::vector<Vec3>& pts) {
  Eigen::Matrix3Xd m(3, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i];
  return m;
}

Similarity from_homogeneous(const Eigen::Matrix4d& t) {
  Similarity s;
  s.scale = t.block<3, 1>(0, 0).norm();
  s.rotation = t.block<3, 3>(0, 0) / s.scale;
  s.translation = t.block<3, 1>(0, 3);
  return s;
}

// Rank-deficient inputs still yield a minimizer; only a single point
// needs the translation-only fallback.
Similarity align_any(const std::vector<Vec3>& src, const std::vector<Vec3>& dst, bool with_scale) {
  if (src.size() == 1) return {1.0, Mat3::Identity(), dst[0] - src[0]};
  return from_homogeneous(Eigen::umeyama(columns(src), columns(dst), with_scale));
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(v.size()));
}

}  // namespace

Similarity umeyama_align(const std::vector<Vec3>& src, const std::vector<Vec3>& dst, bool with_scale) {
  if (src.size() != dst.size()) throw LengthMismatch("alignment needs one destination per source point");
  if (src.size() < 3) throw DegenerateConfiguration("alignment needs at least 3 correspondences");
  const Eigen::Matrix3Xd s = columns(src);
  const Eigen::Matrix3Xd centered = s.colwise() - s.rowwise().mean();
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3Xd>(centered).singularValues();
  if (!(sv[1] > 1e-9 * std::max(1.0, sv[0]))) throw DegenerateConfiguration("source points are collinear");
  return from_homogeneous(Eigen::umeyama(s, columns(dst), with_scale));
}

TrajectoryErrors ape_rpe(const std::vector<Pose>& gt, const std::vector<Pose>& est, double rpe_delta,
                         Alignment alignment) {
  if (gt.size() != est.size()) throw LengthMismatch("trajectories differ in length");
  if (!(rpe_delta > 0.0)) throw InvalidArgument("rpe_delta must be positive");
  TrajectoryErrors e;
  const std::size_t n = gt.size();
  if (n == 0) return e;
  std::vector<Vec3> gp(n), ep(n);
  for (std::size_t i = 0; i < n; ++i) {
    gp[i] = gt[i].translation();
    ep[i] = est[i].translation();
  }
  const Similarity a = align_any(ep, gp, alignment == Alignment::Similarity);

  std::vector<Pose> aligned;
  std::vector<double> ape;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = a.apply(ep[i]);
    ape.push_back((p - gp[i]).norm());
    aligned.emplace_back(a.rotation * est[i].rotation(), p);
  }
  mean_std(ape, e.ape_mean, e.ape_std);
  e.ape_count = static_cast<int>(n);

  std::vector<double> arc(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) arc[i] = arc[i - 1] + (gp[i] - gp[i - 1]).norm();
  std::vector<double> rpe;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    j = std::max(j, i + 1);
    while (j < n && arc[j] - arc[i] < rpe_delta) ++j;
    if (j >= n) break;
    const Pose rel_gt = gt[i].inverse() * gt[j];
    const Pose rel_est = aligned[i].inverse() * aligned[j];
    const double err = (rel_gt.inverse() * rel_est).translation().norm();
    rpe.push_back(100.0 * err / (arc[j] - arc[i]));
  }
  mean_std(rpe, e.rpe_mean, e.rpe_std);
  e.rpe_pairs = static_cast<int>(rpe.size());
  return e;
}

TrajectoryErrors windowed_ape_rpe(const std::vector<Pose>& gt, const std::vector<Pose>& est, int window,
                                  double rpe_delta, Alignment alignment) {
  if (gt.size() != est.size()) throw LengthMismatch("trajectories differ in length");
  if (window < 3) throw InvalidArgument("window must hold at least 3 frames");
  TrajectoryErrors total;
  int windows = 0, rpe_windows = 0;
  for (std::size_t start = 0; start + 3 <= gt.size(); start += window) {
    const std::size_t end = std::min(gt.size(), start + window);
    const std::vector<Pose> g(gt.begin() + start, gt.begin() + end), e(est.begin() + start, est.begin() + end);
    const TrajectoryErrors w = ape_rpe(g, e, rpe_delta, alignment);
    total.ape_mean += w.ape_mean;
    total.ape_std += w.ape_std;
    total.ape_count += w.ape_count;
    ++windows;
    if (w.rpe_pairs > 0) {
      total.rpe_mean += w.rpe_mean;
      total.rpe_std += w.rpe_std;
      total.rpe_pairs += w.rpe_pairs;
      ++rpe_windows;
    }
  }
  if (windows > 0) {
    total.ape_mean /= windows;
    total.ape_std /= windows;
  }
  if (rpe_windows > 0) {
    total.rpe_mean /= rpe_windows;
    total.rpe_std /= rpe_windows;
  }
  return total;
}

}  // namespace ltr::metrics
