#include "ltr/geometry/pose.hpp"

#include <algorithm>
#include <cmath>

#include "ltr/error.hpp"

namespace ltr::geometry {

double orthonormality_error(const Mat3& rotation) {
  return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Pose::Pose(const Mat3& rotation, const Vec3& translation, std::optional<int> frame_index)
    : rotation_(rotation), translation_(translation), frame_index_(frame_index) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidPose("non-finite entries");
  }
  if (orthonormality_error(rotation) >= 1e-9 || rotation.determinant() <= 0.0) {
    throw InvalidPose("rotation is not a proper orthonormal matrix");
  }
  if (frame_index && *frame_index < 0) throw InvalidPose("negative frame index");
}

Pose Pose::from_quaternion(const Eigen::Vector4d& wxyz, const Vec3& translation) {
  const double n = wxyz.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidPose("zero or non-finite quaternion");
  Eigen::Quaterniond q(wxyz[0] / n, wxyz[1] / n, wxyz[2] / n, wxyz[3] / n);
  Mat3 r = q.toRotationMatrix();
  // Re-orthonormalize to absorb rounding from the quaternion product.
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r = svd.matrixU() * svd.matrixV().transpose();
  return Pose(r, translation);
}

Pose Pose::from_translation(const Vec3& translation) { return Pose(Mat3::Identity(), translation); }

Eigen::Vector4d Pose::quaternion() const {
  Eigen::Quaterniond q(rotation_);
  q.normalize();
  Eigen::Vector4d out(q.w(), q.x(), q.y(), q.z());
  if (out[0] < 0) out = -out;
  return out;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  out.frame_index_ = frame_index_;
  return out;
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.rotation_ = rotation_ * rhs.rotation_;
  out.translation_ = rotation_ * rhs.translation_ + translation_;
  out.frame_index_ = frame_index_;
  return out;
}

Mat3 axis_angle(const Vec3& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  const Vec3 axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  return std::atan2(0.5 * axis.norm(), 0.5 * (rel.trace() - 1.0));
}

}  // namespace ltr::geometry
