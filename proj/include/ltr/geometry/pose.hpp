#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>

namespace ltr::geometry {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform mapping local coordinates into a parent frame
/// (p_parent = rotation * p_local + translation).
class Pose {
 public:
  Pose() = default;
  /// Throws InvalidPose unless `rotation` is orthonormal with det +1.
  Pose(const Mat3& rotation, const Vec3& translation,
       std::optional<int> frame_index = std::nullopt);

  static Pose identity() { return Pose(); }
  /// Quaternion in (w, x, y, z) order; normalized before conversion.
  static Pose from_quaternion(const Eigen::Vector4d& wxyz, const Vec3& translation);
  static Pose from_translation(const Vec3& translation);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  std::optional<int> frame_index() const { return frame_index_; }
  void set_frame_index(std::optional<int> index) { frame_index_ = index; }

  /// (w, x, y, z), w >= 0.
  Eigen::Vector4d quaternion() const;

  Vec3 transform(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }
  Vec3 inverse_transform(const Vec3& p) const {
    return rotation_.transpose() * (p - translation_);
  }

  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
  std::optional<int> frame_index_;
};

/// Largest absolute entry of RᵀR - I.
double orthonormality_error(const Mat3& rotation);

/// Rotation of `angle_rad` about the unit axis.
Mat3 axis_angle(const Vec3& axis, double angle_rad);

/// Geodesic angle between two rotations in radians.
double rotation_angle_between(const Mat3& a, const Mat3& b);

}  // namespace ltr::geometry
