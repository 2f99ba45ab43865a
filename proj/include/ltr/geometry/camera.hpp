#pragma once

#include "ltr/geometry/pose.hpp"

namespace ltr::geometry {

/// Pinhole intrinsics. Pixel (col, row) covers [col, col+1) x [row, row+1)
/// in projected coordinates, so its center is (col + 0.5, row + 0.5).
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
  bool contains(const Vec2& pixel) const {
    return pixel.x() >= 0.0 && pixel.y() >= 0.0 && pixel.x() < width && pixel.y() < height;
  }
  int pixel_count() const { return width * height; }
};

/// (fx·x/z + cx, fy·y/z + cy); no clipping. Throws PointBehindCamera for z <= 1e-9.
Vec2 project_point(const CameraIntrinsics& intr, const Vec3& p_cam);

/// Unit viewing direction (camera frame) through continuous pixel coordinate `uv`.
Vec3 pixel_ray(const CameraIntrinsics& intr, const Vec2& uv);

/// Ray through the center of pixel (col, row).
inline Vec3 pixel_center_ray(const CameraIntrinsics& intr, int col, int row) {
  return pixel_ray(intr, Vec2(col + 0.5, row + 0.5));
}

}  // namespace ltr::geometry
