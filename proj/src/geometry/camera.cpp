#include "ltr/geometry/camera.hpp"

#include "ltr/error.hpp"

namespace ltr::geometry {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidArgument("focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidArgument("image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw InvalidArgument("principal point outside the image");
  }
}

Vec2 project_point(const CameraIntrinsics& intr, const Vec3& p_cam) {
  if (!(p_cam.z() > 1e-9)) throw PointBehindCamera("depth must be positive");
  return {intr.fx * p_cam.x() / p_cam.z() + intr.cx, intr.fy * p_cam.y() / p_cam.z() + intr.cy};
}

Vec3 pixel_ray(const CameraIntrinsics& intr, const Vec2& uv) {
  return Vec3((uv.x() - intr.cx) / intr.fx, (uv.y() - intr.cy) / intr.fy, 1.0).normalized();
}

}  // namespace ltr::geometry
