#include "ltr/pointcloud/visibility.hpp"

#include <cmath>
#include <limits>

#include "ltr/error.hpp"

namespace ltr::pointcloud {

std::vector<std::size_t> VisibilityMask::visible_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < visible.size(); ++i)
    if (visible[i]) out.push_back(i);
  return out;
}

VisibilityMask determine_visibility(const PointCloud& cloud, const Pose& pose,
                                    const geometry::CameraIntrinsics& intr,
                                    double splat_radius_px, double slack) {
  if (!(splat_radius_px >= 0.0)) throw InvalidArgument("splat radius must be >= 0");
  const std::size_t n = cloud.size();
  const int W = intr.width, H = intr.height;
  constexpr double inf = std::numeric_limits<double>::infinity();

  VisibilityMask mask;
  mask.visible.assign(n, false);
  mask.projection.assign(n, Vec2::Zero());
  mask.depth.assign(n, inf);

  std::vector<double> buffer(static_cast<std::size_t>(W) * H, inf);
  std::vector<bool> in_frame(n, false);
  const Pose world_to_cam = pose.inverse();
  const int r = static_cast<int>(std::floor(splat_radius_px));
  const double r2 = splat_radius_px * splat_radius_px;

  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 pc = world_to_cam.transform(cloud.positions[i]);
    if (pc.z() <= 1e-9) continue;
    const Vec2 uv = geometry::project_point(intr, pc);
    if (!intr.contains(uv)) continue;
    in_frame[i] = true;
    mask.projection[i] = uv;
    mask.depth[i] = pc.z();
    const int col = static_cast<int>(uv.x()), row = static_cast<int>(uv.y());
    for (int dy = -r; dy <= r; ++dy) {
      const int y = row + dy;
      if (y < 0 || y >= H) continue;
      for (int dx = -r; dx <= r; ++dx) {
        const int x = col + dx;
        if (x < 0 || x >= W || dx * dx + dy * dy > r2) continue;
        double& b = buffer[static_cast<std::size_t>(y) * W + x];
        if (pc.z() < b) b = pc.z();
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!in_frame[i]) continue;
    const int col = static_cast<int>(mask.projection[i].x());
    const int row = static_cast<int>(mask.projection[i].y());
    const double b = buffer[static_cast<std::size_t>(row) * W + col];
    mask.visible[i] = mask.depth[i] <= b + slack * mask.depth[i];
  }
  return mask;
}

}  // namespace ltr::pointcloud
