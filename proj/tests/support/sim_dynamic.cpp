#include "sim_dynamic.hpp"

#include <cmath>
#include <limits>

namespace ltr::sim {

using geometry::Vec3;

bool ray_box(const Vec3& o, const Vec3& d, const Vec3& center, const Vec3& half, double& t) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double lo = center[k] - half[k] - o[k], hi = center[k] + half[k] - o[k];
    if (std::abs(d[k]) < 1e-15) {
      if (lo > 0.0 || hi < 0.0) return false;
      continue;
    }
    double a = lo / d[k], b = hi / d[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  t = t0;
  return true;
}

MovingBoxScene make_moving_box_scene(const MovingBoxOptions& opt) {
  MovingBoxScene scene;
  const int total = opt.scans_with_box + opt.scans_after;
  const int n = static_cast<int>(std::floor(opt.fov / opt.angular_step));
  for (int s = 0; s < total; ++s) {
    const bool present = s < opt.scans_with_box;
    const Vec3 center(opt.start_x + opt.half_extents.x() + opt.step * s, 0.0, 0.0);
    pointcloud::PointCloud scan;
    for (int i = -n; i <= n; ++i) {
      for (int j = -n; j <= n; ++j) {
        const Vec3 d = Vec3(1.0, std::tan(i * opt.angular_step), std::tan(j * opt.angular_step)).normalized();
        double t = 0.0;
        if (present && ray_box(scene.sensor, d, center, opt.half_extents, t)) {
          scan.positions.push_back(scene.sensor + t * d);
        } else {
          scan.positions.push_back(scene.sensor + (scene.wall_x - scene.sensor.x()) / d.x() * d);
        }
      }
    }
    scene.scans.push_back(std::move(scan));
    scene.box_present.push_back(present);
  }
  return scene;
}

}  // namespace ltr::sim
