#include "ltr/geometry/ground_height.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltr/error.hpp"
#include "ltr/pointcloud/kdtree.hpp"

namespace ltr::geometry {

std::vector<double> estimate_ground_heights(const std::vector<Vec2>& polygon_xy,
                                            const std::vector<Pose>& cameras,
                                            const pointcloud::PointCloud& cloud,
                                            const GroundHeightOptions& options) {
  if (cloud.empty()) throw InvalidArgument("empty point cloud");
  if (cameras.empty()) throw InvalidArgument("no cameras");
  if (options.neighbors < 1) throw InvalidArgument("neighbor count must be >= 1");

  const pointcloud::KdTree tree(cloud.positions);
  const double r2 = options.search_radius * options.search_radius;
  std::vector<double> heights;
  heights.reserve(polygon_xy.size());
  for (const Vec2& v : polygon_xy) {
    double best = std::numeric_limits<double>::infinity();
    double z_init = 0.0;
    for (const Pose& cam : cameras) {
      const double d = (cam.translation().head<2>() - v).squaredNorm();
      if (d < best) {
        best = d;
        z_init = cam.translation().z();
      }
    }
    std::vector<double> zs;
    for (const auto& [idx, d2] : tree.knn(Vec3(v.x(), v.y(), z_init), options.neighbors)) {
      if (d2 <= r2) zs.push_back(cloud.positions[idx].z());
    }
    if (zs.empty()) throw EmptyNeighborhood("no cloud point within the search radius");
    std::sort(zs.begin(), zs.end());
    const std::size_t m = zs.size();
    heights.push_back(m % 2 ? zs[m / 2] : 0.5 * (zs[m / 2 - 1] + zs[m / 2]));
  }
  return heights;
}

}  // namespace ltr::geometry
