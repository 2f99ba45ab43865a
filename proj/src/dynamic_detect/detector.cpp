#include "ltr/dynamic_detect/detector.hpp"

#include "ltr/pointcloud/normals.hpp"

namespace ltr::dynamic_detect {

DetectorOutput run_detector(const std::vector<pointcloud::StampedCloud>& frames, const DetectorParams& params) {
  OccupancyGrid grid(params.grid);
  std::vector<Vec3> origins;
  for (const auto& f : frames) {
    grid.integrate_scan(f.pose.translation(), f.cloud.transformed(f.pose));
  }
  DetectorOutput out;
  pointcloud::PointCloud acc = pointcloud::accumulate_static(frames, {}, params.dedup_radius);
  if (acc.size() < static_cast<std::size_t>(params.normal_neighbors)) {
    out.cloud = std::move(acc);
    out.detection.dynamic.assign(out.cloud.size(), false);
    return out;
  }
  for (const auto& f : frames) {
    const std::size_t idx = static_cast<std::size_t>(std::max(f.frame, 0));
    if (origins.size() <= idx) origins.resize(idx + 1, Vec3::Zero());
    origins[idx] = f.pose.translation();
  }
  auto normals = pointcloud::estimate_normals(acc, params.normal_neighbors, origins);
  auto clusters = region_growing(normals.cloud, normals.curvature, params.growing);
  const VoxelSet free = free_voxel_set(grid, params.free_threshold.value_or(grid.params().p_min));
  out.detection = detect_dynamic(normals.cloud, std::move(clusters), free, grid, params.prob_threshold);
  out.cloud = std::move(normals.cloud);
  return out;
}

}  // namespace ltr::dynamic_detect
