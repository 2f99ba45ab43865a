#include "ltr/dynamic_detect/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

#include "ltr/error.hpp"
#include "ltr/pointcloud/kdtree.hpp"

namespace ltr::dynamic_detect {

std::vector<Cluster> region_growing(const pointcloud::PointCloud& cloud, const std::vector<double>& curvature,
                                    const RegionGrowingParams& params) {
  if (!cloud.has_normals()) throw MissingNormals("region growing needs per-point normals");
  if (curvature.size() != cloud.size()) throw InvalidArgument("curvature length mismatch");
  if (!(params.neighbor_radius > 0.0)) throw InvalidArgument("neighbor radius must be positive");

  const std::size_t n = cloud.size();
  const double cos_threshold = std::cos(params.angle_threshold_deg * std::numbers::pi / 180.0);
  const pointcloud::KdTree tree(cloud.positions);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return curvature[a] < curvature[b]; });

  constexpr long kUnassigned = -1;
  std::vector<long> label(n, kUnassigned);
  std::vector<Cluster> clusters;
  long next = 0;
  for (std::size_t seed : order) {
    if (label[seed] != kUnassigned) continue;
    std::vector<std::size_t> members{seed};
    label[seed] = next;
    std::deque<std::size_t> queue{seed};
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      for (std::size_t nb : tree.radius(cloud.positions[cur], params.neighbor_radius)) {
        if (label[nb] != kUnassigned) continue;
        if (std::abs(cloud.normals[cur].dot(cloud.normals[nb])) < cos_threshold) continue;
        label[nb] = next;
        members.push_back(nb);
        if (curvature[nb] <= params.curvature_threshold) queue.push_back(nb);
      }
    }
    ++next;
    if (members.size() >= params.min_cluster) {
      std::sort(members.begin(), members.end());
      clusters.push_back({std::move(members), 0.0});
    }
  }
  return clusters;
}

DetectionResult detect_dynamic(const pointcloud::PointCloud& cloud, std::vector<Cluster> clusters,
                               const VoxelSet& free_voxels, const OccupancyGrid& grid, double prob_threshold) {
  if (!(prob_threshold > 0.0 && prob_threshold <= 1.0)) throw InvalidArgument("probability threshold must be in (0, 1]");
  DetectionResult out;
  out.dynamic.assign(cloud.size(), false);
  out.cluster_dynamic.assign(clusters.size(), false);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    auto& cl = clusters[c];
    std::size_t free_members = 0;
    for (std::size_t i : cl.indices) {
      if (i >= cloud.size()) throw InvalidArgument("cluster index out of range");
      if (free_voxels.count(grid.key_of(cloud.positions[i]))) ++free_members;
    }
    cl.occupancy_probability =
        cl.indices.empty() ? 0.0 : static_cast<double>(free_members) / static_cast<double>(cl.indices.size());
    if (cl.occupancy_probability > prob_threshold) {
      out.cluster_dynamic[c] = true;
      for (std::size_t i : cl.indices) out.dynamic[i] = true;
    }
  }
  out.clusters = std::move(clusters);
  return out;
}

DetectionResult detect_dynamic(const pointcloud::PointCloud& cloud, std::vector<Cluster> clusters,
                               const OccupancyGrid& grid, double prob_threshold) {
  return detect_dynamic(cloud, std::move(clusters), free_voxel_set(grid), grid, prob_threshold);
}

}  // namespace ltr::dynamic_detect
