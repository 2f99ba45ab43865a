#pragma once

#include <vector>

#include "ltr/dynamic_detect/occupancy.hpp"

namespace ltr::dynamic_detect {

struct Cluster {
  std::vector<std::size_t> indices;  // ascending
  double occupancy_probability = 0.0;
};

struct RegionGrowingParams {
  double angle_threshold_deg = 8.0;
  double curvature_threshold = 1.0;
  std::size_t min_cluster = 50;
  double neighbor_radius = 0.3;
};

/// Smoothness-constrained region growing. Seeds are taken in ascending
/// curvature order; a neighbour joins when the angle between its normal and
/// the current point's normal (sign-agnostic) is within the threshold, and
/// seeds further growth when its curvature is within the curvature threshold.
/// Clusters come out ordered by their seed. Throws MissingNormals.
std::vector<Cluster> region_growing(const pointcloud::PointCloud& cloud, const std::vector<double>& curvature,
                                    const RegionGrowingParams& params = {});

struct DetectionResult {
  std::vector<bool> dynamic;     // per point
  std::vector<Cluster> clusters;  // with occupancy_probability filled
  std::vector<bool> cluster_dynamic;
};

/// p(c) = |members whose voxel is free| / |members|; clusters with
/// p(c) > prob_threshold mark all members dynamic.
DetectionResult detect_dynamic(const pointcloud::PointCloud& cloud, std::vector<Cluster> clusters,
                               const OccupancyGrid& grid, double prob_threshold = 0.5);
DetectionResult detect_dynamic(const pointcloud::PointCloud& cloud, std::vector<Cluster> clusters,
                               const VoxelSet& free_voxels, const OccupancyGrid& grid, double prob_threshold);

}  // namespace ltr::dynamic_detect
