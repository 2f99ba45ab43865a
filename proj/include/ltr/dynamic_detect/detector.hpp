#pragma once

#include <optional>

#include "ltr/dynamic_detect/clusters.hpp"
#include "ltr/pointcloud/accumulate.hpp"

namespace ltr::dynamic_detect {

struct DetectorParams {
  OccupancyParams grid;
  RegionGrowingParams growing;
  int normal_neighbors = 10;
  double dedup_radius = 0.05;
  double prob_threshold = 0.5;
  std::optional<double> free_threshold;  // defaults to grid.p_min
};

struct DetectorOutput {
  pointcloud::PointCloud cloud;  // accumulated, world frame, with normals
  DetectionResult detection;
};

/// Fuses every scan into the grid (in order, sensor at the frame pose's
/// translation), accumulates the scans, segments them and votes per cluster.
DetectorOutput run_detector(const std::vector<pointcloud::StampedCloud>& frames, const DetectorParams& params = {});

}  // namespace ltr::dynamic_detect
