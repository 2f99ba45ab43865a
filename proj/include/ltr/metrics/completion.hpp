#pragma once

#include <Eigen/Geometry>
#include <optional>

#include "ltr/dynamic_detect/occupancy.hpp"
#include "ltr/metrics/semantic.hpp"
#include "ltr/pointcloud/point_cloud.hpp"

namespace ltr::metrics {

struct CompletionOptions {
  double threshold = 0.2;  // meters
  /// Prediction points are only scored inside voxels this grid has seen.
  const dynamic_detect::OccupancyGrid* observed = nullptr;
  std::optional<Eigen::AlignedBox3d> region;
  /// Keep one point (the lowest index) per voxel of size threshold/2.
  bool voxel_dedup = true;
};

struct CompletionScores {
  double completeness = 0.0;
  std::optional<double> accuracy;  // absent when no prediction point is scored
  std::optional<double> f1;
  std::optional<SemanticScores> semantic;  // needs labels on both clouds
  std::size_t gt_points = 0;
  std::size_t pred_points = 0;
  std::size_t scored_pred_points = 0;
};

/// 2PR / (P + R); 0 when both are 0.
double f1_score(double precision, double recall);

/// Completeness weights gt points by their confidence (1 when absent). A gt
/// point counts as semantically correct iff it is complete and its nearest
/// prediction carries the same label. Throws InvalidArgument for threshold <= 0.
CompletionScores completion_metrics(const pointcloud::PointCloud& gt, const pointcloud::PointCloud& pred,
                                    const CompletionOptions& options = {});

/// One point per voxel, lowest index first; attributes are kept.
pointcloud::PointCloud voxel_dedup(const pointcloud::PointCloud& cloud, double voxel_size);

}  // namespace ltr::metrics
