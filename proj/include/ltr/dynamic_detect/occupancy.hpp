#pragma once

#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ltr/pointcloud/point_cloud.hpp"
#include "ltr/pointcloud/voxel_key.hpp"

namespace ltr::dynamic_detect {

using geometry::Vec3;
using pointcloud::VoxelKey;
using pointcloud::VoxelKeyHash;
using VoxelSet = std::unordered_set<VoxelKey, VoxelKeyHash>;

struct OccupancyParams {
  double voxel_size = 0.2;
  Vec3 origin = Vec3::Zero();
  double l_occ = 0.85;
  double l_free = -0.4;
  double p_min = -2.0;
  double p_max = 3.5;
};

/// Sparse clamped log-odds grid. A voxel that reaches p_min is absorbed there.
class OccupancyGrid {
 public:
  /// Throws InvalidArgument unless p_min < 0 < p_max, l_occ > 0 > l_free, voxel_size > 0.
  explicit OccupancyGrid(OccupancyParams params = {});

  const OccupancyParams& params() const { return params_; }
  VoxelKey key_of(const Vec3& p) const { return VoxelKey::of(p, params_.voxel_size, params_.origin); }

  /// One scan (world frame) from `sensor_origin`. Each voxel is updated at
  /// most once per scan: endpoint voxels get l_occ, voxels crossed by a ray
  /// before its endpoint voxel get l_free unless they also hold an endpoint.
  void integrate_scan(const Vec3& sensor_origin, const pointcloud::PointCloud& scan);

  /// Applies one increment with the absorbing-p_min rule.
  void update(const VoxelKey& key, double increment);

  /// Stored log-odds; absent voxels read as 0.
  double value(const VoxelKey& key) const;
  bool contains(const VoxelKey& key) const { return log_odds_.count(key) != 0; }
  std::size_t size() const { return log_odds_.size(); }
  const std::unordered_map<VoxelKey, double, VoxelKeyHash>& cells() const { return log_odds_; }

 private:
  OccupancyParams params_;
  std::unordered_map<VoxelKey, double, VoxelKeyHash> log_odds_;
};

/// Voxels visited by the segment from `from` to `to`, in order, ending with
/// the voxel of `to` (3D DDA).
std::vector<VoxelKey> traverse(const Vec3& from, const Vec3& to, double voxel_size,
                               const Vec3& origin = Vec3::Zero());

/// Voxels with log-odds <= threshold. Throws InvalidArgument for threshold > 0.
VoxelSet free_voxel_set(const OccupancyGrid& grid, double threshold);
inline VoxelSet free_voxel_set(const OccupancyGrid& grid) { return free_voxel_set(grid, grid.params().p_min); }

}  // namespace ltr::dynamic_detect
