#include "ltr/dynamic_detect/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltr/error.hpp"

namespace ltr::dynamic_detect {

OccupancyGrid::OccupancyGrid(OccupancyParams params) : params_(params) {
  if (!(params_.voxel_size > 0.0)) throw InvalidArgument("voxel size must be positive");
  if (!(params_.p_min < 0.0 && params_.p_max > 0.0)) throw InvalidArgument("need p_min < 0 < p_max");
  if (!(params_.l_occ > 0.0 && params_.l_free < 0.0)) throw InvalidArgument("need l_occ > 0 > l_free");
}

double OccupancyGrid::value(const VoxelKey& key) const {
  auto it = log_odds_.find(key);
  return it == log_odds_.end() ? 0.0 : it->second;
}

void OccupancyGrid::update(const VoxelKey& key, double increment) {
  auto [it, inserted] = log_odds_.try_emplace(key, 0.0);
  double& v = it->second;
  if (v > params_.p_min) {
    v = std::clamp(v + increment, params_.p_min, params_.p_max);
  } else {
    v = params_.p_min;
  }
}

std::vector<VoxelKey> traverse(const Vec3& from, const Vec3& to, double voxel_size, const Vec3& origin) {
  const Vec3 a = (from - origin) / voxel_size;
  const Vec3 b = (to - origin) / voxel_size;
  const VoxelKey start = VoxelKey::of(from, voxel_size, origin);
  const VoxelKey end = VoxelKey::of(to, voxel_size, origin);
  std::vector<VoxelKey> out{start};
  if (start == end) return out;

  const Vec3 d = b - a;
  std::int64_t cur[3] = {start.x, start.y, start.z};
  const std::int64_t last[3] = {end.x, end.y, end.z};
  int step[3];
  double t_max[3], t_delta[3];
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (d[k] > 0) {
      step[k] = 1;
      t_max[k] = (static_cast<double>(cur[k] + 1) - a[k]) / d[k];
      t_delta[k] = 1.0 / d[k];
    } else if (d[k] < 0) {
      step[k] = -1;
      t_max[k] = (static_cast<double>(cur[k]) - a[k]) / d[k];
      t_delta[k] = -1.0 / d[k];
    } else {
      step[k] = 0;
      t_max[k] = inf;
      t_delta[k] = inf;
    }
  }
  // Bounded by the Manhattan distance between the end cells.
  std::int64_t remaining = 0;
  for (int k = 0; k < 3; ++k) remaining += std::abs(last[k] - cur[k]);
  while (remaining-- > 0) {
    int k = 0;
    if (t_max[1] < t_max[k]) k = 1;
    if (t_max[2] < t_max[k]) k = 2;
    cur[k] += step[k];
    t_max[k] += t_delta[k];
    out.push_back({cur[0], cur[1], cur[2]});
    if (cur[0] == last[0] && cur[1] == last[1] && cur[2] == last[2]) return out;
  }
  // Floating-point drift left us beside the end cell.
  if (!(out.back() == end)) out.push_back(end);
  return out;
}

void OccupancyGrid::integrate_scan(const Vec3& sensor_origin, const pointcloud::PointCloud& scan) {
  VoxelSet occupied, free;
  for (const Vec3& p : scan.positions) occupied.insert(key_of(p));
  for (const Vec3& p : scan.positions) {
    const auto cells = traverse(sensor_origin, p, params_.voxel_size, params_.origin);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      if (!occupied.count(cells[i])) free.insert(cells[i]);
    }
  }
  // Deterministic update order is irrelevant (one update per voxel), but keep
  // insertion into the map stable across runs.
  std::vector<VoxelKey> occ(occupied.begin(), occupied.end()), fr(free.begin(), free.end());
  std::sort(occ.begin(), occ.end());
  std::sort(fr.begin(), fr.end());
  for (const auto& k : occ) update(k, params_.l_occ);
  for (const auto& k : fr) update(k, params_.l_free);
}

VoxelSet free_voxel_set(const OccupancyGrid& grid, double threshold) {
  if (threshold > 0.0) throw InvalidArgument("free threshold must be <= 0");
  VoxelSet out;
  for (const auto& [k, v] : grid.cells())
    if (v <= threshold) out.insert(k);
  return out;
}

}  // namespace ltr::dynamic_detect
