#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "ltr/geometry/pose.hpp"

namespace ltr::pointcloud {

struct VoxelKey {
  std::int64_t x = 0, y = 0, z = 0;

  static VoxelKey of(const geometry::Vec3& p, double size,
                     const geometry::Vec3& origin = geometry::Vec3::Zero()) {
    return {static_cast<std::int64_t>(std::floor((p.x() - origin.x()) / size)),
            static_cast<std::int64_t>(std::floor((p.y() - origin.y()) / size)),
            static_cast<std::int64_t>(std::floor((p.z() - origin.z()) / size))};
  }

  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  friend auto operator<=>(const VoxelKey&, const VoxelKey&) = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 73856093ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 19349663ULL;
    h ^= static_cast<std::uint64_t>(k.z) * 83492791ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

}  // namespace ltr::pointcloud
