#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ltr/geometry/pose.hpp"

namespace ltr::pointcloud {

using geometry::Vec3;

/// Static 3-d tree over a borrowed point array (implicit median layout).
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const std::vector<Vec3>& points);

  std::size_t size() const { return index_.size(); }

  /// Up to k nearest points as (index, squared distance), nearest first;
  /// ties resolved by lower index.
  std::vector<std::pair<std::size_t, double>> knn(const Vec3& q, std::size_t k) const;

  /// Nearest neighbour, or {npos, inf} on an empty tree.
  std::pair<std::size_t, double> nearest(const Vec3& q) const;

  /// All points with ‖p - q‖ <= radius, ascending index.
  std::vector<std::size_t> radius(const Vec3& q, double radius) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  void build(std::size_t lo, std::size_t hi, int depth);
  template <class Visitor>
  void search(std::size_t lo, std::size_t hi, int depth, const Vec3& q, Visitor& visit,
              double& bound2) const;

  const std::vector<Vec3>* points_ = nullptr;
  std::vector<std::size_t> index_;
};

}  // namespace ltr::pointcloud
