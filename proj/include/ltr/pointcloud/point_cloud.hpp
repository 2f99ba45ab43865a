#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ltr/geometry/pose.hpp"

namespace ltr::pointcloud {

using geometry::Pose;
using geometry::Vec2;
using geometry::Vec3;
using Color = std::array<std::uint8_t, 3>;

/// Structure-of-arrays point set. Optional attributes are either empty or
/// hold exactly one entry per point.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Color> colors;
  std::vector<Vec3> normals;
  std::vector<int> frame_index;
  std::vector<int> labels;
  std::vector<double> confidences;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool has_colors() const { return !colors.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_frame_index() const { return !frame_index.empty(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_confidences() const { return !confidences.empty(); }

  /// Throws InvalidArgument on length mismatches, non-unit normals or
  /// confidences outside [0, 1].
  void validate() const;

  /// Appends point `i` of `other`; attribute sets must be compatible.
  void push_from(const PointCloud& other, std::size_t i);
  /// Appends all points; attributes present in only one side are dropped.
  void append(const PointCloud& other);

  PointCloud subset(std::span<const std::size_t> indices) const;
  /// Positions and normals mapped through `pose`.
  PointCloud transformed(const Pose& pose) const;
};

}  // namespace ltr::pointcloud
