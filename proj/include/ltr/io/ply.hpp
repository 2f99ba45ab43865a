#pragma once

#include <string>
#include <vector>

#include "ltr/pointcloud/point_cloud.hpp"

namespace ltr::io {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

/// Per-vertex property outside the known attribute set (e.g. `dynamic`).
struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  std::vector<double> values;
};

struct PlyData {
  pointcloud::PointCloud cloud;
  std::vector<PlyProperty> extra;

  const PlyProperty* find(const std::string& name) const;
};

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Known properties: x y z, red green blue, nx ny nz, frame, label, confidence.
/// Throws IoError / FormatError.
PlyData read_ply(const std::string& path);
void write_ply(const std::string& path, const pointcloud::PointCloud& cloud,
               const std::vector<PlyProperty>& extra = {},
               PlyFormat format = PlyFormat::BinaryLittleEndian);

}  // namespace ltr::io
