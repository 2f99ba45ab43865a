#include "ltr/pointcloud/point_cloud.hpp"

#include <cmath>

#include "ltr/error.hpp"

namespace ltr::pointcloud {

void PointCloud::validate() const {
  const std::size_t n = positions.size();
  auto check_len = [n](std::size_t m, const char* name) {
    if (m != 0 && m != n) throw InvalidArgument(std::string(name) + " length mismatch");
  };
  check_len(colors.size(), "colors");
  check_len(normals.size(), "normals");
  check_len(frame_index.size(), "frame_index");
  check_len(labels.size(), "labels");
  check_len(confidences.size(), "confidences");
  for (const auto& nrm : normals) {
    if (std::abs(nrm.norm() - 1.0) > 1e-6) throw InvalidArgument("normal is not unit length");
  }
  for (double c : confidences) {
    if (!(c >= 0.0 && c <= 1.0)) throw InvalidArgument("confidence outside [0,1]");
  }
}

void PointCloud::push_from(const PointCloud& other, std::size_t i) {
  const bool first = positions.empty();
  positions.push_back(other.positions[i]);
  auto copy = [&](auto& dst, const auto& src) {
    if (src.empty()) return;
    if (first || dst.size() + 1 == positions.size()) dst.push_back(src[i]);
  };
  copy(colors, other.colors);
  copy(normals, other.normals);
  copy(frame_index, other.frame_index);
  copy(labels, other.labels);
  copy(confidences, other.confidences);
}

void PointCloud::append(const PointCloud& other) {
  const bool was_empty = positions.empty();
  auto merge = [&](auto& dst, const auto& src) {
    if (was_empty) {
      dst = src;
    } else if (!dst.empty() && !src.empty()) {
      dst.insert(dst.end(), src.begin(), src.end());
    } else {
      dst.clear();
    }
  };
  merge(colors, other.colors);
  merge(normals, other.normals);
  merge(frame_index, other.frame_index);
  merge(labels, other.labels);
  merge(confidences, other.confidences);
  positions.insert(positions.end(), other.positions.begin(), other.positions.end());
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  PointCloud out;
  out.positions.reserve(indices.size());
  for (std::size_t i : indices) {
    out.positions.push_back(positions[i]);
    if (has_colors()) out.colors.push_back(colors[i]);
    if (has_normals()) out.normals.push_back(normals[i]);
    if (has_frame_index()) out.frame_index.push_back(frame_index[i]);
    if (has_labels()) out.labels.push_back(labels[i]);
    if (has_confidences()) out.confidences.push_back(confidences[i]);
  }
  return out;
}

PointCloud PointCloud::transformed(const Pose& pose) const {
  PointCloud out = *this;
  for (auto& p : out.positions) p = pose.transform(p);
  for (auto& n : out.normals) n = pose.rotate(n);
  return out;
}

}  // namespace ltr::pointcloud
