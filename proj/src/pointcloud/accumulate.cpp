#include "ltr/pointcloud/accumulate.hpp"

#include <cmath>
#include <unordered_map>

#include "ltr/error.hpp"
#include "ltr/pointcloud/voxel_key.hpp"

namespace ltr::pointcloud {

namespace {

class DedupGrid {
 public:
  explicit DedupGrid(double radius) : radius_(radius), r2_(radius * radius) {}

  bool has_neighbor(const Vec3& p, const std::vector<Vec3>& kept) const {
    const VoxelKey c = VoxelKey::of(p, radius_);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(VoxelKey{c.x + dx, c.y + dy, c.z + dz});
          if (it == cells_.end()) continue;
          for (std::size_t idx : it->second) {
            if ((kept[idx] - p).squaredNorm() <= r2_) return true;
          }
        }
    return false;
  }

  void insert(const Vec3& p, std::size_t idx) { cells_[VoxelKey::of(p, radius_)].push_back(idx); }

 private:
  double radius_;
  double r2_;
  std::unordered_map<VoxelKey, std::vector<std::size_t>, VoxelKeyHash> cells_;
};

}  // namespace

PointCloud accumulate_static(const std::vector<StampedCloud>& frames,
                             const std::vector<BoundingPrimitive>& dynamic_primitives,
                             double dedup_radius) {
  if (!(dedup_radius > 0.0)) throw InvalidArgument("dedup radius must be positive");
  PointCloud out;
  DedupGrid grid(dedup_radius);
  for (const auto& frame : frames) {
    std::vector<std::pair<const BoundingPrimitive*, Pose>> active;
    for (const auto& b : dynamic_primitives) {
      if (auto pose = b.pose_at(frame.timestamp)) active.emplace_back(&b, *pose);
    }
    const PointCloud& src = frame.cloud;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const Vec3 p = frame.pose.transform(src.positions[i]);
      bool dynamic = false;
      for (const auto& [b, pose] : active) {
        if (geometry::point_in_primitive(*b, pose, p)) {
          dynamic = true;
          break;
        }
      }
      if (dynamic || grid.has_neighbor(p, out.positions)) continue;
      grid.insert(p, out.positions.size());
      out.positions.push_back(p);
      if (src.has_colors()) out.colors.push_back(src.colors[i]);
      if (src.has_normals()) out.normals.push_back(frame.pose.rotate(src.normals[i]));
      out.frame_index.push_back(frame.frame);
    }
  }
  if (out.colors.size() != out.positions.size()) out.colors.clear();
  if (out.normals.size() != out.positions.size()) out.normals.clear();
  return out;
}

PointCloud DynamicAccumulation::place(double timestamp) const {
  for (const auto& tp : placements) {
    if (std::abs(tp.timestamp - timestamp) <= 1e-6) return canonical.transformed(tp.pose);
  }
  throw MissingPose("no placement at the requested timestamp");
}

DynamicAccumulation accumulate_dynamic(const std::vector<StampedCloud>& frames,
                                       const BoundingPrimitive& primitive,
                                       const PoseResolver& resolver) {
  if (!primitive.dynamic) throw InvalidArgument("primitive is not dynamic");
  DynamicAccumulation out;
  for (const auto& frame : frames) {
    std::optional<Pose> pose = resolver ? resolver(frame.timestamp) : primitive.pose_at(frame.timestamp);
    if (!pose) throw MissingPose("primitive has no pose at frame timestamp");
    out.placements.push_back({frame.timestamp, *pose});
    const Pose world_to_object = pose->inverse();
    const PointCloud& src = frame.cloud;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const Vec3 p = frame.pose.transform(src.positions[i]);
      if (!geometry::point_in_primitive(primitive, *pose, p)) continue;
      out.canonical.positions.push_back(world_to_object.transform(p));
      if (src.has_colors()) out.canonical.colors.push_back(src.colors[i]);
      out.canonical.frame_index.push_back(frame.frame);
    }
  }
  if (out.canonical.colors.size() != out.canonical.positions.size()) out.canonical.colors.clear();
  return out;
}

}  // namespace ltr::pointcloud
