#include <cmath>

#include "ltr/crf/fields.hpp"
#include "ltr/error.hpp"

namespace ltr::crf {

using geometry::BoundingPrimitive;
using geometry::ShapeKind;

void PixelField::validate() const {
  const auto p = static_cast<std::size_t>(size());
  const auto ps = p * labels;
  if (width <= 0 || height <= 0 || labels < 2) throw InvalidArgument("pixel field needs a positive size and >= 2 labels");
  if (colors.size() != p || admissible.size() != ps || probabilities.size() != ps)
    throw InvalidArgument("pixel field arrays do not match its size");
  for (std::size_t i = 0; i < p; ++i) {
    bool any = false;
    for (int s = 0; s < labels; ++s) any = any || admissible[i * labels + s];
    if (!any) throw InvalidArgument("pixel " + std::to_string(i) + " has no admissible label");
  }
}

int PointField::real_count() const {
  int n = 0;
  for (auto v : is_virtual) n += v ? 0 : 1;
  return n;
}

void PointField::validate() const {
  const auto m = projections.size();
  if (positions.size() != m || normal_z.size() != m || is_virtual.size() != m || source.size() != m ||
      admissible.size() != m * labels)
    throw InvalidArgument("point field arrays do not match its size");
}

std::vector<BoundingPrimitive> resolve_primitives(const std::vector<BoundingPrimitive>& all, double timestamp) {
  std::vector<BoundingPrimitive> out;
  for (const auto& b : all) {
    if (!b.dynamic) {
      out.push_back(b);
      continue;
    }
    if (auto pose = b.pose_at(timestamp)) {
      BoundingPrimitive r = b;
      r.pose = *pose;
      r.dynamic = false;
      r.dynamic_poses.clear();
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<std::uint8_t> build_pixel_constraints(const std::vector<BoundingPrimitive>& primitives,
                                                  const geometry::Pose& camera,
                                                  const geometry::CameraIntrinsics& intr, const LabelSpace& labels) {
  if (primitives.empty()) throw NoPrimitives("no primitives at this timestamp");
  intr.validate();
  std::vector<int> label_of(primitives.size());
  for (std::size_t k = 0; k < primitives.size(); ++k) label_of[k] = labels.label_of(primitives[k]);

  const int s_count = labels.size();
  std::vector<std::uint8_t> adm(static_cast<std::size_t>(intr.pixel_count()) * s_count, 0);
  const Vec3 origin = camera.translation();
  for (int y = 0; y < intr.height; ++y) {
    for (int x = 0; x < intr.width; ++x) {
      const Vec3 dir = camera.rotate(geometry::pixel_center_ray(intr, x, y));
      std::uint8_t* row = &adm[(static_cast<std::size_t>(y) * intr.width + x) * s_count];
      bool hit = false;
      for (std::size_t k = 0; k < primitives.size(); ++k) {
        if (label_of[k] < 0) continue;
        const BoundingPrimitive& b = primitives[k];
        const bool touches = b.shape == ShapeKind::GroundPolygon
                                 ? geometry::ray_hits_ground_surface(b, b.pose, origin, dir).has_value()
                                 : geometry::ray_intersects_primitive(b, b.pose, origin, dir).has_value();
        if (touches) {
          row[label_of[k]] = 1;
          hit = true;
        }
      }
      if (!hit) row[labels.sky()] = 1;
    }
  }
  return adm;
}

PointField build_point_constraints(const std::vector<BoundingPrimitive>& primitives,
                                   const pointcloud::PointCloud& cloud, const pointcloud::VisibilityMask& visibility,
                                   const std::vector<std::uint8_t>& pixel_admissible,
                                   const geometry::CameraIntrinsics& intr, const LabelSpace& labels) {
  const int s_count = labels.size();
  if (visibility.visible.size() != cloud.size()) throw InvalidArgument("visibility mask does not match the cloud");
  if (pixel_admissible.size() != static_cast<std::size_t>(intr.pixel_count()) * s_count)
    throw InvalidArgument("pixel constraints do not match the image");
  std::vector<int> label_of(primitives.size());
  for (std::size_t k = 0; k < primitives.size(); ++k) label_of[k] = labels.label_of(primitives[k]);

  PointField f;
  f.labels = s_count;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!visibility.visible[i]) continue;
    const Vec3& p = cloud.positions[i];
    f.positions.push_back(p);
    f.normal_z.push_back(cloud.has_normals() ? cloud.normals[i].z() : 0.0);
    f.projections.push_back(visibility.projection[i]);
    f.is_virtual.push_back(0);
    f.source.push_back(static_cast<std::int64_t>(i));
    const std::size_t base = f.admissible.size();
    f.admissible.resize(base + s_count, 0);
    f.admissible[base + labels.sky()] = 1;
    for (std::size_t k = 0; k < primitives.size(); ++k)
      if (label_of[k] >= 0 && geometry::point_in_primitive(primitives[k], p)) f.admissible[base + label_of[k]] = 1;
  }
  const int pixels = intr.pixel_count();
  for (int i = 0; i < pixels; ++i) {
    const std::uint8_t* row = &pixel_admissible[static_cast<std::size_t>(i) * s_count];
    bool sky_only = row[labels.sky()] != 0;
    for (int s = 0; s < s_count && sky_only; ++s)
      if (s != labels.sky() && row[s]) sky_only = false;
    if (!sky_only) continue;
    f.positions.push_back(Vec3::Zero());
    f.normal_z.push_back(0.0);
    f.projections.emplace_back(i % intr.width + 0.5, i / intr.width + 0.5);
    f.is_virtual.push_back(1);
    f.source.push_back(-1);
    const std::size_t base = f.admissible.size();
    f.admissible.resize(base + s_count, 0);
    f.admissible[base + labels.sky()] = 1;
  }
  return f;
}

}  // namespace ltr::crf
