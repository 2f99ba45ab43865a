#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ltr/geometry/pose.hpp"

namespace ltr::geometry {

enum class ShapeKind { Cuboid, Ellipsoid, GroundPolygon };

std::string to_string(ShapeKind kind);
ShapeKind shape_from_string(const std::string& name);

/// Extruded bird's-eye polygon. Vertices are (x, y) in the primitive's local
/// frame with a per-vertex surface height; the volume spans ±thickness around
/// the surface, which is linear over an ear-clipping triangulation.
struct GroundPolygon {
  std::vector<Vec2> vertices;
  std::vector<double> heights;
  double thickness = 0.0;
  /// Filled by validation: triangles as vertex-index triples.
  std::vector<std::array<int, 3>> triangles;
};

struct TimedPose {
  double timestamp = 0.0;
  Pose pose;
};

/// A coarse annotation volume carrying a semantic class and an instance id.
struct BoundingPrimitive {
  int id = 0;
  ShapeKind shape = ShapeKind::Cuboid;
  int semantic_class = 0;
  int instance_id = 0;
  Pose pose;
  /// Half extents (cuboid) or semi-axes (ellipsoid), meters.
  Vec3 extents = Vec3::Ones();
  GroundPolygon polygon;
  bool dynamic = false;
  std::vector<TimedPose> dynamic_poses;

  /// Checks every invariant and builds the polygon triangulation.
  /// Throws InvalidPrimitive.
  void validate();

  /// Exact-timestamp lookup in dynamic_poses (|Δt| <= tol).
  std::optional<Pose> pose_at(double timestamp, double tol = 1e-6) const;
  double first_timestamp() const;
  double last_timestamp() const;
};

BoundingPrimitive make_cuboid(int semantic_class, int instance_id, const Pose& pose,
                              const Vec3& half_extents);
BoundingPrimitive make_ellipsoid(int semantic_class, int instance_id, const Pose& pose,
                                 const Vec3& semi_axes);
BoundingPrimitive make_ground_polygon(int semantic_class, std::vector<Vec2> vertices,
                                      std::vector<double> heights, double thickness,
                                      const Pose& pose = Pose());

/// Containment at the primitive's own pose (boundary inclusive).
bool point_in_primitive(const BoundingPrimitive& b, const Vec3& p_world);
/// Containment with an explicitly resolved pose (dynamic primitives).
bool point_in_primitive(const BoundingPrimitive& b, const Pose& pose, const Vec3& p_world);

/// Smallest t >= 0 with origin + t·dir inside b (0 when the origin is inside).
std::optional<double> ray_intersects_primitive(const BoundingPrimitive& b, const Vec3& origin,
                                               const Vec3& dir);
std::optional<double> ray_intersects_primitive(const BoundingPrimitive& b, const Pose& pose,
                                               const Vec3& origin, const Vec3& dir);

/// First hit of the ray with the (non-extruded) polygon surface.
std::optional<double> ray_hits_ground_surface(const BoundingPrimitive& b, const Pose& pose,
                                              const Vec3& origin, const Vec3& dir);

// 2D polygon helpers, exposed for tests and ground annotation tooling.
namespace polygon {
/// Even-odd rule, boundary inclusive.
bool contains(const std::vector<Vec2>& poly, const Vec2& q);
double signed_area(const std::vector<Vec2>& poly);
bool is_simple(const std::vector<Vec2>& poly);
std::vector<std::array<int, 3>> triangulate(const std::vector<Vec2>& poly);
/// Linear height over the triangulation; nullopt outside the polygon.
std::optional<double> surface_height(const GroundPolygon& g, const Vec2& q);
}  // namespace polygon

}  // namespace ltr::geometry
