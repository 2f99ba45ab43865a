#include "ltr/geometry/primitive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltr/error.hpp"

namespace ltr::geometry {

namespace {

constexpr double kEps = 1e-12;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Vec2& q, const Vec2& a, const Vec2& b, double tol) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (q - a).norm() <= tol;
  const double u = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
  return (a + u * ab - q).norm() <= tol;
}

// Proper or touching intersection of segments p1p2 and q1q2.
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross2(q2 - q1, p1 - q1);
  const double d2 = cross2(q2 - q1, p2 - q1);
  const double d3 = cross2(p2 - p1, q1 - p1);
  const double d4 = cross2(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  const double tol = 1e-12;
  return (std::abs(d1) <= tol && on_segment(p1, q1, q2, tol)) ||
         (std::abs(d2) <= tol && on_segment(p2, q1, q2, tol)) ||
         (std::abs(d3) <= tol && on_segment(q1, p1, p2, tol)) ||
         (std::abs(d4) <= tol && on_segment(q2, p1, p2, tol));
}

bool point_in_triangle(const Vec2& q, const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d1 = cross2(b - a, q - a);
  const double d2 = cross2(c - b, q - b);
  const double d3 = cross2(a - c, q - c);
  const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(has_neg && has_pos);
}

// Möller–Trumbore, inclusive edges.
std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                   const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-15) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = o - a;
  const double u = s.dot(p) * inv;
  if (u < -kEps || u > 1.0 + kEps) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = d.dot(q) * inv;
  if (v < -kEps || u + v > 1.0 + kEps) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t < 0.0) return std::nullopt;
  return t;
}

void keep_min(std::optional<double>& best, std::optional<double> t) {
  if (t && (!best || *t < *best)) best = t;
}

std::optional<double> ray_cuboid(const Vec3& o, const Vec3& d, const Vec3& e) {
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (std::abs(o[k]) > e[k]) return std::nullopt;
      continue;
    }
    double t1 = (-e[k] - o[k]) / d[k];
    double t2 = (e[k] - o[k]) / d[k];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
  }
  if (tmax < std::max(tmin, 0.0)) return std::nullopt;
  return std::max(tmin, 0.0);
}

std::optional<double> ray_ellipsoid(const Vec3& o, const Vec3& d, const Vec3& axes) {
  const Vec3 os = o.cwiseQuotient(axes);
  const Vec3 ds = d.cwiseQuotient(axes);
  const double a = ds.squaredNorm();
  const double b = 2.0 * os.dot(ds);
  const double c = os.squaredNorm() - 1.0;
  if (c <= 0.0) return 0.0;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double t1 = q / a;
  double t2 = q != 0.0 ? c / q : t1;
  if (t1 > t2) std::swap(t1, t2);
  if (t1 >= 0.0) return t1;
  // The origin is outside, so both roots share a sign.
  return std::nullopt;
}

std::optional<double> ray_prism(const GroundPolygon& g, const Vec3& o, const Vec3& d) {
  const Vec2 oxy = o.head<2>();
  if (polygon::contains(g.vertices, oxy)) {
    if (auto h = polygon::surface_height(g, oxy); h && std::abs(o.z() - *h) <= g.thickness) {
      return 0.0;
    }
  }
  std::optional<double> best;
  for (const auto& tri : g.triangles) {
    for (double offset : {g.thickness, -g.thickness}) {
      const Vec3 a(g.vertices[tri[0]].x(), g.vertices[tri[0]].y(), g.heights[tri[0]] + offset);
      const Vec3 b(g.vertices[tri[1]].x(), g.vertices[tri[1]].y(), g.heights[tri[1]] + offset);
      const Vec3 c(g.vertices[tri[2]].x(), g.vertices[tri[2]].y(), g.heights[tri[2]] + offset);
      keep_min(best, ray_triangle(o, d, a, b, c));
    }
  }
  const Vec2 dxy = d.head<2>();
  const std::size_t n = g.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Vec2& a = g.vertices[i];
    const Vec2& b = g.vertices[j];
    const Vec2 ab = b - a;
    const double denom = cross2(dxy, ab);
    if (std::abs(denom) < 1e-15) continue;
    const Vec2 ao = a - oxy;
    const double t = cross2(ao, ab) / denom;
    const double u = cross2(ao, dxy) / denom;
    if (t < 0.0 || u < -kEps || u > 1.0 + kEps) continue;
    const double h = g.heights[i] + std::clamp(u, 0.0, 1.0) * (g.heights[j] - g.heights[i]);
    const double z = o.z() + t * d.z();
    if (std::abs(z - h) <= g.thickness + 1e-12) keep_min(best, t);
  }
  return best;
}

}  // namespace

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Cuboid: return "cuboid";
    case ShapeKind::Ellipsoid: return "ellipsoid";
    case ShapeKind::GroundPolygon: return "ground_polygon";
  }
  return "cuboid";
}

ShapeKind shape_from_string(const std::string& name) {
  if (name == "cuboid") return ShapeKind::Cuboid;
  if (name == "ellipsoid") return ShapeKind::Ellipsoid;
  if (name == "ground_polygon") return ShapeKind::GroundPolygon;
  throw InvalidPrimitive("unknown shape '" + name + "'");
}

namespace polygon {

double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) a += cross2(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

bool contains(const std::vector<Vec2>& poly, const Vec2& q) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(q, poly[i], poly[(i + 1) % n], 1e-12)) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (q.x() < x) inside = !inside;
    }
  }
  return inside;
}

bool is_simple(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

std::vector<std::array<int, 3>> triangulate(const std::vector<Vec2>& poly) {
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  if (signed_area(poly) < 0) std::reverse(idx.begin(), idx.end());

  std::vector<std::array<int, 3>> tris;
  std::size_t guard = 0;
  while (idx.size() > 3 && guard++ < 10 * poly.size() * poly.size()) {
    bool clipped = false;
    const std::size_t m = idx.size();
    for (std::size_t k = 0; k < m; ++k) {
      const int ip = idx[(k + m - 1) % m], ic = idx[k], in = idx[(k + 1) % m];
      const Vec2 &a = poly[ip], &b = poly[ic], &c = poly[in];
      if (cross2(b - a, c - b) <= 0.0) continue;  // reflex or degenerate
      bool empty = true;
      for (int other : idx) {
        if (other == ip || other == ic || other == in) continue;
        if (point_in_triangle(poly[other], a, b, c)) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      tris.push_back({ip, ic, in});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
      break;
    }
    if (!clipped) break;
  }
  if (idx.size() == 3) tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

std::optional<double> surface_height(const GroundPolygon& g, const Vec2& q) {
  if (!contains(g.vertices, q)) return std::nullopt;
  double best_dist = std::numeric_limits<double>::infinity();
  double best_h = 0.0;
  for (const auto& t : g.triangles) {
    const Vec2 &a = g.vertices[t[0]], &b = g.vertices[t[1]], &c = g.vertices[t[2]];
    const double area = cross2(b - a, c - a);
    if (area == 0.0) continue;
    double l1 = cross2(c - b, q - b) / area;
    double l2 = cross2(a - c, q - c) / area;
    double l3 = 1.0 - l1 - l2;
    const double outside = std::max({-l1, -l2, -l3, 0.0});
    if (outside < best_dist) {
      best_dist = outside;
      // Clamp so points that fall just outside every triangle (rounding on
      // shared edges) still interpolate within the nearest one.
      l1 = std::max(l1, 0.0);
      l2 = std::max(l2, 0.0);
      l3 = std::max(l3, 0.0);
      const double s = l1 + l2 + l3;
      best_h = (l1 * g.heights[t[0]] + l2 * g.heights[t[1]] + l3 * g.heights[t[2]]) / s;
      if (outside == 0.0) break;
    }
  }
  return best_h;
}

}  // namespace polygon

void BoundingPrimitive::validate() {
  switch (shape) {
    case ShapeKind::Cuboid:
    case ShapeKind::Ellipsoid:
      if (!(extents.array() > 0.0).all() || !extents.allFinite()) {
        throw InvalidPrimitive("extents must be strictly positive");
      }
      break;
    case ShapeKind::GroundPolygon: {
      auto& g = polygon;
      if (g.vertices.size() < 3) throw InvalidPrimitive("polygon needs at least 3 vertices");
      if (g.heights.size() != g.vertices.size()) {
        throw InvalidPrimitive("one height per polygon vertex required");
      }
      if (!(g.thickness > 0.0)) throw InvalidPrimitive("thickness must be positive");
      if (std::abs(polygon::signed_area(g.vertices)) < 1e-12) {
        throw InvalidPrimitive("polygon vertices are collinear");
      }
      if (!polygon::is_simple(g.vertices)) throw InvalidPrimitive("polygon self-intersects");
      g.triangles = polygon::triangulate(g.vertices);
      if (g.triangles.size() != g.vertices.size() - 2) {
        throw InvalidPrimitive("polygon triangulation failed");
      }
      break;
    }
  }
  if (instance_id < 0) throw InvalidPrimitive("instance id must be >= 0");
  if (dynamic) {
    if (dynamic_poses.empty()) throw InvalidPrimitive("dynamic primitive without poses");
    for (std::size_t i = 1; i < dynamic_poses.size(); ++i) {
      if (!(dynamic_poses[i].timestamp > dynamic_poses[i - 1].timestamp)) {
        throw InvalidPrimitive("dynamic pose timestamps must be strictly increasing");
      }
    }
  }
}

std::optional<Pose> BoundingPrimitive::pose_at(double timestamp, double tol) const {
  if (!dynamic) return pose;
  auto it = std::lower_bound(dynamic_poses.begin(), dynamic_poses.end(), timestamp - tol,
                             [](const TimedPose& tp, double t) { return tp.timestamp < t; });
  if (it != dynamic_poses.end() && std::abs(it->timestamp - timestamp) <= tol) return it->pose;
  return std::nullopt;
}

double BoundingPrimitive::first_timestamp() const {
  return dynamic_poses.empty() ? 0.0 : dynamic_poses.front().timestamp;
}
double BoundingPrimitive::last_timestamp() const {
  return dynamic_poses.empty() ? 0.0 : dynamic_poses.back().timestamp;
}

BoundingPrimitive make_cuboid(int semantic_class, int instance_id, const Pose& pose,
                              const Vec3& half_extents) {
  BoundingPrimitive b;
  b.shape = ShapeKind::Cuboid;
  b.semantic_class = semantic_class;
  b.instance_id = instance_id;
  b.pose = pose;
  b.extents = half_extents;
  b.validate();
  return b;
}

BoundingPrimitive make_ellipsoid(int semantic_class, int instance_id, const Pose& pose,
                                 const Vec3& semi_axes) {
  BoundingPrimitive b = make_cuboid(semantic_class, instance_id, pose, semi_axes);
  b.shape = ShapeKind::Ellipsoid;
  return b;
}

BoundingPrimitive make_ground_polygon(int semantic_class, std::vector<Vec2> vertices,
                                      std::vector<double> heights, double thickness,
                                      const Pose& pose) {
  BoundingPrimitive b;
  b.shape = ShapeKind::GroundPolygon;
  b.semantic_class = semantic_class;
  b.pose = pose;
  b.polygon.vertices = std::move(vertices);
  b.polygon.heights = std::move(heights);
  b.polygon.thickness = thickness;
  b.validate();
  return b;
}

bool point_in_primitive(const BoundingPrimitive& b, const Vec3& p_world) {
  return point_in_primitive(b, b.pose, p_world);
}

bool point_in_primitive(const BoundingPrimitive& b, const Pose& pose, const Vec3& p_world) {
  const Vec3 local = pose.inverse_transform(p_world);
  switch (b.shape) {
    case ShapeKind::Cuboid:
      return (local.cwiseAbs().array() <= b.extents.array()).all();
    case ShapeKind::Ellipsoid:
      return local.cwiseQuotient(b.extents).squaredNorm() <= 1.0;
    case ShapeKind::GroundPolygon: {
      const auto h = polygon::surface_height(b.polygon, local.head<2>());
      return h && std::abs(local.z() - *h) <= b.polygon.thickness;
    }
  }
  return false;
}

std::optional<double> ray_intersects_primitive(const BoundingPrimitive& b, const Vec3& origin,
                                               const Vec3& dir) {
  return ray_intersects_primitive(b, b.pose, origin, dir);
}

std::optional<double> ray_intersects_primitive(const BoundingPrimitive& b, const Pose& pose,
                                               const Vec3& origin, const Vec3& dir) {
  const Vec3 o = pose.inverse_transform(origin);
  const Vec3 d = pose.rotation().transpose() * dir;
  switch (b.shape) {
    case ShapeKind::Cuboid: return ray_cuboid(o, d, b.extents);
    case ShapeKind::Ellipsoid: return ray_ellipsoid(o, d, b.extents);
    case ShapeKind::GroundPolygon: return ray_prism(b.polygon, o, d);
  }
  return std::nullopt;
}

std::optional<double> ray_hits_ground_surface(const BoundingPrimitive& b, const Pose& pose,
                                              const Vec3& origin, const Vec3& dir) {
  if (b.shape != ShapeKind::GroundPolygon) return std::nullopt;
  const Vec3 o = pose.inverse_transform(origin);
  const Vec3 d = pose.rotation().transpose() * dir;
  std::optional<double> best;
  const auto& g = b.polygon;
  for (const auto& tri : g.triangles) {
    const Vec3 a(g.vertices[tri[0]].x(), g.vertices[tri[0]].y(), g.heights[tri[0]]);
    const Vec3 bb(g.vertices[tri[1]].x(), g.vertices[tri[1]].y(), g.heights[tri[1]]);
    const Vec3 c(g.vertices[tri[2]].x(), g.vertices[tri[2]].y(), g.heights[tri[2]]);
    keep_min(best, ray_triangle(o, d, a, bb, c));
  }
  return best;
}

}  // namespace ltr::geometry
