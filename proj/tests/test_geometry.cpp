#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ltr/error.hpp"
#include "ltr/geometry/camera.hpp"
#include "ltr/geometry/geo.hpp"
#include "ltr/geometry/ground_height.hpp"
#include "ltr/geometry/primitive.hpp"

using namespace ltr;
using namespace ltr::geometry;

namespace {

CameraIntrinsics intr100() { return {100, 100, 50, 50, 100, 100}; }

Pose random_pose(std::mt19937& rng, double span = 10.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-span, span);
  return Pose::from_quaternion(Eigen::Vector4d(n(rng), n(rng), n(rng), n(rng)), Vec3(u(rng), u(rng), u(rng)));
}

}  // namespace

TEST(Camera, ProjectOnAxis) {
  const Vec2 uv = project_point(intr100(), Vec3(0, 0, 2));
  EXPECT_DOUBLE_EQ(uv.x(), 50.0);
  EXPECT_DOUBLE_EQ(uv.y(), 50.0);
}

TEST(Camera, ProjectOffAxis) {
  const Vec2 uv = project_point(intr100(), Vec3(1, 0, 2));
  EXPECT_DOUBLE_EQ(uv.x(), 100.0);
  EXPECT_DOUBLE_EQ(uv.y(), 50.0);
}

TEST(Camera, BehindCameraThrows) {
  EXPECT_THROW(project_point(intr100(), Vec3(0, 0, -1)), PointBehindCamera);
  EXPECT_THROW(project_point(intr100(), Vec3(0, 0, 0)), PointBehindCamera);
}

TEST(Camera, PixelRayReprojects) {
  const auto intr = intr100();
  const Vec3 d = pixel_center_ray(intr, 13, 71);
  EXPECT_NEAR(d.norm(), 1.0, 1e-12);
  const Vec2 uv = project_point(intr, d * 7.0);
  EXPECT_NEAR(uv.x(), 13.5, 1e-9);
  EXPECT_NEAR(uv.y(), 71.5, 1e-9);
}

TEST(Pose, RejectsNonOrthonormal) {
  Mat3 r = Mat3::Identity();
  r(0, 0) = 1.01;
  EXPECT_THROW(Pose(r, Vec3::Zero()), InvalidPose);
  EXPECT_THROW(Pose(-Mat3::Identity(), Vec3::Zero()), InvalidPose);
}

TEST(Pose, ComposeWithInverseIsIdentity) {
  std::mt19937 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Pose p = random_pose(rng);
    const Pose id = p * p.inverse();
    EXPECT_LT((id.rotation() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(id.translation().cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Pose, QuaternionRoundTrip) {
  std::mt19937 rng(2);
  for (int i = 0; i < 20; ++i) {
    const Pose p = random_pose(rng);
    const Pose q = Pose::from_quaternion(p.quaternion(), p.translation());
    EXPECT_LT(rotation_angle_between(p.rotation(), q.rotation()), 1e-9);
  }
}

TEST(Primitive, CuboidContainment) {
  const auto b = make_cuboid(26, 1, Pose(), Vec3::Constant(0.5));
  EXPECT_TRUE(point_in_primitive(b, Vec3(0, 0, 0)));
  EXPECT_FALSE(point_in_primitive(b, Vec3(0.6, 0, 0)));
  EXPECT_TRUE(point_in_primitive(b, Vec3(0.5, 0.5, -0.5)));
}

TEST(Primitive, EllipsoidBoundaryInclusive) {
  const auto b = make_ellipsoid(21, 0, Pose(), Vec3(1, 2, 3));
  EXPECT_TRUE(point_in_primitive(b, Vec3(0, 2, 0)));
  EXPECT_FALSE(point_in_primitive(b, Vec3(0, 2.001, 0)));
}

TEST(Primitive, InvalidExtentsRejected) {
  EXPECT_THROW(make_cuboid(26, 1, Pose(), Vec3(1, 0, 1)), InvalidPrimitive);
  EXPECT_THROW(make_ground_polygon(7, {{0, 0}, {1, 1}, {2, 2}}, {0, 0, 0}, 0.5), InvalidPrimitive);
  EXPECT_THROW(make_ground_polygon(7, {{0, 0}, {1, 1}, {1, 0}, {0, 1}}, {0, 0, 0, 0}, 0.5), InvalidPrimitive);
}

TEST(Primitive, RayHitsCuboid) {
  const auto b = make_cuboid(26, 1, Pose::from_translation(Vec3(0, 0, 5)), Vec3::Ones());
  const auto t = ray_intersects_primitive(b, Vec3::Zero(), Vec3::UnitZ());
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 4.0, 1e-12);
  const auto miss = make_cuboid(26, 1, Pose::from_translation(Vec3(10, 0, 5)), Vec3::Ones());
  EXPECT_FALSE(ray_intersects_primitive(miss, Vec3::Zero(), Vec3::UnitZ()).has_value());
}

TEST(Primitive, RayHitsSphere) {
  const auto b = make_ellipsoid(21, 0, Pose::from_translation(Vec3(0, 0, 3)), Vec3::Ones());
  const auto t = ray_intersects_primitive(b, Vec3::Zero(), Vec3::UnitZ());
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 2.0, 1e-12);
}

TEST(Primitive, RayHitsGroundPrismFromAbove) {
  const auto b = make_ground_polygon(7, {{-5, -5}, {5, -5}, {5, 5}, {-5, 5}}, {0, 0, 0, 0}, 0.2);
  const auto t = ray_intersects_primitive(b, Vec3(0, 0, 2), -Vec3::UnitZ());
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 1.8, 1e-12);
  const auto s = ray_hits_ground_surface(b, b.pose, Vec3(0, 0, 2), -Vec3::UnitZ());
  ASSERT_TRUE(s.has_value());
  EXPECT_NEAR(*s, 2.0, 1e-12);
}

TEST(Primitive, GroundPolygonSlopedHeight) {
  const auto b = make_ground_polygon(7, {{0, 0}, {10, 0}, {10, 10}, {0, 10}}, {0, 1, 1, 0}, 0.1);
  EXPECT_TRUE(point_in_primitive(b, Vec3(5, 5, 0.5)));
  EXPECT_TRUE(point_in_primitive(b, Vec3(5, 5, 0.6)));
  EXPECT_FALSE(point_in_primitive(b, Vec3(5, 5, 0.65)));
  EXPECT_FALSE(point_in_primitive(b, Vec3(11, 5, 1.0)));
}

TEST(Polygon, EvenOddConcave) {
  const std::vector<Vec2> u = {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
  EXPECT_TRUE(polygon::contains(u, Vec2(0.5, 2)));
  EXPECT_FALSE(polygon::contains(u, Vec2(1.5, 2)));
  EXPECT_TRUE(polygon::contains(u, Vec2(1.5, 1)));  // on edge
  EXPECT_EQ(polygon::triangulate(u).size(), u.size() - 2);
}

TEST(PrimitiveProperty, ContainmentInvariantUnderRigidTransform) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Pose base = random_pose(rng);
    const Pose g = random_pose(rng);
    const std::vector<BoundingPrimitive> prims = {
        make_cuboid(26, 1, base, Vec3(1.0, 0.7, 1.3)),
        make_ellipsoid(21, 0, base, Vec3(1.2, 0.8, 1.5)),
        make_ground_polygon(7, {{-1.5, -1}, {1.5, -1.2}, {1, 1.4}, {-1, 1}}, {0.1, -0.2, 0.3, 0.0}, 0.5, base)};
    for (const auto& b : prims) {
      BoundingPrimitive moved = b;
      moved.pose = g * b.pose;
      const Vec3 local(u(rng), u(rng), u(rng));
      const Vec3 p = b.pose.transform(local);
      EXPECT_EQ(point_in_primitive(b, p), point_in_primitive(moved, g.transform(p)));
    }
  }
}

TEST(PrimitiveProperty, RayEntryPointIsContained) {
  std::mt19937 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  int hits = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Pose pose = random_pose(rng, 2.0);
    const std::vector<BoundingPrimitive> prims = {
        make_cuboid(26, 1, pose, Vec3(1.0, 2.0, 1.5)), make_ellipsoid(21, 0, pose, Vec3(2.0, 1.0, 1.5)),
        make_ground_polygon(7, {{-3, -3}, {3, -2}, {2, 3}, {-2, 2}}, {0.5, -0.5, 0.2, 0.0}, 0.6, pose)};
    const Vec3 o(u(rng), u(rng), u(rng));
    for (const auto& b : prims) {
      // Aim roughly at the primitive so a fair share of rays hit.
      const Vec3 d = (pose.translation() + Vec3(n(rng), n(rng), n(rng)) - o).normalized();
      if (const auto t = ray_intersects_primitive(b, o, d)) {
        ++hits;
        const Vec3 p = o + (*t + 1e-9) * d;
        const Vec3 q = o + *t * d;
        EXPECT_TRUE(point_in_primitive(b, p) || point_in_primitive(b, q)) << to_string(b.shape) << " t=" << *t;
      }
    }
  }
  EXPECT_GT(hits, 100);
}

TEST(Geo, OriginMapsToZero) {
  const GeoCoordinate o{48.78, 8.99, 120.0};
  const Vec3 p = geo_to_local(o, o);
  EXPECT_NEAR(p.x(), 0.0, 1e-9);
  EXPECT_NEAR(p.y(), 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(p.z(), 120.0);
}

TEST(Geo, MilliradianEastAtEquator) {
  const GeoCoordinate o{0.0, 10.0, 0.0};
  const GeoCoordinate g{0.0, 10.0 + 1e-3 * 180.0 / std::numbers::pi, 0.0};
  const Vec3 p = geo_to_local(g, o);
  EXPECT_NEAR(p.x(), 6378.137, 1e-6);
  EXPECT_NEAR(p.y(), 0.0, 1e-9);
}

TEST(Geo, PoleThrows) {
  EXPECT_THROW(geo_to_local({90.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), PoleSingularity);
  EXPECT_THROW(geo_to_local({91.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), InvalidArgument);
}

TEST(GeoProperty, RoundTripAndMonotone) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-179.0, 179.0), d(-0.05, 0.05);
  for (int i = 0; i < 200; ++i) {
    const GeoCoordinate o{lat(rng), lon(rng), 10.0};
    const GeoCoordinate g{o.latitude + d(rng), o.longitude + d(rng), 37.5};
    const GeoCoordinate back = local_to_geo(geo_to_local(g, o), o);
    EXPECT_NEAR(back.latitude, g.latitude, 1e-9);
    EXPECT_NEAR(back.longitude, g.longitude, 1e-9);
    EXPECT_NEAR(back.altitude, g.altitude, 1e-9);
    GeoCoordinate east = g;
    east.longitude += 1e-4;
    EXPECT_GT(geo_to_local(east, o).x(), geo_to_local(g, o).x());
  }
}

TEST(GroundHeight, FlatCloud) {
  pointcloud::PointCloud cloud;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) cloud.positions.emplace_back(0.5 * i, 0.5 * j, 0.0);
  const std::vector<Pose> cams = {Pose::from_translation(Vec3(0, 0, 1.65))};
  const auto z = estimate_ground_heights({{1, 1}, {-3, 2}, {4, -4}}, cams, cloud);
  for (double h : z) EXPECT_EQ(h, 0.0);
}

TEST(GroundHeight, NearestLayerWins) {
  pointcloud::PointCloud cloud;
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j) cloud.positions.emplace_back(0.2 * i, 0.2 * j, 0.0);
  for (int i = -5; i <= 5; ++i) cloud.positions.emplace_back(20.0 + i, 0.0, 4.0);
  const std::vector<Pose> cams = {Pose::from_translation(Vec3(0, 0, 1.65))};
  EXPECT_EQ(estimate_ground_heights({{0, 0}}, cams, cloud)[0], 0.0);
}

TEST(GroundHeight, EmptyRadiusThrows) {
  pointcloud::PointCloud cloud;
  cloud.positions.emplace_back(100, 100, 0);
  const std::vector<Pose> cams = {Pose::from_translation(Vec3(0, 0, 1.65))};
  EXPECT_THROW(estimate_ground_heights({{0, 0}}, cams, cloud), EmptyNeighborhood);
}

TEST(GroundHeightProperty, TiltedPlaneExact) {
  // The 3x3 grid block around each vertex is its 9-neighbourhood; its
  // heights are symmetric about the vertex height, so the median is exact.
  pointcloud::PointCloud cloud;
  auto plane = [](double x, double y) { return 0.5 + 0.02 * x + 0.01 * y; };
  for (int i = -40; i <= 40; ++i)
    for (int j = -40; j <= 40; ++j) cloud.positions.emplace_back(0.25 * i, 0.25 * j, plane(0.25 * i, 0.25 * j));
  const std::vector<Pose> cams = {Pose::from_translation(Vec3(0, 0, 2.0))};
  const auto z = estimate_ground_heights({{2.0, 1.0}, {-3.0, -4.0}}, cams, cloud, {9, 5.0});
  EXPECT_DOUBLE_EQ(z[0], plane(2.0, 1.0));
  EXPECT_DOUBLE_EQ(z[1], plane(-3.0, -4.0));
}
