#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ltr/error.hpp"
#include "ltr/pointcloud/accumulate.hpp"
#include "ltr/pointcloud/kdtree.hpp"
#include "ltr/pointcloud/normals.hpp"
#include "ltr/pointcloud/visibility.hpp"

using namespace ltr;
using namespace ltr::pointcloud;
using geometry::CameraIntrinsics;

namespace {

PointCloud cloud_of(std::vector<Vec3> pts) {
  PointCloud c;
  c.positions = std::move(pts);
  return c;
}

BoundingPrimitive moving_box() {
  BoundingPrimitive b = geometry::make_cuboid(26, 7, Pose(), Vec3::Constant(0.5));
  b.dynamic = true;
  b.dynamic_poses = {{0.0, Pose::from_translation(Vec3(0, 0, 0))},
                     {1.0, Pose(geometry::axis_angle(Vec3::UnitZ(), 0.4), Vec3(3, 1, 0))}};
  b.validate();
  return b;
}

}  // namespace

TEST(KdTree, MatchesBruteForce) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> pts(500);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  KdTree tree(pts);
  for (int q = 0; q < 50; ++q) {
    const Vec3 x(u(rng), u(rng), u(rng));
    std::vector<std::pair<double, std::size_t>> brute;
    for (std::size_t i = 0; i < pts.size(); ++i) brute.emplace_back((pts[i] - x).squaredNorm(), i);
    std::sort(brute.begin(), brute.end());
    const auto knn = tree.knn(x, 8);
    ASSERT_EQ(knn.size(), 8u);
    for (int k = 0; k < 8; ++k) EXPECT_EQ(knn[k].first, brute[k].second);
    EXPECT_EQ(tree.nearest(x).first, brute[0].second);
    std::vector<std::size_t> in_radius;
    for (const auto& [d2, i] : brute)
      if (d2 <= 0.3 * 0.3) in_radius.push_back(i);
    std::sort(in_radius.begin(), in_radius.end());
    EXPECT_EQ(tree.radius(x, 0.3), in_radius);
  }
}

TEST(AccumulateStatic, IdenticalFramesDeduplicate) {
  const std::vector<StampedCloud> frames = {{Pose(), cloud_of({Vec3(1, 2, 3)}), 0.0, 0},
                                            {Pose(), cloud_of({Vec3(1, 2, 3)}), 1.0, 1}};
  const auto out = accumulate_static(frames, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.frame_index[0], 0);
}

TEST(AccumulateStatic, SeparatedPointsKept) {
  const std::vector<StampedCloud> frames = {{Pose(), cloud_of({Vec3(0, 0, 0), Vec3(0.06, 0, 0)}), 0.0, 0}};
  EXPECT_EQ(accumulate_static(frames, {}, 0.05).size(), 2u);
}

TEST(AccumulateStatic, DynamicPointExcluded) {
  const auto box = moving_box();
  // At t=1 the box has moved to (3,1,0): the origin point is static there.
  const std::vector<StampedCloud> frames = {{Pose(), cloud_of({Vec3(0, 0, 0), Vec3(5, 5, 5)}), 0.0, 0},
                                            {Pose(), cloud_of({Vec3(0, 0, 0.2), Vec3(3, 1, 0)}), 1.0, 1}};
  const auto out = accumulate_static(frames, {box});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(out.positions[0].isApprox(Vec3(5, 5, 5)));
  EXPECT_TRUE(out.positions[1].isApprox(Vec3(0, 0, 0.2)));
}

TEST(AccumulateStatic, InvalidRadius) { EXPECT_THROW(accumulate_static({}, {}, 0.0), InvalidArgument); }

TEST(AccumulateStaticProperty, CountMatchesUniqueForSeparatedPoints) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> cell(-20, 20);
  std::vector<Vec3> unique;
  for (int i = 0; i < 300; ++i) unique.emplace_back(0.2 * cell(rng), 0.2 * cell(rng), 0.2 * cell(rng));
  std::sort(unique.begin(), unique.end(), [](const Vec3& a, const Vec3& b) {
    return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
  });
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  // Random sensor poses; each frame sees a random shuffled subset.
  std::vector<StampedCloud> frames;
  std::vector<bool> seen(unique.size(), false);
  for (int f = 0; f < 4; ++f) {
    const Pose pose(geometry::axis_angle(Vec3(0.3, 1, 0.2).normalized(), 0.3 * f), Vec3(f, -f, 0.5 * f));
    std::vector<std::size_t> order(unique.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(unique.size() / 2);
    PointCloud c;
    for (std::size_t i : order) {
      c.positions.push_back(pose.inverse_transform(unique[i]));
      seen[i] = true;
    }
    frames.push_back({pose, c, double(f), f});
  }
  const auto out = accumulate_static(frames, {}, 0.05);
  EXPECT_EQ(out.size(), static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true)));
}

TEST(AccumulateDynamic, RigidMotionCanonicalCoincides) {
  const auto box = moving_box();
  const std::vector<Vec3> local = {Vec3(0.1, 0.2, -0.3), Vec3(-0.4, 0.4, 0.0)};
  std::vector<StampedCloud> frames;
  for (const auto& tp : box.dynamic_poses) {
    PointCloud c;
    for (const auto& l : local) c.positions.push_back(tp.pose.transform(l));
    frames.push_back({Pose(), c, tp.timestamp, 0});
  }
  const auto acc = accumulate_dynamic(frames, box);
  ASSERT_EQ(acc.canonical.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT((acc.canonical.positions[i] - local[i % 2]).norm(), 1e-12);
}

TEST(AccumulateDynamic, MissingPoseThrows) {
  const auto box = moving_box();
  const std::vector<StampedCloud> frames = {{Pose(), cloud_of({Vec3::Zero()}), 0.5, 0}};
  EXPECT_THROW(accumulate_dynamic(frames, box), MissingPose);
}

TEST(AccumulateDynamicProperty, PlacementRoundTrip) {
  const auto box = moving_box();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const Pose sensor(geometry::axis_angle(Vec3::UnitX(), 0.2), Vec3(-2, 0, 1));
  PointCloud world;
  const Pose& at1 = box.dynamic_poses[1].pose;
  for (int i = 0; i < 50; ++i) world.positions.push_back(at1.transform(Vec3(u(rng), u(rng), u(rng))));
  const std::vector<StampedCloud> frames = {{sensor, world.transformed(sensor.inverse()), 1.0, 0}};
  const auto acc = accumulate_dynamic(frames, box);
  const auto placed = acc.place(1.0);
  ASSERT_EQ(placed.size(), world.size());
  for (std::size_t i = 0; i < world.size(); ++i) EXPECT_LT((placed.positions[i] - world.positions[i]).norm(), 1e-9);
  EXPECT_THROW(acc.place(0.5), MissingPose);
}

TEST(Normals, PlaneFacesUp) {
  PointCloud c;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) c.positions.emplace_back(0.1 * i, 0.1 * j + 0.013 * i, 0.0);
  const auto est = estimate_normals(c, 8);
  for (const auto& n : est.cloud.normals) EXPECT_LT((n - Vec3::UnitZ()).norm(), 1e-9);
}

TEST(Normals, TwoPlanesOrientedUp) {
  PointCloud c;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      c.positions.emplace_back(0.1 * i, 0.1 * j + 0.01 * i, 0.0);
      c.positions.emplace_back(0.1 * i, 0.1 * j + 0.01 * i, 10.0);
    }
  const auto est = estimate_normals(c, 8);
  for (const auto& n : est.cloud.normals) EXPECT_LT((n - Vec3::UnitZ()).norm(), 1e-9);
}

TEST(Normals, SensorOrientation) {
  PointCloud c;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) c.positions.emplace_back(0.1 * i, 0.1 * j + 0.01 * i, 0.0);
  c.frame_index.assign(c.size(), 0);
  const auto est = estimate_normals(c, 6, {Vec3(0, 0, -5)});
  for (const auto& n : est.cloud.normals) EXPECT_LT((n + Vec3::UnitZ()).norm(), 1e-9);
}

TEST(Normals, SphereWithinFiveDegrees) {
  PointCloud c;
  const int n = 2000;
  // Fibonacci sphere.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    c.positions.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  const auto est = estimate_normals(c, 10);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double cosang = std::abs(est.cloud.normals[i].dot(c.positions[i]));
    EXPECT_GT(cosang, std::cos(5.0 * std::numbers::pi / 180.0));
    EXPECT_NEAR(est.cloud.normals[i].norm(), 1.0, 1e-9);
  }
}

TEST(Normals, DegenerateFlagged) {
  // Three collinear points: two vanishing eigenvalues.
  const auto est = estimate_normals(cloud_of({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}), 3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(est.degenerate[i]);
    EXPECT_EQ(est.cloud.normals[i], Vec3::UnitZ());
  }
}

TEST(Normals, BadArguments) {
  EXPECT_THROW(estimate_normals(cloud_of({Vec3::Zero(), Vec3::Ones()}), 3), InvalidArgument);
  EXPECT_THROW(estimate_normals(cloud_of({Vec3::Zero(), Vec3::Ones(), Vec3::UnitX()}), 2), InvalidArgument);
}

TEST(Visibility, SinglePointVisible) {
  const CameraIntrinsics intr{100, 100, 50, 50, 100, 100};
  const auto m = determine_visibility(cloud_of({Vec3(0, 0, 4)}), Pose(), intr);
  EXPECT_TRUE(m.visible[0]);
}

TEST(Visibility, OccludedPointHidden) {
  const CameraIntrinsics intr{100, 100, 50, 50, 100, 100};
  const auto m = determine_visibility(cloud_of({Vec3(0.1, 0, 2), Vec3(0.5, 0, 10)}), Pose(), intr, 1.0);
  EXPECT_TRUE(m.visible[0]);
  EXPECT_FALSE(m.visible[1]);
}

TEST(Visibility, BehindCameraHidden) {
  const CameraIntrinsics intr{100, 100, 50, 50, 100, 100};
  EXPECT_FALSE(determine_visibility(cloud_of({Vec3(0, 0, -3)}), Pose(), intr).visible[0]);
}

TEST(VisibilityProperty, VisibleProjectsInside) {
  const CameraIntrinsics intr{60, 60, 40, 30, 80, 60};
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  PointCloud c;
  for (int i = 0; i < 3000; ++i) c.positions.emplace_back(u(rng), u(rng), u(rng));
  const Pose pose(geometry::axis_angle(Vec3::UnitY(), 0.3), Vec3(1, 0, -12));
  const auto m = determine_visibility(c, pose, intr);
  int visible = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!m.visible[i]) continue;
    ++visible;
    EXPECT_TRUE(intr.contains(m.projection[i]));
    EXPECT_GT(pose.inverse_transform(c.positions[i]).z(), 0.0);
  }
  EXPECT_GT(visible, 0);
}
