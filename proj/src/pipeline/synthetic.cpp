#include "ltr/pipeline/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "ltr/io/image.hpp"
#include "ltr/io/ply.hpp"
#include "ltr/trajectory/spline.hpp"

namespace ltr::pipeline {

namespace fs = std::filesystem;
using geometry::BoundingPrimitive;
using geometry::Mat3;
using geometry::Pose;
using geometry::Vec2;
using geometry::Vec3;
using io::Json;

namespace {

constexpr int kRoad = 7, kBuilding = 11, kCar = 26, kSky = 23;
constexpr double kGroundMin[2] = {-20.0, -20.0}, kGroundMax[2] = {90.0, 20.0};
constexpr double kFrameInterval = 0.5;

struct Solid {
  BoundingPrimitive shape;  // true geometry
  int code = 0;
  std::array<int, 3> color{};
};

Pose yawed(const Vec3& t, double yaw) { return Pose(geometry::axis_angle(Vec3::UnitZ(), yaw), t); }

BoundingPrimitive inflated(const BoundingPrimitive& b, double margin, int id) {
  BoundingPrimitive out = b;
  out.id = id;
  out.extents = b.extents.array() + margin;
  return out;
}

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  int code = kSky * 1000;
  std::array<int, 3> color{135, 185, 235};
};

Hit cast(const std::vector<Solid>& solids, const std::vector<Pose>& poses, const Vec3& o, const Vec3& d) {
  Hit h;
  if (d.z() < -1e-12) {
    const double t = -o.z() / d.z();
    const Vec3 p = o + t * d;
    if (p.x() >= kGroundMin[0] && p.x() <= kGroundMax[0] && p.y() >= kGroundMin[1] && p.y() <= kGroundMax[1])
      h = {t, kRoad * 1000, {92, 92, 96}};
  }
  for (std::size_t i = 0; i < solids.size(); ++i) {
    const auto t = geometry::ray_intersects_primitive(solids[i].shape, poses[i], o, d);
    if (t && *t > 1e-9 && *t < h.t) h = {*t, solids[i].code, solids[i].color};
  }
  return h;
}

std::string frame_name(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "f%03d", k);
  return buf;
}

}  // namespace

SyntheticScene write_synthetic_scene(const std::string& dir, const SyntheticOptions& opt) {
  fs::create_directories(dir);
  const fs::path root(dir);
  std::mt19937_64 rng(opt.seed);

  geometry::CameraIntrinsics intr{100.0, 100.0, opt.width / 2.0, opt.height / 2.0, opt.width, opt.height};
  Mat3 cam_rot;
  cam_rot.col(0) = Vec3(0, -1, 0);
  cam_rot.col(1) = Vec3(0, 0, -1);
  cam_rot.col(2) = Vec3(1, 0, 0);

  std::vector<Solid> solids;
  auto box = [&](int cls, int inst, const Pose& pose, const Vec3& half, std::array<int, 3> color) {
    solids.push_back({geometry::make_cuboid(cls, inst, pose, half), cls * 1000 + inst, color});
  };
  box(kBuilding, 1, yawed(Vec3(14, 11, 5), 0.0), Vec3(5, 3, 5), {176, 140, 108});
  box(kBuilding, 2, yawed(Vec3(27, -11, 6), 0.05), Vec3(6, 3, 6), {150, 120, 140});
  box(kBuilding, 3, yawed(Vec3(41, 12, 5), 0.0), Vec3(6, 3, 5), {190, 170, 120});
  box(kCar, 1, yawed(Vec3(16, -4.5, 0.75), 0.0), Vec3(2.2, 0.9, 0.75), {200, 40, 40});
  box(kCar, 2, yawed(Vec3(31, 4, 0.75), 0.2), Vec3(2.2, 0.9, 0.75), {40, 70, 200});
  const std::size_t moving = solids.size();
  box(kCar, 3, Pose(), Vec3(2.2, 0.9, 0.75), {230, 200, 30});

  const double t_end = (opt.frames - 1) * kFrameInterval;
  const trajectory::PoseSpline path({{0.0, yawed(Vec3(9, -1.5, 0.75), 0.15)},
                                     {0.5 * t_end, yawed(Vec3(15, 0.0, 0.75), 0.0)},
                                     {t_end, yawed(Vec3(22, -1.0, 0.75), -0.1)}});

  std::vector<BoundingPrimitive> prims;
  prims.push_back(geometry::make_ground_polygon(
      kRoad,
      {Vec2(kGroundMin[0], kGroundMin[1]), Vec2(kGroundMax[0], kGroundMin[1]), Vec2(kGroundMax[0], kGroundMax[1]),
       Vec2(kGroundMin[0], kGroundMax[1])},
      {0.0, 0.0, 0.0, 0.0}, 0.3));
  prims.back().id = 1;
  for (std::size_t i = 0; i < solids.size(); ++i) {
    const double margin = solids[i].shape.semantic_class == kBuilding ? 0.3 : 0.2;
    prims.push_back(inflated(solids[i].shape, margin, static_cast<int>(i) + 2));
  }
  BoundingPrimitive& dyn = prims.back();
  dyn.dynamic = true;
  for (int k = 0; k < opt.frames; ++k) dyn.dynamic_poses.push_back({k * kFrameInterval, path.pose(k * kFrameInterval)});
  dyn.pose = dyn.dynamic_poses.front().pose;
  dyn.validate();
  io::write_primitives((root / "primitives.json").string(), prims);

  const crf::ClassSet classes = crf::ClassSet::street_default();
  io::write_weights((root / "weights.json").string(), crf::ModelWeights::defaults(classes));

  SyntheticScene scene;
  scene.dynamic_code = solids[moving].code;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> jitter(-6, 6);
  Json manifest = Json::array();
  const int s = classes.size();
  const int n = intr.pixel_count();
  for (int k = 0; k < opt.frames; ++k) {
    const double ts = k * kFrameInterval;
    const std::string name = frame_name(k);
    std::vector<Pose> poses;
    for (const Solid& so : solids) poses.push_back(so.shape.pose);
    poses[moving] = path.pose(ts);

    const Pose camera(cam_rot, Vec3(1.2 * k, 0.0, 1.6));
    io::ImageRgb8 img{opt.width, opt.height, std::vector<std::uint8_t>(3 * static_cast<std::size_t>(n))};
    io::Image16 gt{opt.width, opt.height, std::vector<std::uint16_t>(static_cast<std::size_t>(n))};
    io::ProbabilityMap prob{opt.height, opt.width, s, std::vector<float>(static_cast<std::size_t>(n) * s)};
    std::vector<int> codes(static_cast<std::size_t>(n));
    const double rest = (1.0 - opt.peak) / (s - 1);
    for (int y = 0; y < opt.height; ++y)
      for (int x = 0; x < opt.width; ++x) {
        const auto i = static_cast<std::size_t>(y) * opt.width + x;
        const Vec3 dir = camera.rotate(geometry::pixel_center_ray(intr, x, y));
        const Hit h = cast(solids, poses, camera.translation(), dir);
        codes[i] = h.code;
        gt.data[i] = static_cast<std::uint16_t>(h.code);
        for (int c = 0; c < 3; ++c) img.data[3 * i + c] = static_cast<std::uint8_t>(std::clamp(h.color[c] + jitter(rng), 0, 255));
        int peak = classes.index_of(h.code / 1000);
        if (unit(rng) < opt.label_noise) {
          const int other = std::uniform_int_distribution<int>(0, s - 2)(rng);
          peak = other >= peak ? other + 1 : other;
        }
        for (int c = 0; c < s; ++c) prob.values[i * s + c] = static_cast<float>(c == peak ? opt.peak : rest);
      }

    pointcloud::PointCloud scan;
    const Vec3 origin = camera.translation();
    for (int e = 0; e < opt.lidar_elevation_steps; ++e) {
      const double el = (-25.0 + 35.0 * e / std::max(1, opt.lidar_elevation_steps - 1)) * M_PI / 180.0;
      for (int a = 0; a < opt.lidar_azimuth_steps; ++a) {
        const double az = 2.0 * M_PI * a / opt.lidar_azimuth_steps;
        const Vec3 dir(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
        const Hit h = cast(solids, poses, origin, dir);
        if (h.t < 100.0) scan.positions.push_back(h.t * dir);
      }
    }
    io::write_png_rgb((root / (name + "_image.png")).string(), img);
    io::write_png16((root / (name + "_gt.png")).string(), gt);
    io::write_probability_map((root / (name + ".prb")).string(), prob);
    io::write_ply((root / (name + "_scan.ply")).string(), scan);

    manifest.push_back(Json{{"name", name},
                            {"timestamp", ts},
                            {"frame", k},
                            {"pose", io::pose_to_json(camera)},
                            {"scan_pose", io::pose_to_json(Pose::from_translation(origin))},
                            {"image", name + "_image.png"},
                            {"probabilities", name + ".prb"},
                            {"scan", name + "_scan.ply"},
                            {"ground_truth", name + "_gt.png"}});
    scene.frame_names.push_back(name);
    scene.ground_truth.push_back(std::move(codes));
  }
  io::write_json((root / "frames.json").string(), manifest);

  PipelineConfig cfg;
  cfg.paths = {"frames.json", "primitives.json", "weights.json", "", "", "output"};
  cfg.mode = crf::LabelMode::Instance;
  cfg.camera = intr;
  scene.config_path = (root / "config.json").string();
  io::write_json(scene.config_path, config_to_json(cfg));
  scene.config = load_config(scene.config_path);
  return scene;
}

}  // namespace ltr::pipeline
