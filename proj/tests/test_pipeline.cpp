#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "ltr/error.hpp"
#include "ltr/io/image.hpp"
#include "ltr/io/json_io.hpp"
#include "ltr/io/ply.hpp"
#include "ltr/pipeline/commands.hpp"
#include "ltr/pipeline/scene.hpp"
#include "ltr/pipeline/synthetic.hpp"
#include "ltr/pipeline/transfer.hpp"

using namespace ltr;
using namespace ltr::pipeline;
using geometry::Pose;
using geometry::Vec2;
using geometry::Vec3;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto* info = testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "ltr_pipeline_tests" / (std::string(info->name()) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SyntheticOptions small_scene(int frames = 5) {
  SyntheticOptions o;
  o.frames = frames;
  o.width = 96;
  o.height = 40;
  o.lidar_azimuth_steps = 180;
  o.lidar_elevation_steps = 16;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<geometry::BoundingPrimitive> sample_primitives() {
  auto car = geometry::make_cuboid(26, 2, Pose::from_quaternion(Eigen::Vector4d(0.9, 0.0, 0.1, 0.3), Vec3(1, 2, 3)),
                                   Vec3(2.0, 0.9, 0.75));
  car.id = 4;
  auto tree = geometry::make_ellipsoid(21, 0, Pose::from_translation(Vec3(-3, 1, 2)), Vec3(1.5, 1.5, 3.0));
  tree.id = 5;
  auto road = geometry::make_ground_polygon(7, {Vec2(0, 0), Vec2(10, 0), Vec2(10, 6), Vec2(0, 6)},
                                            {0.0, 0.1, 0.2, 0.1}, 0.3);
  road.id = 6;
  auto moving = geometry::make_cuboid(26, 3, Pose(), Vec3(2.2, 0.9, 0.75));
  moving.id = 7;
  moving.dynamic = true;
  moving.dynamic_poses = {{0.5, Pose::from_translation(Vec3(1, 0, 0))}, {1.5, Pose::from_translation(Vec3(3, 0.5, 0))}};
  moving.validate();
  return {car, tree, road, moving};
}

}  // namespace

// ---- JSON formats ----

TEST(PrimitiveJson, RoundTripsEveryShape) {
  const auto prims = sample_primitives();
  const fs::path p = scratch("prims") / "primitives.json";
  io::write_primitives(p.string(), prims);
  const auto back = io::read_primitives(p.string());
  ASSERT_EQ(back.size(), prims.size());
  for (std::size_t i = 0; i < prims.size(); ++i) {
    EXPECT_EQ(back[i].id, prims[i].id);
    EXPECT_EQ(back[i].shape, prims[i].shape);
    EXPECT_EQ(back[i].semantic_class, prims[i].semantic_class);
    EXPECT_EQ(back[i].instance_id, prims[i].instance_id);
    EXPECT_EQ(back[i].dynamic, prims[i].dynamic);
    EXPECT_LT((back[i].pose.rotation() - prims[i].pose.rotation()).norm(), 1e-12);
    EXPECT_LT((back[i].pose.translation() - prims[i].pose.translation()).norm(), 1e-12);
    ASSERT_EQ(back[i].dynamic_poses.size(), prims[i].dynamic_poses.size());
  }
  EXPECT_EQ(back[1].extents, prims[1].extents);
  EXPECT_EQ(back[2].polygon.heights, prims[2].polygon.heights);
  EXPECT_EQ(back[2].polygon.triangles.size(), 2u);
  EXPECT_DOUBLE_EQ(back[3].dynamic_poses[1].timestamp, 1.5);
}

TEST(PrimitiveJson, ParsesDocumentedSchema) {
  const auto j = io::Json::parse(R"([
    {"id": 1, "class": 26, "instance_id": 1, "shape": "cuboid",
     "pose": {"t": [1, 2, 0.75], "q": [1, 0, 0, 0]}, "half_extents": [2, 1, 0.75], "dynamic": false},
    {"id": 2, "class": 7, "shape": "polygon",
     "polygon": {"vertices": [[0, 0], [4, 0], [4, 3]], "thickness": 0.2}}])");
  const auto prims = io::primitives_from_json(j);
  ASSERT_EQ(prims.size(), 2u);
  EXPECT_EQ(prims[0].extents, Vec3(2, 1, 0.75));
  EXPECT_EQ(prims[1].shape, geometry::ShapeKind::GroundPolygon);
  EXPECT_EQ(prims[1].polygon.heights, std::vector<double>(3, 0.0));
}

TEST(PrimitiveJson, RejectsMalformedEntries) {
  EXPECT_THROW(io::primitives_from_json(io::Json::parse(R"({"id": 1})")), FormatError);
  EXPECT_THROW(io::primitives_from_json(io::Json::parse(R"([{"id": 1, "class": 7, "shape": "cone"}])")), FormatError);
  EXPECT_THROW(io::primitives_from_json(io::Json::parse(R"([{"id": 1, "class": 7, "shape": "cuboid"}])")), FormatError);
  EXPECT_THROW(io::primitives_from_json(
                   io::Json::parse(R"([{"id": 1, "class": 7, "shape": "cuboid", "half_extents": [1, -1, 1]}])")),
               InvalidPrimitive);
  EXPECT_THROW(io::primitives_from_json(
                   io::Json::parse(R"([{"id": 1, "class": 7, "shape": "cuboid", "half_extents": [1, 1]}])")),
               FormatError);
}

TEST(WeightsJson, RoundTripsTiedAndFullCompatibilities) {
  crf::ModelWeights w = crf::ModelWeights::defaults(crf::ClassSet::street_default());
  Eigen::VectorXd theta = w.parameters();
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = 0.1 * static_cast<double>(i) - 1.3;
  w.set_parameters(theta);
  Eigen::MatrixXd full = Eigen::MatrixXd::Constant(6, 6, 0.3);
  full.diagonal().setConstant(-0.7);
  w.compat[2].full = full;
  w.whitening.mean = {0.1, 0.2, 0.3};
  w.whitening.stddev = {1.5, 2.5, 3.5};
  w.lambda = 0.01;
  w.widths.smooth_position = 4.0;
  const fs::path p = scratch("w") / "weights.json";
  io::write_weights(p.string(), w);
  const crf::ModelWeights back = io::read_weights(p.string());
  EXPECT_EQ(back.parameters(), w.parameters());
  ASSERT_TRUE(back.compat[2].full.has_value());
  EXPECT_EQ(*back.compat[2].full, full);
  EXPECT_EQ(back.whitening.stddev, w.whitening.stddev);
  EXPECT_EQ(back.lambda, 0.01);
  EXPECT_EQ(back.widths.smooth_position, 4.0);
  EXPECT_EQ(back.classes.size(), 6);
}

TEST(WeightsJson, RejectsUnknownSchemaAndBadShapes) {
  io::Json j = io::weights_to_json(crf::ModelWeights::defaults(crf::ClassSet::street_default()));
  j["schema_version"] = 99;
  EXPECT_THROW(io::weights_from_json(j), FormatError);
  j["schema_version"] = 1;
  j["pixel_constraint"] = {1.0, 2.0};
  EXPECT_THROW(io::weights_from_json(j), FormatError);
}

// ---- configuration ----

namespace {

void expect_commented(const io::Json& j, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key().rfind('_', 0) == 0) continue;
    EXPECT_TRUE(j.contains("_" + it.key())) << where << it.key() << " has no comment";
    if (it.value().is_object() && it.key() != "widths") expect_commented(it.value(), where + it.key() + ".");
  }
}

}  // namespace

TEST(Config, EveryDefaultCarriesAComment) { expect_commented(config_to_json(PipelineConfig{}), ""); }

TEST(Config, RoundTripsThroughJson) {
  PipelineConfig c;
  c.mode = crf::LabelMode::Instance;
  c.inference.iterations = 7;
  c.inference.filter = crf::FilterMode::Exact;
  c.widths.appearance_color = 11.0;
  c.detector.grid.voxel_size = 0.3;
  c.detector.free_threshold = -1.5;
  c.training.lambda = 0.5;
  c.metrics.matching = metrics::Matching::Optimal;
  c.threads = 3;
  const PipelineConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.mode, c.mode);
  EXPECT_EQ(back.inference.iterations, 7);
  EXPECT_EQ(back.inference.filter, crf::FilterMode::Exact);
  EXPECT_EQ(back.widths.appearance_color, 11.0);
  EXPECT_EQ(back.detector.grid.voxel_size, 0.3);
  EXPECT_EQ(back.detector.free_threshold, -1.5);
  EXPECT_EQ(back.training.lambda, 0.5);
  EXPECT_EQ(back.metrics.matching, metrics::Matching::Optimal);
  EXPECT_EQ(back.threads, 3);
  EXPECT_EQ(back.classes.size(), c.classes.size());
}

TEST(Config, ResolvesRelativePathsAgainstItsDirectory) {
  const PipelineConfig c = config_from_json(io::Json::parse(R"({"paths": {"frames": "f.json", "output": "/abs/out"}})"),
                                            "/data/scene");
  EXPECT_EQ(c.paths.frames, "/data/scene/f.json");
  EXPECT_EQ(c.paths.output, "/abs/out");
}

TEST(Config, RejectsOutOfRangeValues) {
  EXPECT_THROW(config_from_json(io::Json::parse(R"({"crf": {"iterations": 0}})")), ConfigError);
  EXPECT_THROW(config_from_json(io::Json::parse(R"({"crf": {"filter": "fft"}})")), ConfigError);
  EXPECT_THROW(config_from_json(io::Json::parse(R"({"mode": "panoptic"})")), ConfigError);
  EXPECT_THROW(config_from_json(io::Json::parse(R"({"occupancy": {"p_min": 1.0}})")), ConfigError);
  EXPECT_THROW(config_from_json(io::Json::parse(R"({"crf": {"widths": {"smooth_position": 0}}})")), ConfigError);
  EXPECT_THROW(config_from_json(io::Json::parse(R"({"threads": "many"})")), ConfigError);
}

// ---- label map codecs ----

TEST(LabelCodec, RoundTripsThroughPng) {
  const std::vector<int> codes{7000, 26001, 26002, 23000, 11003, 0};
  const std::vector<double> conf{0.0, 1.0, 0.5, 0.25, 0.999, 0.1};
  const fs::path dir = scratch("png");
  io::write_png16((dir / "l.png").string(), encode_label_map(codes, 3, 2));
  io::write_png16((dir / "c.png").string(), encode_confidence_map(conf, 3, 2));
  const io::Image16 l = io::read_png16((dir / "l.png").string()), c = io::read_png16((dir / "c.png").string());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    EXPECT_EQ(l.data[i], codes[i]);
    EXPECT_EQ(c.data[i], std::lround(65535.0 * conf[i]));
    EXPECT_NEAR(decode_confidence(c.data[i]), conf[i], 0.5 / 65535.0);
  }
  EXPECT_THROW(encode_label_map({70000}, 1, 1), InvalidArgument);
}

// ---- manifest ----

TEST(Manifest, SortsByTimestampAndFallsBackToPoseFile) {
  const fs::path dir = scratch("manifest");
  io::write_json((dir / "frames.json").string(), io::Json::parse(R"({"frames": [
      {"name": "b", "timestamp": 2.0, "frame": 1, "probabilities": "b.prb"},
      {"name": "a", "timestamp": 1.0, "frame": 0, "pose": {"t": [1, 2, 3]}}]})"));
  std::ofstream((dir / "poses.txt").string()) << "1 1 0 0 5 0 1 0 6 0 0 1 7\n";
  const auto frames = read_manifest((dir / "frames.json").string(), (dir / "poses.txt").string());
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].name, "a");
  EXPECT_EQ(frames[1].camera.translation(), Vec3(5, 6, 7));
  EXPECT_EQ(frames[1].probabilities, (dir / "b.prb").string());
  EXPECT_THROW(read_manifest((dir / "frames.json").string()), FormatError);
}

// ---- commands ----

TEST(Transfer, FiveFrameBatchWritesOneMapPairPerFrameAndOneCloud) {
  const fs::path dir = scratch("scene");
  const SyntheticScene scene = write_synthetic_scene(dir.string(), small_scene(5));
  const TransferSummary s = cmd_transfer(scene.config);
  EXPECT_EQ(s.processed, 5);
  EXPECT_TRUE(s.failures.empty());
  int labels = 0, confs = 0, plys = 0;
  for (const auto& e : fs::directory_iterator(scene.config.paths.output)) {
    const std::string n = e.path().filename().string();
    labels += n.ends_with("_label.png");
    confs += n.ends_with("_conf.png");
    plys += e.path().extension() == ".ply";
  }
  EXPECT_EQ(labels, 5);
  EXPECT_EQ(confs, 5);
  EXPECT_EQ(plys, 1);

  // Outputs round-trip through their readers.
  const io::PlyData fused = io::read_ply((fs::path(scene.config.paths.output) / "fused.ply").string());
  EXPECT_EQ(fused.cloud.size(), s.fused_points);
  EXPECT_TRUE(fused.cloud.has_labels());
  EXPECT_TRUE(fused.cloud.has_confidences());
  const io::Json report = io::read_json((fs::path(scene.config.paths.output) / "report.json").string());
  for (const char* key : {"per_class", "mean", "params", "counts"}) EXPECT_TRUE(report.contains(key)) << key;
  EXPECT_EQ(report["counts"]["processed"], 5);
}

TEST(Transfer, MissingProbabilityMapSkipsTheFrame) {
  const fs::path dir = scratch("scene");
  const SyntheticScene scene = write_synthetic_scene(dir.string(), small_scene(3));
  fs::remove(dir / "f001.prb");
  const TransferSummary s = cmd_transfer(scene.config);
  EXPECT_EQ(s.processed, 2);
  ASSERT_EQ(s.failures.size(), 1u);
  EXPECT_EQ(s.failures[0].frame, "f001");
  EXPECT_FALSE(fs::exists(fs::path(scene.config.paths.output) / "f001_label.png"));
  EXPECT_TRUE(fs::exists(fs::path(scene.config.paths.output) / "f002_label.png"));
}

TEST(Transfer, DynamicObjectAppearsOnlyAtLabeledTimestamps) {
  const fs::path dir = scratch("scene");
  const SyntheticScene scene = write_synthetic_scene(dir.string(), small_scene(5));
  auto prims = io::read_primitives(scene.config.paths.primitives);
  for (auto& b : prims) {
    if (!b.dynamic) continue;
    b.dynamic_poses = {b.dynamic_poses[2], b.dynamic_poses[3]};
    b.pose = b.dynamic_poses.front().pose;
  }
  io::write_primitives(scene.config.paths.primitives, prims);
  ASSERT_EQ(cmd_transfer(scene.config).processed, 5);
  for (int k = 0; k < 5; ++k) {
    const io::Image16 img = io::read_png16(
        (fs::path(scene.config.paths.output) / (scene.frame_names[static_cast<std::size_t>(k)] + "_label.png")).string());
    const bool present = std::count(img.data.begin(), img.data.end(), scene.dynamic_code) > 0;
    EXPECT_EQ(present, k == 2 || k == 3) << "frame " << k;
  }
}

TEST(Transfer, InstanceLabelsAgreeWithSemanticReading) {
  const fs::path dir = scratch("scene");
  SyntheticScene scene = write_synthetic_scene(dir.string(), small_scene(2));
  const SceneBatch batch = load_batch(scene.config);
  const crf::ModelWeights w = load_model_weights(scene.config);
  for (const Frame& f : batch.frames) {
    const FrameProblem fp = build_frame_problem(batch, f, w.classes, scene.config);
    const FrameResult r = transfer_frame(batch, f, w, scene.config);
    ASSERT_EQ(fp.labels.mode(), crf::LabelMode::Instance);
    std::set<int> codes;
    for (int s = 0; s < fp.labels.size(); ++s) codes.insert(fp.labels.encode(s));
    for (int code : r.codes) {
      ASSERT_TRUE(codes.count(code)) << code;
      const int s = *fp.labels.find(code / 1000, code % 1000);
      EXPECT_EQ(fp.labels[s].semantic_class, code / 1000);
    }
  }
}

TEST(Transfer, IsByteIdenticalAcrossRunsAndThreadCounts) {
  const fs::path dir = scratch("scene");
  SyntheticScene scene = write_synthetic_scene(dir.string(), small_scene(3));
  PipelineConfig a = scene.config, b = scene.config;
  a.paths.output = (dir / "run_a").string();
  b.paths.output = (dir / "run_b").string();
  b.threads = 2;
  cmd_transfer(a);
  cmd_transfer(b);
  for (const auto& e : fs::directory_iterator(a.paths.output)) {
    const fs::path other = fs::path(b.paths.output) / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
  }
}

TEST(EvaluateSemantic, IdenticalMapsScoreOne) {
  const fs::path dir = scratch("eval");
  const SyntheticScene scene = write_synthetic_scene(dir.string(), small_scene(2));
  PipelineConfig c = scene.config;
  c.paths.output = (dir / "eval").string();
  fs::create_directories(dir / "pred");
  for (const auto& n : scene.frame_names) fs::copy_file(dir / (n + "_gt.png"), dir / "pred" / (n + "_label.png"));
  const io::Json same = cmd_evaluate_semantic(c, {dir.string(), (dir / "pred").string(), false, 1.0});
  EXPECT_DOUBLE_EQ(same["mean"]["miou"].get<double>(), 1.0);
  EXPECT_EQ(same["counts"]["frames"], 2);
  const io::Json inst = cmd_evaluate_instance(c, {dir.string(), (dir / "pred").string()});
  EXPECT_DOUBLE_EQ(inst["mean"]["miou"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(inst["mean"]["ap"].get<double>(), 1.0);
}

TEST(Accumulate, TwoFramesOfOneSharedPointGiveOnePoint) {
  const fs::path dir = scratch("acc");
  pointcloud::PointCloud p;
  p.positions.push_back(Vec3(1, 2, 3));
  io::write_ply((dir / "a.ply").string(), p);
  pointcloud::PointCloud q;
  q.positions.push_back(Vec3(0, 2, 3));
  io::write_ply((dir / "b.ply").string(), q);
  io::write_json((dir / "frames.json").string(), io::Json::parse(R"([
      {"name": "a", "timestamp": 0, "pose": {"t": [0, 0, 0]}, "scan": "a.ply"},
      {"name": "b", "timestamp": 1, "pose": {"t": [1, 0, 0]}, "scan": "b.ply"}])"));
  PipelineConfig c;
  c.paths.frames = (dir / "frames.json").string();
  c.paths.output = (dir / "out").string();
  const io::Json r = cmd_accumulate(c);
  EXPECT_EQ(r["counts"]["points"], 1);
  EXPECT_EQ(io::read_ply((dir / "out" / "accumulated.ply").string()).cloud.size(), 1u);
}

TEST(FitTrajectory, RecoversTheSyntheticCarBetweenKeyframes) {
  const fs::path dir = scratch("fit");
  const SyntheticScene scene = write_synthetic_scene(dir.string(), small_scene(5));
  const auto truth = io::read_primitives(scene.config.paths.primitives);
  auto prims = truth;
  for (auto& b : prims)
    if (b.dynamic) b.dynamic_poses = {b.dynamic_poses[0], b.dynamic_poses[2], b.dynamic_poses[4]};
  io::write_primitives(scene.config.paths.primitives, prims);
  const io::Json r = cmd_fit_trajectory(scene.config);
  EXPECT_EQ(r["counts"]["poses"], 5);
  const auto fitted = io::read_primitives((fs::path(scene.config.paths.output) / "primitives_fitted.json").string());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth[i].dynamic) continue;
    ASSERT_EQ(fitted[i].dynamic_poses.size(), truth[i].dynamic_poses.size());
    for (std::size_t k = 0; k < truth[i].dynamic_poses.size(); ++k)
      EXPECT_LT((fitted[i].dynamic_poses[k].pose.translation() - truth[i].dynamic_poses[k].pose.translation()).norm(),
                0.2)
          << "frame " << k;
  }
}

TEST(Train, WritesWeightsThatReadBack) {
  const fs::path dir = scratch("train");
  SyntheticScene scene = write_synthetic_scene(dir.string(), small_scene(2));
  PipelineConfig c = scene.config;
  c.mode = crf::LabelMode::Semantic;
  c.training.steps = 2;
  c.training.batch_size = 1;
  c.training.objective.filter = crf::FilterMode::Lattice;
  c.training.objective.iterations = 2;
  const io::Json r = cmd_train(c);
  EXPECT_EQ(r["counts"]["samples"], 2);
  EXPECT_EQ(r["counts"]["steps"], 2);
  const crf::ModelWeights w = io::read_weights((fs::path(c.paths.output) / "weights.json").string());
  EXPECT_EQ(w.classes.size(), 6);
  EXPECT_DOUBLE_EQ(w.lambda, c.training.lambda);
}

TEST(EvaluateTrajectory, PairsPosesByFrameIndex) {
  const fs::path dir = scratch("traj");
  std::ofstream g((dir / "gt.txt").string()), e((dir / "est.txt").string());
  for (int i = 0; i < 10; ++i) {
    g << i << " 1 0 0 " << i << " 0 1 0 0 0 0 1 0\n";
    if (i != 4) e << i << " 1 0 0 " << i + 5 << " 0 1 0 0 0 0 1 0\n";
  }
  g.close();
  e.close();
  PipelineConfig c;
  c.paths.output = (dir / "out").string();
  const io::Json r = cmd_evaluate_trajectory(c, {(dir / "gt.txt").string(), (dir / "est.txt").string(), false, false});
  EXPECT_EQ(r["counts"]["frames"], 9);
  EXPECT_NEAR(r["mean"]["ape"].get<double>(), 0.0, 1e-9);
}
