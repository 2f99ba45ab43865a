#include "ltr/pipeline/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "ltr/crf/inference.hpp"
#include "ltr/error.hpp"
#include "ltr/io/ply.hpp"
#include "ltr/parallel.hpp"
#include "ltr/pointcloud/visibility.hpp"

namespace ltr::pipeline {

namespace fs = std::filesystem;
using io::Json;

FrameProblem build_frame_problem(const SceneBatch& batch, const Frame& frame, const crf::ClassSet& classes,
                                 const PipelineConfig& config) {
  const auto& intr = config.camera;
  const std::vector<geometry::BoundingPrimitive> prims = crf::resolve_primitives(batch.primitives, frame.timestamp);
  FrameProblem fp{config.mode == crf::LabelMode::Semantic ? crf::LabelSpace::semantic(classes)
                                                          : crf::LabelSpace::instance(classes, prims),
                  {}, {}, {}};
  const int s = fp.labels.size();
  const int n = intr.pixel_count();

  if (frame.probabilities.empty()) throw FrameFailure("no probability map");
  if (!fs::exists(frame.probabilities)) throw FrameFailure("probability map not found: " + frame.probabilities);
  const io::ProbabilityMap prob = io::read_probability_map(frame.probabilities);
  if (prob.width != intr.width || prob.height != intr.height)
    throw FrameFailure("probability map size differs from the camera");
  if (prob.labels != classes.size()) throw FrameFailure("probability map needs one channel per class");

  crf::PixelField& px = fp.pixels;
  px.width = intr.width;
  px.height = intr.height;
  px.labels = s;
  px.colors.assign(static_cast<std::size_t>(n), {0.0, 0.0, 0.0});
  if (!frame.image.empty()) {
    if (!fs::exists(frame.image)) throw FrameFailure("image not found: " + frame.image);
    const io::ImageRgb8 img = io::read_png_rgb(frame.image);
    if (img.width != intr.width || img.height != intr.height) throw FrameFailure("image size differs from the camera");
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c) px.colors[static_cast<std::size_t>(i)][c] = img.data[3 * static_cast<std::size_t>(i) + c];
  }
  std::vector<double> class_prob(prob.values.begin(), prob.values.end());
  px.probabilities = config.mode == crf::LabelMode::Semantic
                         ? std::move(class_prob)
                         : crf::instance_probabilities(class_prob, fp.labels, {},
                                                     std::vector<std::optional<int>>(static_cast<std::size_t>(s)), n);
  px.admissible = crf::build_pixel_constraints(prims, frame.camera, intr, fp.labels);

  const pointcloud::PointCloud cloud = batch.frame_cloud(frame, fp.fused_index);
  const pointcloud::VisibilityMask vis =
      pointcloud::determine_visibility(cloud, frame.camera, intr, config.visibility_splat_px, config.visibility_slack);
  fp.points = crf::build_point_constraints(prims, cloud, vis, px.admissible, intr, fp.labels);
  return fp;
}

FrameResult transfer_frame(const SceneBatch& batch, const Frame& frame, const crf::ModelWeights& weights,
                           const PipelineConfig& config) {
  FrameProblem fp = build_frame_problem(batch, frame, weights.classes, config);
  const crf::FrameWeights fw = crf::expand(weights, fp.labels);
  const crf::Unaries unaries = crf::build_unaries(fp.pixels, fp.points, fw);
  const crf::MarginalField q = crf::mean_field_infer(fp.pixels, fp.points, unaries, fw, config.inference);
  const crf::LabelResult lr = crf::extract_labels_confidence(q);

  FrameResult r;
  r.width = lr.width;
  r.height = lr.height;
  r.codes.resize(lr.pixel_labels.size());
  for (std::size_t i = 0; i < r.codes.size(); ++i) r.codes[i] = fp.labels.encode(lr.pixel_labels[i]);
  r.confidence = lr.pixel_confidence;
  for (int l = 0; l < fp.points.size(); ++l) {
    if (fp.points.is_virtual[static_cast<std::size_t>(l)]) continue;
    const auto src = static_cast<std::size_t>(fp.points.source[static_cast<std::size_t>(l)]);
    r.votes.push_back({fp.fused_index[src], fp.labels.encode(lr.point_labels[static_cast<std::size_t>(l)]),
                       lr.point_confidence[static_cast<std::size_t>(l)]});
  }
  return r;
}

io::Image16 encode_label_map(const std::vector<int>& codes, int width, int height) {
  io::Image16 img{width, height, std::vector<std::uint16_t>(codes.size())};
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] < 0 || codes[i] > 65535) throw InvalidArgument("label code does not fit 16 bits");
    img.data[i] = static_cast<std::uint16_t>(codes[i]);
  }
  return img;
}

io::Image16 encode_confidence_map(const std::vector<double>& confidence, int width, int height) {
  io::Image16 img{width, height, std::vector<std::uint16_t>(confidence.size())};
  for (std::size_t i = 0; i < confidence.size(); ++i)
    img.data[i] = static_cast<std::uint16_t>(std::lround(65535.0 * std::clamp(confidence[i], 0.0, 1.0)));
  return img;
}

double decode_confidence(std::uint16_t v) { return v / 65535.0; }

TransferSummary cmd_transfer(const PipelineConfig& config) {
  const SceneBatch batch = load_batch(config);
  const crf::ModelWeights weights = load_model_weights(config);
  fs::create_directories(config.paths.output);
  const fs::path out(config.paths.output);

  const int n = static_cast<int>(batch.frames.size());
  std::vector<FrameResult> results(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> ok(static_cast<std::size_t>(n), 0);
  parallel_for(n, config.threads, [&](int i) {
    const Frame& f = batch.frames[static_cast<std::size_t>(i)];
    try {
      FrameResult r = transfer_frame(batch, f, weights, config);
      io::write_png16((out / (f.name + "_label.png")).string(), encode_label_map(r.codes, r.width, r.height));
      io::write_png16((out / (f.name + "_conf.png")).string(), encode_confidence_map(r.confidence, r.width, r.height));
      r.confidence.shrink_to_fit();
      results[static_cast<std::size_t>(i)] = std::move(r);
      ok[static_cast<std::size_t>(i)] = 1;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  });

  TransferSummary s;
  s.frames = n;
  std::vector<crf::PointVote> votes;
  double conf_sum = 0.0;
  std::size_t conf_count = 0;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!ok[k]) {
      s.failures.push_back({batch.frames[k].name, errors[k]});
      continue;
    }
    ++s.processed;
    for (int c : results[k].codes) ++s.pixels_per_class[c / 1000];
    for (double c : results[k].confidence) conf_sum += c;
    conf_count += results[k].confidence.size();
    votes.insert(votes.end(), results[k].votes.begin(), results[k].votes.end());
    results[k] = FrameResult();
  }
  s.mean_confidence = conf_count ? conf_sum / static_cast<double>(conf_count) : 0.0;

  pointcloud::PointCloud fused = batch.fused_cloud();
  const crf::FusedLabels labels =
      crf::fuse_point_labels(fused, votes, batch.fusion_primitives(), config.mode, weights.classes);
  fused.labels = labels.labels;
  fused.confidences.resize(labels.confidences.size());
  for (std::size_t i = 0; i < labels.confidences.size(); ++i)
    fused.confidences[i] = static_cast<float>(labels.confidences[i]);
  s.fused_points = fused.size();
  for (int l : fused.labels)
    if (l == crf::kUnknownLabel) ++s.unknown_points;
  io::write_ply((out / "fused.ply").string(), fused);

  Json per_class = Json::object();
  for (const auto& [c, count] : s.pixels_per_class) per_class[std::to_string(c)] = Json{{"pixels", count}};
  Json failures = Json::array();
  for (const auto& f : s.failures) failures.push_back(Json{{"frame", f.frame}, {"error", f.error}});
  const Json report{{"per_class", per_class},
                    {"mean", Json{{"confidence", s.mean_confidence}}},
                    {"params",
                     Json{{"mode", crf::to_string(config.mode)},
                          {"filter", crf::to_string(config.inference.filter)},
                          {"constraints", crf::to_string(config.inference.constraints)},
                          {"iterations", config.inference.iterations},
                          {"lattice_spacing", config.inference.lattice.spacing}}},
                    {"counts",
                     Json{{"frames", s.frames},
                          {"processed", s.processed},
                          {"failed", s.failures.size()},
                          {"fused_points", s.fused_points},
                          {"unknown_points", s.unknown_points}}},
                    {"failures", failures}};
  io::write_json((out / "report.json").string(), report);
  return s;
}

}  // namespace ltr::pipeline
