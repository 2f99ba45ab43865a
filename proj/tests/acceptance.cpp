// Acceptance checks: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes, or when the only failure is
// the F1 arithmetic of criterion 7, whose stated target does not follow from
// its own inputs (P = 98.2, R = 19.1 give 31.98). That line still prints FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <string>

#include "ltr/crf/inference.hpp"
#include "ltr/dynamic_detect/detector.hpp"
#include "ltr/io/image.hpp"
#include "ltr/learning/adadelta.hpp"
#include "ltr/learning/objective.hpp"
#include "ltr/metrics/completion.hpp"
#include "ltr/metrics/instance.hpp"
#include "ltr/metrics/semantic.hpp"
#include "ltr/pipeline/synthetic.hpp"
#include "ltr/pipeline/transfer.hpp"
#include "ltr/trajectory/template_match.hpp"
#include "support/checks.hpp"
#include "support/metric_oracles.hpp"
#include "support/random_crf.hpp"
#include "support/sim_dynamic.hpp"
#include "support/sim_trajectory.hpp"

using namespace ltr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool documented_gap = false;  // fails only on the inconsistent F1 target
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1-4: inference and learning ----

Outcome lattice_matches_exact() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int k = 0; k < 20; ++k) {
    const auto r = sim::random_crf(rng, {16, 16, 64, 3 + k % 3, 0.3});
    const crf::CrfProblem p = sim::assemble(r);
    crf::InferenceOptions exact, lattice;
    exact.iterations = lattice.iterations = 10;
    exact.filter = crf::FilterMode::Exact;
    lattice.filter = crf::FilterMode::Lattice;
    const auto a = crf::mean_field_infer(p, exact);
    const auto b = crf::mean_field_infer(p, lattice);
    worst = std::max(worst, (a.q - b.q).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-3 && secs < 10.0, fmt("20 instances, max L-inf %.3g (<= 1e-3), %.2f s (< 10 s)", worst, secs)};
}

Outcome zero_pairwise_is_softmax() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto r = sim::random_crf(rng, {8, 8, 24, 3 + k % 3, 0.0});
    for (auto& c : r.weights.compat) c.intra = c.inter = 0.0;
    const crf::CrfProblem p = sim::assemble(r);
    crf::InferenceOptions o;
    o.filter = k % 2 ? crf::FilterMode::Lattice : crf::FilterMode::Exact;
    const auto q = crf::mean_field_infer(p, o);
    for (int i = 0; i < p.size(); ++i) {
      double z = 0.0;
      for (int s = 0; s < p.labels; ++s)
        if (p.admissible[i * p.labels + s]) z += std::exp(-p.unary(i, s));
      for (int s = 0; s < p.labels; ++s) {
        const double expect = p.admissible[i * p.labels + s] ? std::exp(-p.unary(i, s)) / z : 0.0;
        worst = std::max(worst, std::abs(q.q(i, s) - expect));
      }
    }
  }
  return {worst <= 1e-9, fmt("100 instances, max deviation %.3g (<= 1e-9)", worst)};
}

// Expected energy under q plus negative entropy, by enumerating labelings.
double enumerated_free_energy(const crf::CrfProblem& p, const crf::Matrix& q) {
  const int n = p.size();
  std::vector<int> lab(n, 0);
  double expect = 0.0;
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < n && w > 0.0; ++i) w *= q(i, lab[i]);
    if (w > 0.0) expect += w * crf::compute_energy(p, lab);
    int i = 0;
    while (i < n && ++lab[i] == p.labels) lab[i++] = 0;
    if (i == n) break;
  }
  double neg_entropy = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i)
    if (q.data()[i] > 0.0) neg_entropy += q.data()[i] * std::log(q.data()[i]);
  return expect + neg_entropy;
}

Outcome free_energy_descends() {
  std::mt19937_64 rng(103);
  int increases = 0, updates = 0;
  double worst_rise = 0.0, worst_oracle = 0.0;
  for (int k = 0; k < 50; ++k) {
    const crf::CrfProblem p = sim::assemble(sim::random_crf(rng, {3, 2, 4, 3, 1.5, 0.8}));
    if (p.size() > 12) return {false, fmt("instance %d has %d variables", k, p.size())};
    double prev = crf::free_energy(p, crf::masked_softmax(-p.unary, &p.admissible));
    crf::Matrix last;
    crf::mean_field_sequential(p, 3, crf::ConstraintMode::Hard, [&](const crf::Matrix& q) {
      const double f = crf::free_energy(p, q);
      ++updates;
      if (f > prev + 1e-12) {
        ++increases;
        worst_rise = std::max(worst_rise, f - prev);
      }
      prev = f;
      last = q;
    });
    worst_oracle = std::max(worst_oracle, std::abs(enumerated_free_energy(p, last) - prev));
  }
  return {increases == 0 && worst_oracle <= 1e-9,
          fmt("50 instances, %d updates, %d increases (max rise %.3g), |F - enumeration| <= %.3g", updates, increases,
              worst_rise, worst_oracle)};
}

Outcome gradients_match_finite_differences() {
  std::mt19937_64 rng(104);
  double worst = 0.0;
  std::string where;
  for (int k = 0; k < 10; ++k) {
    auto r = sim::random_sample(rng, {12, 12, 60, 3, 0.8});
    if (r.sample.pixels.size() + r.sample.points.size() > 256) return {false, "instance exceeds 256 variables"};
    r.weights.whitening.mean = {0.3, 1.0, 0.4};
    r.weights.whitening.stddev = {0.5, 0.8, 0.5};
    r.weights.lambda = 0.01;
    if (k % 2) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Random(3, 3) * 0.5;
      r.weights.compat[1].full = (m + m.transpose()) / 2;
    }
    learning::ObjectiveOptions o;
    o.constraints = k % 3 == 0 ? crf::ConstraintMode::Hard : crf::ConstraintMode::Soft;
    const auto e = learning::evaluate(r.weights, {r.sample}, o);
    const Eigen::VectorXd fd = learning::finite_difference_gradient(r.weights, {r.sample}, o);
    for (const auto& g : crf::parameter_groups(r.weights)) {
      const double err = sim::relative_error(e.gradient.segment(g.offset, g.count), fd.segment(g.offset, g.count));
      if (err > worst) {
        worst = err;
        where = g.name;
      }
    }
  }
  return {worst <= 1e-3, fmt("10 instances, worst group relative error %.3g (%s) (<= 1e-3)", worst, where.c_str())};
}

// ---- 5, 6, 11: synthetic end-to-end ----

struct SyntheticRun {
  pipeline::SyntheticScene scene;
  std::vector<std::vector<int>> codes;  // predicted, per frame
  std::vector<std::vector<double>> confidence;
  double seconds = 0.0;
};

SyntheticRun run_synthetic(const fs::path& dir, const std::string& output) {
  SyntheticRun run;
  run.scene = pipeline::write_synthetic_scene(dir.string(), {});
  pipeline::PipelineConfig c = run.scene.config;
  c.paths.output = (dir / output).string();
  const auto t0 = Clock::now();
  const auto summary = pipeline::cmd_transfer(c);
  run.seconds = seconds_since(t0);
  if (!summary.failures.empty()) throw std::runtime_error("frame " + summary.failures[0].frame + " failed");
  for (const auto& name : run.scene.frame_names) {
    const auto l = io::read_png16((fs::path(c.paths.output) / (name + "_label.png")).string());
    const auto q = io::read_png16((fs::path(c.paths.output) / (name + "_conf.png")).string());
    run.codes.emplace_back(l.data.begin(), l.data.end());
    std::vector<double> conf;
    for (auto v : q.data) conf.push_back(pipeline::decode_confidence(v));
    run.confidence.push_back(std::move(conf));
  }
  return run;
}

std::vector<int> semantic(const std::vector<std::vector<int>>& frames) {
  std::vector<int> out;
  for (const auto& f : frames)
    for (int code : f) out.push_back(code / 1000);
  return out;
}

Outcome synthetic_transfer(const SyntheticRun& run) {
  const auto gt = semantic(run.scene.ground_truth), pred = semantic(run.codes);
  const double miou = metrics::miou(gt, pred, {});
  // Most frequent predicted car code over the moving car's true pixels.
  std::vector<int> ids;
  for (std::size_t k = 0; k < run.codes.size(); ++k) {
    std::map<int, int> votes;
    for (std::size_t i = 0; i < run.codes[k].size(); ++i)
      if (run.scene.ground_truth[k][i] == run.scene.dynamic_code && run.codes[k][i] / 1000 == run.scene.dynamic_code / 1000)
        ++votes[run.codes[k][i]];
    int best = -1, count = 0;
    for (const auto& [code, n] : votes)
      if (n > count) best = code, count = n;
    ids.push_back(best);
  }
  const bool consistent = std::all_of(ids.begin(), ids.end(), [&](int id) { return id >= 0 && id == ids.front(); });
  return {miou >= 0.90 && consistent && run.seconds < 60.0,
          fmt("mIoU %.4f (>= 0.90), dynamic car code %d in all %zu frames: %s, %.2f s (< 60 s)", miou, ids.front(),
              ids.size(), consistent ? "yes" : "no", run.seconds)};
}

Outcome confidence_calibration(const SyntheticRun& run) {
  const auto gt = semantic(run.scene.ground_truth), pred = semantic(run.codes);
  std::vector<double> conf;
  for (const auto& f : run.confidence) conf.insert(conf.end(), f.begin(), f.end());
  const double at70 = metrics::confidence_filtered_eval(gt, pred, conf, 0.7).accuracy;
  const double at100 = metrics::confidence_filtered_eval(gt, pred, conf, 1.0).accuracy;
  return {at70 >= at100, fmt("accuracy %.4f at 70%% density vs %.4f at 100%%", at70, at100)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& dir) {
  pipeline::SyntheticScene scene = pipeline::write_synthetic_scene(dir.string(), {});
  pipeline::PipelineConfig a = scene.config, b = scene.config;
  a.paths.output = (dir / "run_a").string();
  b.paths.output = (dir / "run_b").string();
  pipeline::cmd_transfer(a);
  pipeline::cmd_transfer(b);
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(a.paths.output)) {
    ++files;
    const fs::path other = fs::path(b.paths.output) / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  const int files_b = static_cast<int>(std::distance(fs::directory_iterator(b.paths.output), fs::directory_iterator{}));
  return {differ == 0 && files == files_b && files > 0, fmt("%d output files, %d differ", files, differ)};
}

// ---- 7: metric oracles ----

Outcome metric_oracles() {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<int> cls(0, 4);
  int iou_mismatch = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<int> gt(32 * 32), pred(32 * 32);
    for (auto& v : gt) v = cls(rng);
    for (auto& v : pred) v = cls(rng);
    for (int c = 0; c < 5; ++c)
      if (metrics::weighted_iou(gt, pred, {}, c) != sim::confusion_iou(gt, pred, c)) ++iou_mismatch;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double match_gap = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto gt = sim::random_instance_map(rng, 12, 12, 1 + t % 4);
    const auto pred = sim::perturb_instances(rng, gt, 12, 12);
    std::vector<double> conf(gt.size());
    for (auto& c : conf) c = u(rng);
    const auto r = metrics::match_instances(gt, pred, conf, metrics::Matching::Optimal);
    double total = 0.0;
    for (const auto& [g, p] : r.assignment) total += r.pair_iou.at({g, p});
    match_gap = std::max(match_gap, std::abs(total - sim::brute_force_matching_total(r.pair_iou)));
  }
  const double f1 = 100.0 * metrics::f1_score(0.982, 0.191);
  const bool a = iou_mismatch == 0, b = match_gap <= 1e-12, c = std::abs(f1 - 32.4) <= 0.05;
  Outcome o{a && b && c,
            fmt("weighted IoU vs confusion: %d mismatches; optimal matching vs enumeration: gap %.3g; "
                "F1(98.2, 19.1) = %.2f (target 32.4 +- 0.05)",
                iou_mismatch, match_gap, f1)};
  o.documented_gap = a && b && !c;
  return o;
}

// ---- 8-10 ----

Outcome dynamic_detection() {
  const auto scene = sim::make_moving_box_scene();
  std::vector<pointcloud::StampedCloud> frames;
  for (std::size_t i = 0; i < scene.scans.size(); ++i)
    frames.push_back({geometry::Pose::from_translation(scene.sensor),
                      scene.scans[i].transformed(geometry::Pose::from_translation(-scene.sensor)),
                      static_cast<double>(i), static_cast<int>(i)});
  const auto out = dynamic_detect::run_detector(frames);
  std::size_t box = 0, box_flag = 0, wall = 0, wall_flag = 0;
  for (std::size_t i = 0; i < out.cloud.size(); ++i) {
    const bool is_wall = out.cloud.positions[i].x() > scene.wall_x - 0.05;
    (is_wall ? wall : box)++;
    if (out.detection.dynamic[i]) (is_wall ? wall_flag : box_flag)++;
  }
  const double box_rate = box ? static_cast<double>(box_flag) / box : 0.0;
  const double wall_rate = wall ? static_cast<double>(wall_flag) / wall : 1.0;
  return {box > 0 && box_rate >= 0.95 && wall_rate <= 0.01,
          fmt("box points flagged %.4f (>= 0.95) of %zu, wall points flagged %.4f (<= 0.01) of %zu", box_rate, box,
              wall_rate, wall)};
}

Outcome trajectory_recovery() {
  const auto scene = sim::make_constant_velocity_scene(20, {0, 10, 19});
  std::vector<trajectory::TimedCloud> kf;
  for (const auto& key : scene.keys.keyframes)
    for (const auto& f : scene.frames)
      if (f.timestamp == key.timestamp) kf.push_back(f);
  const auto tmpl = trajectory::build_template(scene.keys, kf, 0.2);
  const auto r = trajectory::interpolate_trajectory(scene.keys, tmpl, scene.frames);
  if (r.poses.size() != scene.frames.size()) return {false, fmt("%zu of %zu frames recovered", r.poses.size(), scene.frames.size())};
  double worst = 0.0;
  for (std::size_t i = 0; i < r.poses.size(); ++i)
    worst = std::max(worst, (r.poses[i].pose.translation() - scene.truth[i].translation()).norm());
  return {worst <= 0.2, fmt("20 frames, 3 keyframes, max position error %.4f m (<= 0.2)", worst)};
}

Outcome adadelta_first_step() {
  learning::OptimizerState st;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(1), g = Eigen::VectorXd::Ones(1);
  const double d = learning::adadelta_step(st, theta, g)[0];
  return {std::abs(d - -4.4721e-4) <= 1e-8, fmt("first update %.8e (target -4.4721e-4 +- 1e-8)", d)};
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "ltr_acceptance";
  fs::remove_all(root);
  int failed = 0, gaps = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%-4s %2d  %-34s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) (o.documented_gap ? gaps : failed)++;
  };

  std::optional<SyntheticRun> run;
  auto synthetic = [&]() -> const SyntheticRun& {
    if (!run) run = run_synthetic(root / "scene", "output");
    return *run;
  };

  report(1, "mean-field lattice vs exact", lattice_matches_exact);
  report(2, "zero-pairwise softmax", zero_pairwise_is_softmax);
  report(3, "free-energy descent", free_energy_descends);
  report(4, "unrolled gradient", gradients_match_finite_differences);
  report(5, "synthetic end-to-end transfer", [&] { return synthetic_transfer(synthetic()); });
  report(6, "confidence calibration", [&] { return confidence_calibration(synthetic()); });
  report(7, "metric oracles", metric_oracles);
  report(8, "dynamic detection", dynamic_detection);
  report(9, "trajectory recovery", trajectory_recovery);
  report(10, "ADADELTA first step", adadelta_first_step);
  report(11, "determinism", [&] { return determinism(root / "determinism"); });

  std::printf("%d failed, %d failed on the inconsistent F1 target only\n", failed, gaps);
  fs::remove_all(root);
  return failed == 0 ? 0 : 1;
}
