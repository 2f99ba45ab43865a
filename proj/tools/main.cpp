// ltr: command-line front end of the label transfer pipeline.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "ltr/error.hpp"
#include "ltr/pipeline/commands.hpp"
#include "ltr/pipeline/config.hpp"
#include "ltr/pipeline/transfer.hpp"

namespace {

using namespace ltr;
using pipeline::PipelineConfig;

constexpr int kUsageError = 2;
constexpr int kDataError = 1;

struct Globals {
  std::string config;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string filter;
};

struct PathFlags {
  std::string frames, primitives, weights, cloud, poses, output;
};

void add_path_flags(CLI::App* cmd, PathFlags& p, bool frames, bool primitives, bool weights) {
  if (frames) cmd->add_option("--frames", p.frames, "frame manifest (JSON)");
  if (primitives) cmd->add_option("--primitives", p.primitives, "primitive list (JSON)");
  if (weights) cmd->add_option("--weights", p.weights, "model weights (JSON)");
  cmd->add_option("--output", p.output, "output directory");
}

PipelineConfig make_config(const Globals& g, const PathFlags& p) {
  PipelineConfig c;
  if (!g.config.empty()) {
    if (!std::filesystem::exists(g.config)) throw ConfigError("config not found: " + g.config);
    c = pipeline::load_config(g.config);
  }
  auto set = [](std::string& dst, const std::string& src) {
    if (!src.empty()) dst = src;
  };
  set(c.paths.frames, p.frames);
  set(c.paths.primitives, p.primitives);
  set(c.paths.weights, p.weights);
  set(c.paths.cloud, p.cloud);
  set(c.paths.poses, p.poses);
  set(c.paths.output, p.output);
  if (g.threads) c.threads = c.training.objective.threads = *g.threads;
  if (g.seed) c.seed = c.training.seed = *g.seed;
  if (!g.filter.empty()) c.inference.filter = crf::filter_mode_from_string(g.filter);
  c.validate();
  return c;
}

void print(const io::Json& report) { std::cout << report.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense semantic and instance label transfer from coarse 3D bounding primitives"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "pipeline configuration (JSON)");
  app.add_option("--threads", g.threads, "worker threads; 0 = hardware concurrency")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--filter", g.filter, "mean-field filtering")->check(CLI::IsMember({"exact", "lattice"}));

  PathFlags paths;
  std::string mode;
  auto* transfer = app.add_subcommand("transfer", "infer per-frame label and confidence maps and a fused labeled cloud");
  add_path_flags(transfer, paths, true, true, true);
  transfer->add_option("--cloud", paths.cloud, "static world cloud (PLY) instead of accumulating scans");
  transfer->add_option("--poses", paths.poses, "camera pose file indexed by frame");
  transfer->add_option("--mode", mode, "label mode")->check(CLI::IsMember({"semantic", "instance"}));

  auto* accumulate = app.add_subcommand("accumulate", "fuse the manifest scans into one static cloud");
  add_path_flags(accumulate, paths, true, true, false);

  auto* detect = app.add_subcommand("detect-dynamic", "flag points of moving objects");
  add_path_flags(detect, paths, true, false, false);

  std::optional<int> primitive_id;
  auto* fit = app.add_subcommand("fit-trajectory", "recover dynamic primitive poses between annotated keyframes");
  add_path_flags(fit, paths, true, true, false);
  fit->add_option("--id", primitive_id, "only this primitive");

  bool cross_validate = false;
  auto* train = app.add_subcommand("train-weights", "learn CRF weights from ground-truth label maps");
  add_path_flags(train, paths, true, true, true);
  train->add_flag("--cross-validate", cross_validate, "choose lambda by 3-fold cross-validation");

  pipeline::SemanticEvalOptions sem;
  auto* eval_sem = app.add_subcommand("evaluate-semantic", "confidence-weighted semantic IoU");
  eval_sem->add_option("--gt", sem.gt, "ground-truth label PNG or directory")->required();
  eval_sem->add_option("--pred", sem.pred, "predicted label PNG or directory")->required();
  eval_sem->add_flag("--gt-confidence", sem.gt_confidence, "weight pixels by the ground-truth confidence maps");
  eval_sem->add_option("--density", sem.density, "keep this fraction of most confident predictions")
      ->check(CLI::Range(0.0, 1.0));
  eval_sem->add_option("--output", paths.output, "output directory");

  pipeline::InstanceEvalOptions inst;
  std::string matching;
  auto* eval_inst = app.add_subcommand("evaluate-instance", "instance mIoU and average precision");
  eval_inst->add_option("--gt", inst.gt, "ground-truth label PNG or directory")->required();
  eval_inst->add_option("--pred", inst.pred, "predicted label PNG or directory")->required();
  eval_inst->add_option("--matching", matching, "instance matching")->check(CLI::IsMember({"greedy", "optimal"}));
  eval_inst->add_option("--output", paths.output, "output directory");

  pipeline::CompletionEvalOptions comp;
  std::optional<double> threshold;
  auto* eval_comp = app.add_subcommand("evaluate-completion", "completeness, accuracy and F1 of a 3D reconstruction");
  eval_comp->add_option("--gt", comp.gt, "ground-truth cloud (PLY)")->required();
  eval_comp->add_option("--pred", comp.pred, "predicted cloud (PLY)")->required();
  eval_comp->add_option("--threshold", threshold, "distance threshold, meters")->check(CLI::PositiveNumber);
  eval_comp->add_flag("--observed", comp.observed_from_scans, "score predictions only inside voxels the scans observed");
  eval_comp->add_option("--frames", paths.frames, "frame manifest for --observed");
  eval_comp->add_option("--output", paths.output, "output directory");

  pipeline::TrajectoryEvalOptions traj;
  std::optional<double> delta;
  auto* eval_traj = app.add_subcommand("evaluate-trajectory", "APE and RPE of an estimated trajectory");
  eval_traj->add_option("--gt", traj.gt, "ground-truth pose file")->required();
  eval_traj->add_option("--est", traj.est, "estimated pose file")->required();
  eval_traj->add_flag("--windowed", traj.windowed, "evaluate over local windows");
  eval_traj->add_flag("--similarity", traj.similarity, "align with scale");
  eval_traj->add_option("--delta", delta, "RPE distance, meters")->check(CLI::PositiveNumber);
  eval_traj->add_option("--output", paths.output, "output directory");

  std::string config_out;
  auto* write_config = app.add_subcommand("write-config", "write the default configuration with comments");
  write_config->add_option("path", config_out, "destination JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsageError;
  }

  try {
    if (*write_config) {
      io::write_json(config_out, pipeline::config_to_json(PipelineConfig{}));
      return 0;
    }
    PipelineConfig cfg = make_config(g, paths);
    if (!mode.empty()) cfg.mode = crf::label_mode_from_string(mode);
    if (!matching.empty()) cfg.metrics.matching = matching == "greedy" ? metrics::Matching::Greedy : metrics::Matching::Optimal;
    if (threshold) cfg.metrics.completion_threshold = *threshold;
    if (delta) cfg.metrics.rpe_delta = *delta;
    if (cross_validate) cfg.cross_validate = true;

    if (*transfer) {
      const pipeline::TransferSummary s = pipeline::cmd_transfer(cfg);
      std::cout << "frames " << s.frames << ", processed " << s.processed << ", failed " << s.failures.size()
                << ", fused points " << s.fused_points << " (" << s.unknown_points << " unknown)\n";
      for (const auto& f : s.failures) std::cerr << "frame " << f.frame << " skipped: " << f.error << '\n';
      return s.failures.empty() ? 0 : kDataError;
    }
    if (*accumulate) print(pipeline::cmd_accumulate(cfg));
    if (*detect) print(pipeline::cmd_detect_dynamic(cfg));
    if (*fit) print(pipeline::cmd_fit_trajectory(cfg, primitive_id));
    if (*train) print(pipeline::cmd_train(cfg));
    if (*eval_sem) print(pipeline::cmd_evaluate_semantic(cfg, sem));
    if (*eval_inst) print(pipeline::cmd_evaluate_instance(cfg, inst));
    if (*eval_comp) print(pipeline::cmd_evaluate_completion(cfg, comp));
    if (*eval_traj) print(pipeline::cmd_evaluate_trajectory(cfg, traj));
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
}
