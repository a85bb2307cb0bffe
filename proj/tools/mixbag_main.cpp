// Command-line experiment runner. Subcommands:
//   run             train/evaluate per the config, write result.json + logs
//   sweep           bag-count / bag-size sweeps, write sweep CSV
//   export-scatter  2D PCA of original vs. mixed proportion vectors
//   export-ci-gap   per-mixed-bag proportion gap vs. CI width
//   make-blobs      write a synthetic Gaussian-blob dataset as CSV
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixbag.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out-dir", opts.out_dir, "output directory (overrides config)");
  opts.seed_opt = cmd->add_option("--seed", opts.seed, "base seed (overrides config)");
}

mixbag::ExperimentConfig load_config(const CommonOpts& opts) {
  mixbag::ExperimentConfig cfg = mixbag::load_experiment_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.seed_opt->count() > 0) cfg.seed = opts.seed;
  return cfg;
}

int cmd_run(const CommonOpts& opts) {
  mixbag::ExperimentConfig cfg = load_config(opts);
  mixbag::RunResult res = mixbag::run_experiment(cfg);
  std::cout << "config_hash=" << res.config_hash << "\n";
  for (std::size_t i = 0; i < res.per_seed_accuracy.size(); ++i)
    std::cout << "seed " << i << ": accuracy " << res.per_seed_accuracy[i] << "\n";
  std::cout << "mean accuracy: " << res.mean_accuracy << "\n"
            << "wall time: " << res.wall_seconds << " s\n"
            << "results written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_sweep(const CommonOpts& opts) {
  mixbag::ExperimentConfig cfg = load_config(opts);
  if (cfg.sweep.levels.empty())
    throw mixbag::ConfigError("sweep: config must provide sweep.mode and sweep.levels");
  std::vector<mixbag::SweepRow> rows =
      mixbag::run_preliminary_sweep(cfg, cfg.sweep.mode, cfg.sweep.levels);
  for (const mixbag::SweepRow& r : rows)
    std::cout << "level " << r.level << ": mean accuracy " << r.mean_accuracy << "\n";
  std::cout << "sweep CSV written to " << cfg.out_dir << "\n";
  return 0;
}

// Bags plus mixed labels for the export commands, generated from the config.
struct ExportInputs {
  mixbag::Dataset dataset;
  std::vector<mixbag::Bag> bags;
  std::vector<std::pair<mixbag::Bag, mixbag::MixedBagLabel>> mixed;
};

ExportInputs build_export_inputs(const mixbag::ExperimentConfig& cfg) {
  ExportInputs in;
  in.dataset = mixbag::detail::build_dataset(cfg.dataset, cfg.seed);
  mixbag::BagGenConfig bcfg = cfg.bags;
  bcfg.rng_seed = mixbag::derive_seed(cfg.seed, 2);
  in.bags = mixbag::make_bags(in.dataset, bcfg);
  const int count = cfg.export_num_mixed > 0 ? cfg.export_num_mixed : cfg.bags.num_bags;
  in.mixed = mixbag::generate_mixed_bags(in.bags, count, cfg.train.gamma_strategy,
                                         cfg.train.confidence_degree, mixbag::derive_seed(cfg.seed, 3));
  return in;
}

int cmd_export_scatter(const CommonOpts& opts) {
  mixbag::ExperimentConfig cfg = load_config(opts);
  std::filesystem::create_directories(cfg.out_dir);
  ExportInputs in = build_export_inputs(cfg);
  std::vector<mixbag::MixedBagLabel> labels;
  labels.reserve(in.mixed.size());
  for (const auto& m : in.mixed) labels.push_back(m.second);
  const std::string path = cfg.out_dir + "/proportion_scatter.csv";
  int components = mixbag::export_proportion_scatter(in.bags, labels, path);
  if (components < 2)
    std::cerr << "warning: rank-deficient proportion covariance, " << components
              << " component(s) found; missing axes zero-filled\n";
  std::cout << "scatter written to " << path << "\n";
  return 0;
}

int cmd_export_ci_gap(const CommonOpts& opts) {
  mixbag::ExperimentConfig cfg = load_config(opts);
  std::filesystem::create_directories(cfg.out_dir);
  ExportInputs in = build_export_inputs(cfg);
  const std::string path = cfg.out_dir + "/ci_gap.csv";
  mixbag::export_ci_gap_scatter(in.dataset, in.mixed, path);
  std::cout << "ci-gap scatter written to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learning from label proportions with bag-level augmentation"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, scatter_opts, gap_opts;
  add_common(app.add_subcommand("run", "run an experiment"), run_opts);
  add_common(app.add_subcommand("sweep", "run a preliminary sweep"), sweep_opts);
  add_common(app.add_subcommand("export-scatter", "export the proportion-vector PCA scatter"),
             scatter_opts);
  add_common(app.add_subcommand("export-ci-gap", "export gap-vs-CI-width rows"), gap_opts);

  auto* blobs = app.add_subcommand("make-blobs", "write a synthetic blob dataset as CSV");
  int bl_classes = 3, bl_per_class = 400, bl_dim = 8;
  double bl_spread = 0.6;
  std::uint64_t bl_seed = 1;
  std::string bl_out = "blobs.csv";
  blobs->add_option("--classes", bl_classes, "number of classes");
  blobs->add_option("--per-class", bl_per_class, "instances per class");
  blobs->add_option("--dim", bl_dim, "feature dimension");
  blobs->add_option("--spread", bl_spread, "gaussian spread");
  blobs->add_option("--seed", bl_seed, "seed");
  blobs->add_option("--out", bl_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return cmd_run(run_opts);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_opts);
    if (app.got_subcommand("export-scatter")) return cmd_export_scatter(scatter_opts);
    if (app.got_subcommand("export-ci-gap")) return cmd_export_ci_gap(gap_opts);
    if (app.got_subcommand("make-blobs")) {
      mixbag::Rng rng(bl_seed);
      mixbag::Dataset ds = mixbag::make_blobs(bl_classes, bl_per_class, bl_dim, bl_spread, rng);
      mixbag::save_csv(ds, bl_out);
      std::cout << "wrote " << ds.size() << " instances to " << bl_out << "\n";
      return 0;
    }
  } catch (const mixbag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
