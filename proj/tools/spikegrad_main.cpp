#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikegrad/check.hpp"
#include "spikegrad/config.hpp"
#include "spikegrad/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> engines;
  std::vector<double> scales;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int epochs = -1;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--engine", opts.engines, "Engine (repeatable): exodus|slayer|bptt");
  cmd->add_option("--scale", opts.scales, "Surrogate gradient scale (repeatable)");
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--seed", opts.seed, "Random seed")->each([&opts](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_option("--epochs", opts.epochs, "Training epochs");
}

spikegrad::ExperimentConfig build_config(const CommonOpts& opts,
                                         spikegrad::ExperimentKind kind) {
  spikegrad::ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = spikegrad::load_config_file(opts.config_path);
  cfg.experiment = kind;
  if (!opts.engines.empty()) {
    cfg.engines.clear();
    for (const std::string& name : opts.engines) {
      cfg.engines.push_back(spikegrad::engine_from_string(name));
    }
  }
  if (!opts.scales.empty()) cfg.scales = opts.scales;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.epochs >= 0) cfg.epochs = opts.epochs;
  spikegrad::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spikegrad: spiking-network gradient engines and experiments"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* poisson = app.add_subcommand("poisson-fit", "Spike train fitting experiment");
  CLI::App* compare = app.add_subcommand("grad-compare", "Per-layer gradient norm comparison");
  CLI::App* bench = app.add_subcommand("bench", "Forward+backward wall-time sweep");
  CLI::App* ift = app.add_subcommand("ift-check", "Dense Jacobian self-checks");
  for (CLI::App* cmd : {poisson, compare, bench, ift}) attach_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage problems count as config errors
  }

  spikegrad::ExperimentKind kind = spikegrad::ExperimentKind::PoissonFit;
  if (compare->parsed()) kind = spikegrad::ExperimentKind::GradCompare;
  if (bench->parsed()) kind = spikegrad::ExperimentKind::Bench;
  if (ift->parsed()) kind = spikegrad::ExperimentKind::IftCheck;

  try {
    const spikegrad::ExperimentConfig cfg = build_config(opts, kind);
    return spikegrad::run_experiment(cfg, std::cout);
  } catch (const spikegrad::CheckError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
