#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spikegrad/config.hpp"
#include "spikegrad/gradient.hpp"

namespace spikegrad {

/// Deterministic stream split of a base seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Bernoulli spike train with per-bin probability rate_hz * dt_s.
SpikeTrain poisson_spike_train(Index channels, Index steps, double rate_hz, double dt_s,
                               std::uint64_t seed);

/// Per neuron, `spikes` distinct random bins set to 1.
SpikeTrain random_target_train(Index neurons, Index steps, int spikes, double dt_s,
                               std::uint64_t seed);

struct PoissonRun {
  std::vector<double> per_epoch_loss;
  double summed_loss = 0.0;
};

/// One training run of the spike-train fitting task. The same seed yields
/// the same input, target and initial weights for every engine.
PoissonRun poisson_fit_run(const ExperimentConfig& cfg, Engine engine, std::uint64_t seed);

struct GradCompareRow {
  std::string engine;
  double scale = 1.0;
  int layer = 0;
  double grad_norm = 0.0;
};

/// One backward per (engine, scale) on a fixed seeded net and synthetic
/// spike data; shared forward trace per scale.
std::vector<GradCompareRow> grad_compare_rows(const ExperimentConfig& cfg);

struct BenchRow {
  std::string engine;
  int steps = 0;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

/// Wall-time of forward+backward per engine across the configured T sweep,
/// with warm-up; reports data, asserts nothing.
std::vector<BenchRow> bench_rows(const ExperimentConfig& cfg);

struct IftCheckResult {
  struct Entry {
    std::string name;
    bool pass = false;
    double metric = 0.0;
    double tolerance = 0.0;
  };
  std::vector<Entry> entries;
  bool all_pass() const;
};

/// Dense-Jacobian structure checks on random traces: unit determinant,
/// dense solve vs recursive sigma, closed-form vs iterative gamma, decay
/// bound under a clamped surrogate, plus a sign-flip mutation canary.
IftCheckResult ift_check_run(const ExperimentConfig& cfg);

std::string config_run_id(const ExperimentConfig& cfg);

// CLI entry points. Each writes CSV plus a JSON summary under cfg.out_dir
// and returns a process exit code (0 ok, 2 check failure).
int run_poisson_fit(const ExperimentConfig& cfg, std::ostream& log);
int run_grad_compare(const ExperimentConfig& cfg, std::ostream& log);
int run_bench(const ExperimentConfig& cfg, std::ostream& log);
int run_ift_check(const ExperimentConfig& cfg, std::ostream& log);
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace spikegrad
