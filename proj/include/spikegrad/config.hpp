#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikegrad/forward.hpp"
#include "spikegrad/train.hpp"

namespace spikegrad {

enum class ExperimentKind { PoissonFit, GradCompare, Bench, IftCheck };

struct NeuronConfig {
  std::string kind = "lif";        // "lif" | "if"
  double tau_s = 0.02;             // ignored for "if"
  double theta = 1.0;
  std::string reset = "lif";       // "lif" | "none" (nu == 0, spike response kept)

  bool operator==(const NeuronConfig&) const = default;
};

struct SurrogateConfig {
  std::string family = "exponential";  // exponential | piecewise_linear | tanh | sigmoid
  double width = 1.0;
  double scale = 1.0;

  bool operator==(const SurrogateConfig&) const = default;
};

struct NetworkConfig {
  int input_channels = 250;
  std::vector<int> layer_widths = {25, 1};

  bool operator==(const NetworkConfig&) const = default;
};

struct TimeConfig {
  int steps = 200;
  double dt_s = 1e-3;

  bool operator==(const TimeConfig&) const = default;
};

struct LossConfig {
  std::string kind = "mse";          // mse | ce_sum | ce_max
  std::string signal = "filtered";   // filtered | raw

  bool operator==(const LossConfig&) const = default;
};

struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  bool operator==(const OptimizerConfig&) const = default;
};

struct PoissonConfig {
  double rate_hz = 10.0;
  int target_spikes = 4;

  bool operator==(const PoissonConfig&) const = default;
};

struct BenchConfig {
  std::vector<int> steps_sweep = {128, 512, 2048};
  int repeats = 5;
  int warmup = 2;

  bool operator==(const BenchConfig&) const = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::PoissonFit;
  std::vector<Engine> engines = {Engine::Exodus, Engine::Slayer};
  std::uint64_t seed = 1;
  int epochs = 3000;
  NetworkConfig network;
  NeuronConfig neuron;
  SurrogateConfig surrogate;
  TimeConfig time;
  LossConfig loss;
  OptimizerConfig optimizer;
  PoissonConfig poisson;
  BenchConfig bench;
  std::vector<double> scales = {0.1, 1.0, 10.0};
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

/// Throws CheckError with a readable message on any inconsistency.
void validate_config(const ExperimentConfig& cfg);

// Translation between config strings and the library types.
ExperimentKind experiment_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);
Engine engine_from_string(const std::string& name);
SurrogateFamily surrogate_family_from_string(const std::string& name);
std::string to_string(SurrogateFamily family);

/// Kernel/surrogate/optimizer objects realized from the config.
LifParams lif_from_config(const ExperimentConfig& cfg);
SrmKernels kernels_from_config(const ExperimentConfig& cfg);
SurrogateSpec surrogate_from_config(const ExperimentConfig& cfg);
AdamParams adam_from_config(const ExperimentConfig& cfg);
LossSpec loss_from_config(const ExperimentConfig& cfg, const TimeSeries& target, Index label);
Network network_from_config(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace spikegrad
