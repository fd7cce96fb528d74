#include "spikegrad/config.hpp"

#include <fstream>
#include <json.hpp>

#include "spikegrad/check.hpp"

namespace spikegrad {

using nlohmann::json;

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "poisson_fit") return ExperimentKind::PoissonFit;
  if (name == "grad_compare") return ExperimentKind::GradCompare;
  if (name == "bench") return ExperimentKind::Bench;
  if (name == "ift_check") return ExperimentKind::IftCheck;
  fail_check("unknown experiment kind: " + name);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::PoissonFit: return "poisson_fit";
    case ExperimentKind::GradCompare: return "grad_compare";
    case ExperimentKind::Bench: return "bench";
    case ExperimentKind::IftCheck: return "ift_check";
  }
  return "unknown";
}

Engine engine_from_string(const std::string& name) {
  if (name == "exodus") return Engine::Exodus;
  if (name == "slayer") return Engine::Slayer;
  if (name == "bptt") return Engine::Bptt;
  fail_check("unknown engine: " + name);
}

SurrogateFamily surrogate_family_from_string(const std::string& name) {
  if (name == "exponential") return SurrogateFamily::Exponential;
  if (name == "piecewise_linear") return SurrogateFamily::PiecewiseLinear;
  if (name == "tanh") return SurrogateFamily::TanhDerivative;
  if (name == "sigmoid") return SurrogateFamily::SigmoidDerivative;
  fail_check("unknown surrogate family: " + name);
}

std::string to_string(SurrogateFamily family) {
  switch (family) {
    case SurrogateFamily::Exponential: return "exponential";
    case SurrogateFamily::PiecewiseLinear: return "piecewise_linear";
    case SurrogateFamily::TanhDerivative: return "tanh";
    case SurrogateFamily::SigmoidDerivative: return "sigmoid";
  }
  return "unknown";
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json engines = json::array();
  for (Engine e : cfg.engines) engines.push_back(engine_name(e));
  json j{
      {"experiment", to_string(cfg.experiment)},
      {"engines", engines},
      {"seed", cfg.seed},
      {"epochs", cfg.epochs},
      {"network", {{"input_channels", cfg.network.input_channels},
                   {"layer_widths", cfg.network.layer_widths}}},
      {"neuron", {{"kind", cfg.neuron.kind},
                  {"tau_s", cfg.neuron.tau_s},
                  {"theta", cfg.neuron.theta},
                  {"reset", cfg.neuron.reset}}},
      {"surrogate", {{"family", cfg.surrogate.family},
                     {"width", cfg.surrogate.width},
                     {"scale", cfg.surrogate.scale}}},
      {"time", {{"steps", cfg.time.steps}, {"dt_s", cfg.time.dt_s}}},
      {"loss", {{"kind", cfg.loss.kind}, {"signal", cfg.loss.signal}}},
      {"optimizer", {{"lr", cfg.optimizer.lr},
                     {"beta1", cfg.optimizer.beta1},
                     {"beta2", cfg.optimizer.beta2},
                     {"eps_hat", cfg.optimizer.eps_hat}}},
      {"poisson", {{"rate_hz", cfg.poisson.rate_hz},
                   {"target_spikes", cfg.poisson.target_spikes}}},
      {"bench", {{"steps_sweep", cfg.bench.steps_sweep},
                 {"repeats", cfg.bench.repeats},
                 {"warmup", cfg.bench.warmup}}},
      {"scales", cfg.scales},
      {"out_dir", cfg.out_dir},
  };
  return j.dump(2);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    fail_check(std::string("config is not valid JSON: ") + err.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("experiment")) cfg.experiment = experiment_from_string(j.at("experiment"));
    if (j.contains("engines")) {
      cfg.engines.clear();
      for (const auto& name : j.at("engines")) {
        cfg.engines.push_back(engine_from_string(name.get<std::string>()));
      }
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();
    if (j.contains("network")) {
      const auto& n = j.at("network");
      if (n.contains("input_channels")) cfg.network.input_channels = n.at("input_channels");
      if (n.contains("layer_widths"))
        cfg.network.layer_widths = n.at("layer_widths").get<std::vector<int>>();
    }
    if (j.contains("neuron")) {
      const auto& n = j.at("neuron");
      if (n.contains("kind")) cfg.neuron.kind = n.at("kind");
      if (n.contains("tau_s")) cfg.neuron.tau_s = n.at("tau_s");
      if (n.contains("theta")) cfg.neuron.theta = n.at("theta");
      if (n.contains("reset")) cfg.neuron.reset = n.at("reset");
    }
    if (j.contains("surrogate")) {
      const auto& s = j.at("surrogate");
      if (s.contains("family")) cfg.surrogate.family = s.at("family");
      if (s.contains("width")) cfg.surrogate.width = s.at("width");
      if (s.contains("scale")) cfg.surrogate.scale = s.at("scale");
    }
    if (j.contains("time")) {
      const auto& t = j.at("time");
      if (t.contains("steps")) cfg.time.steps = t.at("steps");
      if (t.contains("dt_s")) cfg.time.dt_s = t.at("dt_s");
    }
    if (j.contains("loss")) {
      const auto& l = j.at("loss");
      if (l.contains("kind")) cfg.loss.kind = l.at("kind");
      if (l.contains("signal")) cfg.loss.signal = l.at("signal");
    }
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      if (o.contains("lr")) cfg.optimizer.lr = o.at("lr");
      if (o.contains("beta1")) cfg.optimizer.beta1 = o.at("beta1");
      if (o.contains("beta2")) cfg.optimizer.beta2 = o.at("beta2");
      if (o.contains("eps_hat")) cfg.optimizer.eps_hat = o.at("eps_hat");
    }
    if (j.contains("poisson")) {
      const auto& p = j.at("poisson");
      if (p.contains("rate_hz")) cfg.poisson.rate_hz = p.at("rate_hz");
      if (p.contains("target_spikes")) cfg.poisson.target_spikes = p.at("target_spikes");
    }
    if (j.contains("bench")) {
      const auto& b = j.at("bench");
      if (b.contains("steps_sweep"))
        cfg.bench.steps_sweep = b.at("steps_sweep").get<std::vector<int>>();
      if (b.contains("repeats")) cfg.bench.repeats = b.at("repeats");
      if (b.contains("warmup")) cfg.bench.warmup = b.at("warmup");
    }
    if (j.contains("scales")) cfg.scales = j.at("scales").get<std::vector<double>>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir");
  } catch (const json::exception& err) {
    fail_check(std::string("malformed config field: ") + err.what());
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  SG_CHECK(in.good(), "cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

void validate_config(const ExperimentConfig& cfg) {
  SG_CHECK(!cfg.engines.empty(), "config: at least one engine required");
  SG_CHECK(cfg.epochs >= 0, "config: epochs must be non-negative");
  SG_CHECK(cfg.network.input_channels >= 1, "config: input_channels must be positive");
  SG_CHECK(!cfg.network.layer_widths.empty(), "config: network needs at least one layer");
  for (int w : cfg.network.layer_widths) SG_CHECK(w >= 1, "config: layer widths must be positive");
  SG_CHECK(cfg.neuron.kind == "lif" || cfg.neuron.kind == "if",
           "config: neuron.kind must be 'lif' or 'if'");
  SG_CHECK(cfg.neuron.reset == "lif" || cfg.neuron.reset == "none",
           "config: neuron.reset must be 'lif' or 'none'");
  SG_CHECK(cfg.neuron.theta > 0.0, "config: neuron.theta must be positive");
  SG_CHECK(cfg.neuron.kind == "if" || cfg.neuron.tau_s > 0.0,
           "config: neuron.tau_s must be positive");
  surrogate_family_from_string(cfg.surrogate.family);
  SG_CHECK(cfg.surrogate.width > 0.0, "config: surrogate.width must be positive");
  SG_CHECK(cfg.surrogate.scale >= 0.0, "config: surrogate.scale must be non-negative");
  SG_CHECK(cfg.time.steps >= 1, "config: time.steps must be positive");
  SG_CHECK(cfg.time.dt_s > 0.0, "config: time.dt_s must be positive");
  SG_CHECK(cfg.loss.kind == "mse" || cfg.loss.kind == "ce_sum" || cfg.loss.kind == "ce_max",
           "config: loss.kind must be one of mse|ce_sum|ce_max");
  SG_CHECK(cfg.loss.signal == "filtered" || cfg.loss.signal == "raw",
           "config: loss.signal must be 'filtered' or 'raw'");
  SG_CHECK(cfg.optimizer.lr >= 0.0, "config: optimizer.lr must be non-negative");
  SG_CHECK(cfg.poisson.rate_hz >= 0.0, "config: poisson.rate_hz must be non-negative");
  SG_CHECK(cfg.poisson.target_spikes >= 0, "config: poisson.target_spikes must be non-negative");
  SG_CHECK(!cfg.bench.steps_sweep.empty(), "config: bench.steps_sweep must be non-empty");
  for (int t : cfg.bench.steps_sweep) SG_CHECK(t >= 1, "config: bench steps must be positive");
  SG_CHECK(cfg.bench.repeats >= 1, "config: bench.repeats must be positive");
  SG_CHECK(cfg.bench.warmup >= 0, "config: bench.warmup must be non-negative");
}

LifParams lif_from_config(const ExperimentConfig& cfg) {
  if (cfg.neuron.kind == "if") {
    return LifParams::integrate_and_fire(cfg.neuron.theta, cfg.time.dt_s);
  }
  return LifParams(cfg.neuron.tau_s, cfg.time.dt_s, cfg.neuron.theta);
}

SrmKernels kernels_from_config(const ExperimentConfig& cfg) {
  const LifParams lif = lif_from_config(cfg);
  if (cfg.neuron.reset == "none") {
    // Spike response kept, reset kernel zeroed.
    SrmKernels parametric = SrmKernels::lif_parametric(lif);
    return SrmKernels::generic(parametric.epsilon_taps(cfg.time.steps),
                               CausalKernel({0.0}));
  }
  return SrmKernels::lif_parametric(lif);
}

SurrogateSpec surrogate_from_config(const ExperimentConfig& cfg) {
  return SurrogateSpec{surrogate_family_from_string(cfg.surrogate.family), cfg.surrogate.width,
                       cfg.neuron.theta, cfg.surrogate.scale};
}

AdamParams adam_from_config(const ExperimentConfig& cfg) {
  return AdamParams{cfg.optimizer.beta1, cfg.optimizer.beta2, cfg.optimizer.eps_hat,
                    cfg.optimizer.lr};
}

LossSpec loss_from_config(const ExperimentConfig& cfg, const TimeSeries& target, Index label) {
  LossSpec spec;
  if (cfg.loss.kind == "mse") spec.kind = LossKind::Mse;
  else if (cfg.loss.kind == "ce_sum") spec.kind = LossKind::CeSumOverTime;
  else spec.kind = LossKind::CeMaxOverTime;
  spec.signal =
      cfg.loss.signal == "filtered" ? LossGradKind::FilteredOutput : LossGradKind::RawSpikes;
  spec.target = target;
  spec.label = label;
  return spec;
}

Network network_from_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<Index> widths(cfg.network.layer_widths.begin(), cfg.network.layer_widths.end());
  return build_dense_network(cfg.network.input_channels, widths, kernels_from_config(cfg),
                             surrogate_from_config(cfg), seed);
}

}  // namespace spikegrad
