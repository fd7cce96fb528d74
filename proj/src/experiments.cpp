#include "spikegrad/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>

#include <json.hpp>

#include "spikegrad/check.hpp"
#include "spikegrad/grad_bptt.hpp"
#include "spikegrad/grad_exodus.hpp"
#include "spikegrad/grad_slayer.hpp"
#include "spikegrad/oracle.hpp"

namespace spikegrad {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

SpikeTrain poisson_spike_train(Index channels, Index steps, double rate_hz, double dt_s,
                               std::uint64_t seed) {
  SG_CHECK(channels >= 1 && steps >= 1, "poisson_spike_train: empty shape");
  const double p = std::clamp(rate_hz * dt_s, 0.0, 1.0);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution fire(p);
  Matrix bits(channels, steps);
  for (Index i = 0; i < channels; ++i) {
    for (Index n = 0; n < steps; ++n) bits(i, n) = fire(rng) ? 1.0 : 0.0;
  }
  return SpikeTrain(std::move(bits), dt_s);
}

SpikeTrain random_target_train(Index neurons, Index steps, int spikes, double dt_s,
                               std::uint64_t seed) {
  SG_CHECK(spikes <= steps, "random_target_train: more spikes than bins");
  std::mt19937_64 rng(seed);
  Matrix bits = Matrix::Zero(neurons, steps);
  std::vector<Index> bins(static_cast<std::size_t>(steps));
  std::iota(bins.begin(), bins.end(), Index{0});
  for (Index i = 0; i < neurons; ++i) {
    std::shuffle(bins.begin(), bins.end(), rng);
    for (int k = 0; k < spikes; ++k) bits(i, bins[static_cast<std::size_t>(k)]) = 1.0;
  }
  return SpikeTrain(std::move(bits), dt_s);
}

namespace {

GradientReport engine_backward(Engine engine, const Network& net, const NetworkTrace& trace,
                               const LossGrad& grad) {
  return backward_dispatch(engine, net, trace, grad);
}

// The fitting target is compared in the smoothed space: the target spike
// train is filtered by the output layer's spike response before the MSE.
TimeSeries filtered_target(const Network& net, const SpikeTrain& target) {
  const SrmKernels& kernels = net.back().kernels;
  return causal_conv(kernels.epsilon_taps(target.steps()), TimeSeries(target.bits, target.dt));
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  SG_CHECK(out.good(), "cannot write file: " + path.string());
  out << text;
}

json summary_skeleton(const ExperimentConfig& cfg, const std::string& csv_schema) {
  return json{{"run_id", config_run_id(cfg)},
              {"csv_schema", csv_schema},
              {"config", json::parse(serialize_config(cfg))}};
}

}  // namespace

PoissonRun poisson_fit_run(const ExperimentConfig& cfg, Engine engine, std::uint64_t seed) {
  validate_config(cfg);
  const Index steps = cfg.time.steps;
  const double dt = cfg.time.dt_s;
  const Index out_width = cfg.network.layer_widths.back();

  const SpikeTrain input = poisson_spike_train(cfg.network.input_channels, steps,
                                               cfg.poisson.rate_hz, dt, derive_seed(seed, 1));
  const SpikeTrain target =
      random_target_train(out_width, steps, cfg.poisson.target_spikes, dt, derive_seed(seed, 2));

  Network net = network_from_config(cfg, derive_seed(seed, 3));
  const TimeSeries target_signal = filtered_target(net, target);

  Sample sample{input, loss_from_config(cfg, target_signal, 0)};
  TrainOptions options;
  options.epochs = cfg.epochs;
  options.adam = adam_from_config(cfg);
  options.mode = SpikeMode::Hard;

  const std::vector<EpochRecord> history = train_loop(net, {sample}, engine, options);
  PoissonRun run;
  run.per_epoch_loss.reserve(history.size());
  for (const EpochRecord& record : history) {
    run.per_epoch_loss.push_back(record.loss);
    run.summed_loss += record.loss;
  }
  return run;
}

std::vector<GradCompareRow> grad_compare_rows(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const Index steps = cfg.time.steps;
  const double dt = cfg.time.dt_s;
  const Index out_width = cfg.network.layer_widths.back();

  const SpikeTrain input = poisson_spike_train(cfg.network.input_channels, steps,
                                               cfg.poisson.rate_hz, dt, derive_seed(cfg.seed, 11));
  const SpikeTrain target = random_target_train(out_width, steps, cfg.poisson.target_spikes, dt,
                                                derive_seed(cfg.seed, 12));
  Network net = network_from_config(cfg, derive_seed(cfg.seed, 13));
  const TimeSeries target_signal = filtered_target(net, target);
  const LossSpec loss = loss_from_config(cfg, target_signal, 0);

  // Hard-mode forward does not depend on the surrogate scale: one trace
  // serves every (engine, scale) cell.
  const NetworkTrace trace = forward_network(net, input, SpikeMode::Hard);
  const auto loss_grad = evaluate_network_loss(net, trace, loss).second;

  std::vector<GradCompareRow> rows;
  for (Engine engine : cfg.engines) {
    for (double scale : cfg.scales) {
      Network scaled = net;
      for (DenseLayer& layer : scaled) layer.surrogate.scale = scale;
      const GradientReport report = engine_backward(engine, scaled, trace, loss_grad);
      for (std::size_t l = 0; l < report.layer_grad_norms.size(); ++l) {
        rows.push_back(GradCompareRow{engine_name(engine), scale, static_cast<int>(l),
                                      report.layer_grad_norms[l]});
      }
    }
  }
  return rows;
}

std::vector<BenchRow> bench_rows(const ExperimentConfig& cfg) {
  validate_config(cfg);
  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (int steps : cfg.bench.steps_sweep) {
    ExperimentConfig sized = cfg;
    sized.time.steps = steps;
    const SpikeTrain input =
        poisson_spike_train(cfg.network.input_channels, steps, cfg.poisson.rate_hz,
                            cfg.time.dt_s, derive_seed(cfg.seed, 21));
    const SpikeTrain target =
        random_target_train(cfg.network.layer_widths.back(), steps,
                            std::min<int>(cfg.poisson.target_spikes, steps),
                            cfg.time.dt_s, derive_seed(cfg.seed, 22));
    Network net = network_from_config(sized, derive_seed(cfg.seed, 23));
    const TimeSeries target_signal = filtered_target(net, target);
    const LossSpec loss = loss_from_config(sized, target_signal, 0);

    // engines are interleaved rep by rep so machine noise hits all of
    // them evenly
    std::vector<std::vector<double>> times_ms(cfg.engines.size());
    for (int rep = 0; rep < cfg.bench.warmup + cfg.bench.repeats; ++rep) {
      for (std::size_t e = 0; e < cfg.engines.size(); ++e) {
        const auto start = clock::now();
        const NetworkTrace trace = forward_network(net, input, SpikeMode::Hard);
        const auto loss_grad = evaluate_network_loss(net, trace, loss).second;
        const GradientReport report =
            engine_backward(cfg.engines[e], net, trace, loss_grad);
        const auto stop = clock::now();
        SG_CHECK(report.finite, "bench: non-finite gradients");
        if (rep >= cfg.bench.warmup) {
          times_ms[e].push_back(
              std::chrono::duration<double, std::milli>(stop - start).count());
        }
      }
    }
    for (std::size_t e = 0; e < cfg.engines.size(); ++e) {
      std::sort(times_ms[e].begin(), times_ms[e].end());
      BenchRow row;
      row.engine = engine_name(cfg.engines[e]);
      row.steps = steps;
      row.median_ms = times_ms[e][times_ms[e].size() / 2];
      row.min_ms = times_ms[e].front();
      row.max_ms = times_ms[e].back();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

bool IftCheckResult::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Entry& e) { return e.pass; });
}

IftCheckResult ift_check_run(const ExperimentConfig& cfg) {
  IftCheckResult result;
  std::mt19937_64 rng(derive_seed(cfg.seed, 31));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double worst_det = 0.0;
  double worst_solve = 0.0;
  const int instances = 12;
  for (int inst = 0; inst < instances; ++inst) {
    const Index neurons = 1 + static_cast<Index>(rng() % 3);
    const Index steps = 2 + static_cast<Index>(rng() % 14);
    const bool lif = inst % 2 == 0;
    const double alpha = lif ? 0.2 + 0.8 * unit(rng) : 0.0;
    const double theta = 0.5 + unit(rng);
    SrmKernels kernels = lif
        ? SrmKernels::lif_parametric(LifParams::from_alpha(alpha, theta))
        : SrmKernels::generic(CausalKernel({1.0, 0.4, 0.1}),
                              CausalKernel({-theta, -0.3 * theta}));
    SurrogateSpec spec{SurrogateFamily::Exponential, 0.5 + unit(rng), theta, 1.0};
    Network net{DenseLayer{Matrix::Random(neurons, 2) * 1.5, kernels, spec}};
    const SpikeTrain input = poisson_spike_train(2, steps, 400.0, 1e-3,
                                                 derive_seed(cfg.seed, 100 + inst));
    const NetworkTrace trace = forward_network(net, input, SpikeMode::Hard);

    const DenseJacobians jac = build_ift_jacobians(trace.layers[0], kernels, spec);
    worst_det = std::max(worst_det, std::abs(jacobian_determinant(jac) - 1.0));
    const Matrix dense = solve_ift_dense(jac);
    const Matrix recursive = sigma_to_dense(sigma_srm(trace.layers[0], kernels, spec));
    worst_solve = std::max(worst_solve, (dense - recursive).cwiseAbs().maxCoeff());

    if (inst == 0) {
      // Mutation canary: a sign flip on the reset taps must be detected.
      SrmKernels flipped = SrmKernels::generic(kernels.epsilon_taps(steps),
                                               kernels.nu_taps(steps));
      for (double& tap : flipped.nu.taps) tap = -tap;
      const Matrix broken = sigma_to_dense(sigma_srm(trace.layers[0], flipped, spec));
      const double mismatch = (dense - broken).cwiseAbs().maxCoeff();
      result.entries.push_back({"reset_sign_mutation_detected", mismatch > 1e-3, mismatch, 1e-3});
    }
  }
  result.entries.push_back({"jacobian_det_unit", worst_det <= 1e-8, worst_det, 1e-8});
  result.entries.push_back({"dense_solve_matches_sigma", worst_solve <= 1e-10, worst_solve, 1e-10});

  // Closed-form gamma vs the iterative chi update on random f' sequences.
  double worst_gamma = 0.0;
  for (double alpha : {0.3, 0.9, 1.0}) {
    const LifParams params = LifParams::from_alpha(alpha, 1.0);
    std::vector<double> fp(64);
    for (double& v : fp) v = 2.0 * unit(rng);
    for (int trial = 0; trial < 50; ++trial) {
      const Index m = static_cast<Index>(rng() % 32);
      const Index n = m + 1 + static_cast<Index>(rng() % 31);
      const double closed = chi_closed_form(fp, params, m, n);
      const double iterative = gamma_chi_iterative(fp, params, m, n);
      const double norm = std::max({1.0, std::abs(closed), std::abs(iterative)});
      worst_gamma = std::max(worst_gamma, std::abs(closed - iterative) / norm);
    }
  }
  result.entries.push_back({"gamma_closed_vs_iterative", worst_gamma <= 1e-12, worst_gamma, 1e-12});

  // Decay bound with the surrogate pinned at the clamp boundary
  // f' = (alpha - mu)/theta, where the envelope is met with equality.
  {
    const double alpha = 0.9, theta = 1.0, mu = 0.4;
    const LifParams params = LifParams::from_alpha(alpha, theta);
    const Index steps = 32;
    const double target_fp = (alpha - mu) / theta;
    SurrogateSpec clamp{SurrogateFamily::Exponential, 1.0, theta, 2.0 * target_fp};
    LayerTrace trace;
    trace.u = TimeSeries(Matrix::Constant(1, steps, theta), 1e-3);  // peak: f' == scale/2
    const DecayBoundReport report =
        check_decay_bound(trace, params, DecayBoundParams{mu, alpha, theta}, clamp);
    const bool pass = report.max_upper_violation <= 1e-12 && report.min_chi >= -1e-12;
    result.entries.push_back(
        {"decay_bound_clamped", pass, report.max_upper_violation, 1e-12});
  }
  return result;
}

std::string config_run_id(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

int run_poisson_fit(const ExperimentConfig& cfg, std::ostream& log) {
  SG_CHECK(cfg.experiment == ExperimentKind::PoissonFit, "config/experiment mismatch");
  fs::create_directories(cfg.out_dir);

  std::vector<PoissonRun> runs;
  runs.reserve(cfg.engines.size());
  for (Engine engine : cfg.engines) {
    log << "poisson-fit: engine " << engine_name(engine) << ", " << cfg.epochs << " epochs\n";
    runs.push_back(poisson_fit_run(cfg, engine, cfg.seed));
  }

  std::string csv = "epoch";
  for (Engine engine : cfg.engines) csv += std::string(",loss_") + engine_name(engine);
  csv += "\n";
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    csv += std::to_string(epoch);
    for (const PoissonRun& run : runs) {
      csv += "," + std::to_string(run.per_epoch_loss[static_cast<std::size_t>(epoch)]);
    }
    csv += "\n";
  }
  write_text_file(fs::path(cfg.out_dir) / "poisson_fit.csv", csv);

  json summary = summary_skeleton(cfg, "poisson_fit_v1");
  json per_engine = json::object();
  for (std::size_t e = 0; e < cfg.engines.size(); ++e) {
    per_engine[engine_name(cfg.engines[e])] = {
        {"summed_loss", runs[e].summed_loss},
        {"final_loss", runs[e].per_epoch_loss.empty() ? 0.0 : runs[e].per_epoch_loss.back()}};
  }
  summary["results"] = per_engine;
  write_text_file(fs::path(cfg.out_dir) / "poisson_fit_summary.json", summary.dump(2));
  log << "poisson-fit: wrote " << (fs::path(cfg.out_dir) / "poisson_fit.csv").string() << "\n";
  return 0;
}

int run_grad_compare(const ExperimentConfig& cfg, std::ostream& log) {
  SG_CHECK(cfg.experiment == ExperimentKind::GradCompare, "config/experiment mismatch");
  fs::create_directories(cfg.out_dir);
  const std::vector<GradCompareRow> rows = grad_compare_rows(cfg);

  std::string csv = "engine,scale,layer,grad_norm\n";
  for (const GradCompareRow& row : rows) {
    csv += row.engine + "," + std::to_string(row.scale) + "," + std::to_string(row.layer) + "," +
           std::to_string(row.grad_norm) + "\n";
  }
  write_text_file(fs::path(cfg.out_dir) / "grad_compare.csv", csv);

  json summary = summary_skeleton(cfg, "grad_compare_v1");
  summary["results"] = {{"rows", rows.size()}};
  write_text_file(fs::path(cfg.out_dir) / "grad_compare_summary.json", summary.dump(2));
  log << "grad-compare: " << rows.size() << " rows\n";
  return 0;
}

int run_bench(const ExperimentConfig& cfg, std::ostream& log) {
  SG_CHECK(cfg.experiment == ExperimentKind::Bench, "config/experiment mismatch");
  fs::create_directories(cfg.out_dir);
  const std::vector<BenchRow> rows = bench_rows(cfg);

  std::string csv = "engine,steps,median_ms,min_ms,max_ms\n";
  for (const BenchRow& row : rows) {
    csv += row.engine + "," + std::to_string(row.steps) + "," + std::to_string(row.median_ms) +
           "," + std::to_string(row.min_ms) + "," + std::to_string(row.max_ms) + "\n";
  }
  write_text_file(fs::path(cfg.out_dir) / "bench.csv", csv);

  json summary = summary_skeleton(cfg, "bench_v1");
  json cells = json::array();
  for (const BenchRow& row : rows) {
    cells.push_back({{"engine", row.engine}, {"steps", row.steps}, {"median_ms", row.median_ms}});
  }
  summary["results"] = cells;
  write_text_file(fs::path(cfg.out_dir) / "bench_summary.json", summary.dump(2));
  for (const BenchRow& row : rows) {
    log << "bench: " << row.engine << " T=" << row.steps << " median " << row.median_ms
        << " ms\n";
  }
  return 0;
}

int run_ift_check(const ExperimentConfig& cfg, std::ostream& log) {
  SG_CHECK(cfg.experiment == ExperimentKind::IftCheck, "config/experiment mismatch");
  fs::create_directories(cfg.out_dir);
  const IftCheckResult result = ift_check_run(cfg);
  for (const auto& entry : result.entries) {
    log << (entry.pass ? "[PASS] " : "[FAIL] ") << entry.name << " (metric=" << entry.metric
        << ", tol=" << entry.tolerance << ")\n";
  }
  json summary = summary_skeleton(cfg, "ift_check_v1");
  json checks = json::array();
  for (const auto& entry : result.entries) {
    checks.push_back({{"name", entry.name},
                      {"pass", entry.pass},
                      {"metric", entry.metric},
                      {"tolerance", entry.tolerance}});
  }
  summary["results"] = checks;
  write_text_file(fs::path(cfg.out_dir) / "ift_check_summary.json", summary.dump(2));
  return result.all_pass() ? 0 : 2;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  switch (cfg.experiment) {
    case ExperimentKind::PoissonFit: return run_poisson_fit(cfg, log);
    case ExperimentKind::GradCompare: return run_grad_compare(cfg, log);
    case ExperimentKind::Bench: return run_bench(cfg, log);
    case ExperimentKind::IftCheck: return run_ift_check(cfg, log);
  }
  return 1;
}

}  // namespace spikegrad
