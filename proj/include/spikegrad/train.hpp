#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spikegrad/forward.hpp"
#include "spikegrad/gradient.hpp"

namespace spikegrad {

/// Mean squared error over all (neuron, step) entries of the filtered
/// network output. Gradient 2 (out - target) / (N T).
std::pair<double, LossGrad> mse_loss(const TimeSeries& output, const TimeSeries& target);

/// Softmax cross-entropy on logits_i = sum_n output[i][n]; the gradient
/// (softmax - onehot) is broadcast uniformly across time.
std::pair<double, LossGrad> ce_sum_over_time(const TimeSeries& output, Index label);

/// Softmax cross-entropy on logits_i = max_n output[i][n]; the gradient is
/// routed to each class's argmax bin only (earliest index on ties).
std::pair<double, LossGrad> ce_max_over_time(const TimeSeries& output, Index label);

enum class LossKind { Mse, CeSumOverTime, CeMaxOverTime };

/// A reusable loss definition: which formula, which output signal it reads
/// (filtered output vs raw spikes), and its target/label.
struct LossSpec {
  LossKind kind = LossKind::Mse;
  LossGradKind signal = LossGradKind::FilteredOutput;
  TimeSeries target;  // Mse
  Index label = 0;    // cross-entropy losses

  std::pair<double, LossGrad> evaluate(const TimeSeries& output_signal) const;
};

/// The output signal a LossSpec reads from a finished forward pass.
TimeSeries loss_input_signal(const Network& net, const NetworkTrace& trace, LossGradKind kind);

/// Convenience: forward + loss on the appropriate output signal.
std::pair<double, LossGrad> evaluate_network_loss(const Network& net, const NetworkTrace& trace,
                                                  const LossSpec& loss);

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  double lr = 1e-3;
};

struct AdamState {
  AdamParams params;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  long step_count = 0;

  static AdamState init(const Network& net, const AdamParams& params);
};

/// Bias-corrected ADAM update in place. Returns false (and leaves weights
/// and moments untouched) if the report contains non-finite gradients.
bool adam_step(AdamState& state, const GradientReport& grads, Network& net);

enum class Engine { Exodus, Slayer, Bptt };

const char* engine_name(Engine engine);

GradientReport backward_dispatch(Engine engine, const Network& net, const NetworkTrace& traces,
                                 const LossGrad& loss_grad, bool keep_signals = false);

struct Sample {
  SpikeTrain input;
  LossSpec loss;
};

struct EpochRecord {
  double loss = 0.0;                   // mean over samples
  std::vector<double> grad_norms;      // per-layer norms of the epoch's last batch gradient
  bool skipped_nonfinite = false;
};

struct TrainOptions {
  int epochs = 1;
  int batch_size = 1;                  // gradients are summed within a batch
  AdamParams adam;
  SpikeMode mode = SpikeMode::Hard;
};

/// Plain epoch loop: fixed sample order, one ADAM step per batch. Runs are
/// bit-deterministic for a given configuration.
std::vector<EpochRecord> train_loop(Network& net, const std::vector<Sample>& data, Engine engine,
                                    const TrainOptions& options);

}  // namespace spikegrad
