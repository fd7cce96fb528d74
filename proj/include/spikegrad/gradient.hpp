#pragma once

#include <vector>

#include "spikegrad/signal.hpp"

namespace spikegrad {

/// Which output signal the loss differentiates: the filtered network output
/// a^(out) (the usual case) or the raw output spike train s^(out).
enum class LossGradKind { FilteredOutput, RawSpikes };

struct LossGrad {
  LossGradKind kind = LossGradKind::FilteredOutput;
  TimeSeries values;  // dL/da (FilteredOutput) or dL/ds (RawSpikes), N_out x T
};

/// Per-layer weight gradients plus scalar summaries, produced by every
/// backward engine in the same format.
struct GradientReport {
  std::vector<Matrix> weight_grads;          // dL/dW per layer
  std::vector<double> layer_grad_norms;      // Frobenius norm of dL/dW per layer
  std::vector<TimeSeries> d_signals;         // dL/dz per layer, kept on request
  std::vector<TimeSeries> e_signals;         // dL/da_in per layer, kept on request
  bool finite = true;

  void finalize();
};

/// Scale-normalized max deviation between two reports:
/// max_l max_ij |A - B| / max(maxabs(A), maxabs(B), floor).
double relative_deviation(const GradientReport& a, const GradientReport& b,
                          double floor = 1e-30);

/// Same metric on raw matrices.
double relative_deviation(const Matrix& a, const Matrix& b, double floor = 1e-30);

/// Max absolute elementwise difference across all layers.
double absolute_deviation(const GradientReport& a, const GradientReport& b);

}  // namespace spikegrad
