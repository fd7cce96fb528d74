#pragma once

#include <utility>

#include "spikegrad/forward.hpp"
#include "spikegrad/gradient.hpp"

namespace spikegrad {

/// Dense spike-to-drive derivative blocks for one layer:
/// per_neuron[i](m, n) = d s_i[m] / d z_i[n], lower triangular in time.
/// O(T^2) storage; materialized only by oracle and test paths.
struct SigmaBlock {
  Index steps = 0;
  std::vector<Matrix> per_neuron;

  Index neurons() const { return static_cast<Index>(per_neuron.size()); }
};

/// Reference recursion for generic reset kernels:
///   sigma_n[n] = f'(u[n]),
///   sigma_n[m] = f'(u[m]) * sum_{k=n..m-1} nu_{m-1-k} sigma_n[k]   (m > n).
SigmaBlock sigma_srm(const LayerTrace& trace, const SrmKernels& kernels,
                     const SurrogateSpec& spec);

/// Closed form for LIF/IF kernels:
///   sigma_n[m] = -theta f'(u[m]) f'(u[n]) chi_n[m]  (m > n),
///   chi_n[m]   = prod_{k=n+1..m-1} (alpha - theta f'(u[k])).
SigmaBlock sigma_lif_closed_form(const LayerTrace& trace, const LifParams& params,
                                 const SurrogateSpec& spec);

/// Accumulates error through the spike-response filter that produced this
/// signal: p[m] = sum_{j} eps_j e[m+j]. O(T) for LIF kernels.
Matrix filtered_error(const SrmKernels& producer_filter, const Matrix& e);

/// dL/dz from dL/ds for one layer. LIF kernels use the O(T) backward
/// accumulator
///   q[T-1] = 0,  q[n] = f'[n+1] p[n+1] + (alpha - theta f'[n+1]) q[n+1],
///   d[n]   = f'[n] (p[n] - theta q[n]);
/// generic kernels back-substitute d[n] = f'[n](p[n] + sum_j nu_j d[n+1+j]).
/// Both evaluate d[n] = sum_{m>=n} p[m] sigma_n[m] without storing sigma.
Matrix z_grad_exodus(const DenseLayer& layer, const LayerTrace& trace, const Matrix& p);

/// One layer of the exact backward pass. e_out is dL/da for this layer's
/// filtered output; output_filter is the kernel set that produced that
/// filtered signal (the consuming layer's, or the layer's own at the top).
/// Returns (d = dL/dz, e_prev = dL/da_in).
std::pair<TimeSeries, TimeSeries> backward_layer_exodus(const DenseLayer& layer,
                                                        const LayerTrace& trace,
                                                        const TimeSeries& e_out,
                                                        const SrmKernels& output_filter);

/// Exact vectorized backward pass over the whole network. FilteredOutput
/// loss gradients enter through the output filter; RawSpikes gradients
/// (unfiltered output) contract directly with sigma.
GradientReport backward_network_exodus(const Network& net, const NetworkTrace& traces,
                                       const LossGrad& loss_grad, bool keep_signals = false);

}  // namespace spikegrad
