#pragma once

#include "spikegrad/forward.hpp"
#include "spikegrad/gradient.hpp"

namespace spikegrad {

struct BpttOptions {
  /// When false, the adjoint skips every u[m] <- s[n] reset edge; the
  /// result is a second, independent implementation of the reset-free
  /// (SLAYER) gradients.
  bool include_reset_edges = true;
};

/// Reference backward pass: explicit adjoint traversal of the unrolled
/// spatio-temporal graph over the variables {a, z, u, s} at every
/// (layer, time) node. Generic kernels walk the epsilon/nu edge sets
/// directly (O(T^2) per layer); LIF kernels adjoint the O(T) state
/// recurrences. No code is shared with the vectorized engines beyond the
/// forward trace.
GradientReport backward_network_bptt(const Network& net, const NetworkTrace& traces,
                                     const LossGrad& loss_grad, const BpttOptions& options = {},
                                     bool keep_signals = false);

}  // namespace spikegrad
