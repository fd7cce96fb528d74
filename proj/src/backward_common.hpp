#pragma once

#include <functional>

#include "spikegrad/forward.hpp"
#include "spikegrad/gradient.hpp"

namespace spikegrad::detail {

// Per-layer gradient rule; the only piece that differs between the exact
// and the reset-free engines.
struct LayerEngine {
  // dL/ds -> dL/dz (p is already accumulated through the output filter)
  std::function<Matrix(const DenseLayer&, const LayerTrace&, const Matrix&)> from_spike_grad;
  // dL/da -> dL/dz with the producing filter; engines may fuse the filter
  // correlation into their backward sweep. When empty the driver
  // correlates and falls back to from_spike_grad.
  std::function<Matrix(const DenseLayer&, const LayerTrace&, const Matrix&, const SrmKernels&)>
      from_error;
};

// Shared layer-by-layer driver: seeds the error from the loss gradient,
// walks the layers top-down with dW_l = d_l a_in_l^T, and hands
// e_prev = W^T d_l to the layer below through its consumer's filter.
GradientReport backward_network_common(const Network& net, const NetworkTrace& traces,
                                       const LossGrad& loss_grad, const LayerEngine& engine,
                                       bool keep_signals);

}  // namespace spikegrad::detail
