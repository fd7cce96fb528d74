#pragma once

#include "spikegrad/forward.hpp"
#include "spikegrad/gradient.hpp"

namespace spikegrad {

/// Reset-free approximation of dL/dz: d[n] = f'(u[n]) p[n], i.e. the
/// spike-to-drive derivative is taken as zero across time steps.
Matrix z_grad_slayer(const DenseLayer& layer, const LayerTrace& trace, const Matrix& p);

/// SLAYER-style backward pass. Shares the forward model, the error
/// transfer e = W^T d and the weight gradient dW = sum_n d[n] a_in[n]^T
/// with the exact engine; only the reset contribution to d is omitted.
GradientReport backward_network_slayer(const Network& net, const NetworkTrace& traces,
                                       const LossGrad& loss_grad, bool keep_signals = false);

}  // namespace spikegrad
