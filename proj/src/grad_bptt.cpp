#include "spikegrad/grad_bptt.hpp"

#include <algorithm>

#include "spikegrad/check.hpp"

namespace spikegrad {

namespace {

// Adjoint of the filter a[n] = sum_j eps_j s[n-j]: spikes collect the
// adjoints of every filtered sample they feed.
Matrix spike_adjoint_from_filter(const SrmKernels& filter, const Matrix& abar) {
  const Index neurons = abar.rows();
  const Index steps = abar.cols();
  Matrix sbar(neurons, steps);
  if (filter.is_lif()) {
    // a[n] = alpha a[n-1] + s[n]
    const double alpha = filter.lif->alpha();
    Vector carry = abar.col(steps - 1);
    sbar.col(steps - 1) = carry;
    for (Index n = steps - 2; n >= 0; --n) {
      carry = abar.col(n) + alpha * carry;
      sbar.col(n) = carry;
    }
    return sbar;
  }
  const CausalKernel eps = filter.epsilon_taps(steps);
  const Index taps = std::min<Index>(eps.size(), steps);
  sbar.setZero();
  for (Index m = 0; m < steps; ++m) {
    for (Index j = 0; j < taps; ++j) {
      const Index n = m + j;
      if (n >= steps) break;
      sbar.col(m) += eps.taps[static_cast<std::size_t>(j)] * abar.col(n);
    }
  }
  return sbar;
}

// Reverse sweep over one layer's u/s nodes. Returns zbar (= ubar, since
// u[n] = z[n] + reset[n] with unit weight on z).
Matrix membrane_adjoint(const DenseLayer& layer, const LayerTrace& trace, const Matrix& sbar,
                        const BpttOptions& options) {
  const Index neurons = trace.u.channels();
  const Index steps = trace.u.steps();
  const Matrix fp = surrogate_values(layer.surrogate, trace.u.values);
  Matrix ubar(neurons, steps);

  if (layer.kernels.is_lif()) {
    // r[n] = alpha r[n-1] - theta s[n-1], u[n] = z[n] + r[n]
    const double alpha = layer.kernels.lif->alpha();
    const double theta = layer.kernels.lif->theta;
    Vector rbar_next = Vector::Zero(neurons);
    for (Index n = steps - 1; n >= 0; --n) {
      Vector stot = sbar.col(n);
      if (options.include_reset_edges) stot -= theta * rbar_next;
      ubar.col(n) = fp.col(n).cwiseProduct(stot);
      rbar_next = ubar.col(n) + alpha * rbar_next;
    }
    return ubar;
  }

  const CausalKernel nu = layer.kernels.nu_taps(steps);
  const Index taps = std::min<Index>(nu.size(), steps);
  for (Index n = steps - 1; n >= 0; --n) {
    Vector stot = sbar.col(n);
    if (options.include_reset_edges) {
      // u[m] <- s[n] edges carry nu_{m-1-n}
      for (Index j = 0; j < taps; ++j) {
        const Index m = n + 1 + j;
        if (m >= steps) break;
        stot += nu.taps[static_cast<std::size_t>(j)] * ubar.col(m);
      }
    }
    ubar.col(n) = fp.col(n).cwiseProduct(stot);
  }
  return ubar;
}

}  // namespace

GradientReport backward_network_bptt(const Network& net, const NetworkTrace& traces,
                                     const LossGrad& loss_grad, const BpttOptions& options,
                                     bool keep_signals) {
  SG_CHECK(!net.empty(), "backward_network_bptt: empty network");
  SG_CHECK(net.size() == traces.layers.size(),
           "backward_network_bptt: trace/network layer count mismatch");
  const Index steps = traces.steps();
  SG_CHECK(loss_grad.values.channels() == net.back().n_out() &&
               loss_grad.values.steps() == steps,
           "backward_network_bptt: loss gradient shape incompatible with the network output");

  const std::size_t layer_count = net.size();
  GradientReport report;
  report.weight_grads.resize(layer_count);
  if (keep_signals) {
    report.d_signals.resize(layer_count);
    report.e_signals.resize(layer_count);
  }

  Matrix sbar;
  if (loss_grad.kind == LossGradKind::FilteredOutput) {
    sbar = spike_adjoint_from_filter(net.back().kernels, loss_grad.values.values);
  } else {
    sbar = loss_grad.values.values;
  }
  if (keep_signals) report.e_signals[layer_count - 1] = loss_grad.values;

  const double dt = loss_grad.values.dt;
  for (std::size_t l = layer_count; l-- > 0;) {
    const DenseLayer& layer = net[l];
    const LayerTrace& trace = traces.layers[l];
    Matrix zbar = membrane_adjoint(layer, trace, sbar, options);
    report.weight_grads[l].noalias() = zbar * trace.a_in.values.transpose();
    if (keep_signals) report.d_signals[l] = TimeSeries(zbar, dt);
    if (l > 0) {
      Matrix ainbar = layer.weights.transpose() * zbar;
      if (keep_signals) report.e_signals[l - 1] = TimeSeries(ainbar, dt);
      sbar = spike_adjoint_from_filter(layer.kernels, ainbar);
    }
  }
  report.finalize();
  return report;
}

}  // namespace spikegrad
