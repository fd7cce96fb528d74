#include "spikegrad/grad_exodus.hpp"

#include <algorithm>

#include "backward_common.hpp"
#include "spikegrad/check.hpp"

namespace spikegrad {

SigmaBlock sigma_srm(const LayerTrace& trace, const SrmKernels& kernels,
                     const SurrogateSpec& spec) {
  const Index steps = trace.u.steps();
  const Index neurons = trace.u.channels();
  const Matrix fp = surrogate_values(spec, trace.u.values);
  const CausalKernel nu = kernels.nu_taps(steps);
  const Index taps = nu.size();

  SigmaBlock block;
  block.steps = steps;
  block.per_neuron.reserve(static_cast<std::size_t>(neurons));
  for (Index i = 0; i < neurons; ++i) {
    Matrix sig = Matrix::Zero(steps, steps);
    for (Index n = 0; n < steps; ++n) {
      sig(n, n) = fp(i, n);
      for (Index m = n + 1; m < steps; ++m) {
        double acc = 0.0;
        const Index k_min = std::max(n, m - taps);
        for (Index k = k_min; k < m; ++k) {
          acc += nu.taps[static_cast<std::size_t>(m - 1 - k)] * sig(k, n);
        }
        sig(m, n) = fp(i, m) * acc;
      }
    }
    block.per_neuron.push_back(std::move(sig));
  }
  return block;
}

SigmaBlock sigma_lif_closed_form(const LayerTrace& trace, const LifParams& params,
                                 const SurrogateSpec& spec) {
  const Index steps = trace.u.steps();
  const Index neurons = trace.u.channels();
  const Matrix fp = surrogate_values(spec, trace.u.values);
  const double alpha = params.alpha();
  const double theta = params.theta;

  SigmaBlock block;
  block.steps = steps;
  block.per_neuron.reserve(static_cast<std::size_t>(neurons));
  for (Index i = 0; i < neurons; ++i) {
    Matrix sig = Matrix::Zero(steps, steps);
    for (Index n = 0; n < steps; ++n) {
      sig(n, n) = fp(i, n);
      double chi = 1.0;  // chi_n[m] starts at the identity for m = n+1
      for (Index m = n + 1; m < steps; ++m) {
        sig(m, n) = -theta * fp(i, m) * fp(i, n) * chi;
        chi *= alpha - theta * fp(i, m);
      }
    }
    block.per_neuron.push_back(std::move(sig));
  }
  return block;
}

Matrix filtered_error(const SrmKernels& producer_filter, const Matrix& e) {
  const Index steps = e.cols();
  if (producer_filter.is_lif()) {
    const double alpha = producer_filter.lif->alpha();
    Matrix p(e.rows(), steps);
    p.col(steps - 1) = e.col(steps - 1);
    for (Index n = steps - 2; n >= 0; --n) {
      p.col(n) = e.col(n) + alpha * p.col(n + 1);
    }
    return p;
  }
  return correlate_time(producer_filter.epsilon_taps(steps), TimeSeries(e, 1e-3)).values;
}

Matrix z_grad_exodus(const DenseLayer& layer, const LayerTrace& trace, const Matrix& p) {
  const Index steps = trace.u.steps();
  const Index neurons = trace.u.channels();
  SG_CHECK(p.rows() == neurons && p.cols() == steps, "z_grad_exodus: p shape mismatch");
  const Matrix fp = surrogate_values(layer.surrogate, trace.u.values);

  Matrix d(neurons, steps);
  if (layer.kernels.is_lif()) {
    // q[n] = f'[n+1] p[n+1] + (alpha - theta f'[n+1]) q[n+1] folds into
    // q[n] = d[n+1] + alpha q[n+1] once d[n] = f'[n](p[n] - theta q[n]).
    const double alpha = layer.kernels.lif->alpha();
    const double theta = layer.kernels.lif->theta;
    Vector q = Vector::Zero(neurons);
    d.col(steps - 1) = fp.col(steps - 1).cwiseProduct(p.col(steps - 1));
    for (Index n = steps - 2; n >= 0; --n) {
      q = d.col(n + 1) + alpha * q;
      d.col(n) = fp.col(n).cwiseProduct(p.col(n) - theta * q);
    }
    return d;
  }

  const CausalKernel nu = layer.kernels.nu_taps(steps);
  const Index taps = std::min<Index>(nu.size(), steps);
  for (Index n = steps - 1; n >= 0; --n) {
    Vector acc = p.col(n);
    for (Index j = 0; j < taps; ++j) {
      const Index m = n + 1 + j;
      if (m >= steps) break;
      if (nu.taps[static_cast<std::size_t>(j)] == 0.0) continue;
      acc += nu.taps[static_cast<std::size_t>(j)] * d.col(m);
    }
    d.col(n) = fp.col(n).cwiseProduct(acc);
  }
  return d;
}

namespace {

// Both the filter correlation p[n] = e[n] + alpha_f p[n+1] and the reset
// accumulator q[n] = d[n+1] + alpha q[n+1] run backward in time, so for
// LIF kernels on both sides the layer backward is a single sweep with no
// intermediate p matrix.
Matrix z_grad_exodus_fused_lif(const DenseLayer& layer, const LayerTrace& trace,
                               const Matrix& e, const SrmKernels& producer) {
  const Index steps = trace.u.steps();
  const Index neurons = trace.u.channels();
  const Matrix fp = surrogate_values(layer.surrogate, trace.u.values);
  const double alpha_filter = producer.lif->alpha();
  const double alpha = layer.kernels.lif->alpha();
  const double theta = layer.kernels.lif->theta;

  Matrix d(neurons, steps);
  Vector p = e.col(steps - 1);
  Vector q = Vector::Zero(neurons);
  d.col(steps - 1) = fp.col(steps - 1).cwiseProduct(p);
  for (Index n = steps - 2; n >= 0; --n) {
    q = d.col(n + 1) + alpha * q;
    p = e.col(n) + alpha_filter * p;
    d.col(n) = fp.col(n).cwiseProduct(p - theta * q);
  }
  return d;
}

Matrix z_grad_exodus_from_error(const DenseLayer& layer, const LayerTrace& trace,
                                const Matrix& e, const SrmKernels& producer) {
  if (layer.kernels.is_lif() && producer.is_lif()) {
    return z_grad_exodus_fused_lif(layer, trace, e, producer);
  }
  return z_grad_exodus(layer, trace, filtered_error(producer, e));
}

}  // namespace

std::pair<TimeSeries, TimeSeries> backward_layer_exodus(const DenseLayer& layer,
                                                        const LayerTrace& trace,
                                                        const TimeSeries& e_out,
                                                        const SrmKernels& output_filter) {
  SG_CHECK(e_out.channels() == layer.n_out() && e_out.steps() == trace.u.steps(),
           "backward_layer_exodus: e_out shape mismatch");
  const Matrix d = z_grad_exodus_from_error(layer, trace, e_out.values, output_filter);
  Matrix e_prev = layer.weights.transpose() * d;
  return {TimeSeries(d, e_out.dt), TimeSeries(std::move(e_prev), e_out.dt)};
}

namespace detail {

GradientReport backward_network_common(const Network& net, const NetworkTrace& traces,
                                       const LossGrad& loss_grad, const LayerEngine& engine,
                                       bool keep_signals) {
  SG_CHECK(!net.empty(), "backward: empty network");
  SG_CHECK(net.size() == traces.layers.size(), "backward: trace/network layer count mismatch");
  const Index steps = traces.steps();
  const Index n_last = net.back().n_out();
  SG_CHECK(loss_grad.values.channels() == n_last && loss_grad.values.steps() == steps,
           "backward: loss gradient shape incompatible with the network output");

  const std::size_t layer_count = net.size();
  GradientReport report;
  report.weight_grads.resize(layer_count);
  if (keep_signals) {
    report.d_signals.resize(layer_count);
    report.e_signals.resize(layer_count);
  }
  if (keep_signals) report.e_signals[layer_count - 1] = loss_grad.values;

  // The filter that produced layer l's output signal: the consuming layer's
  // epsilon for inner layers, the layer's own epsilon at the network output.
  auto layer_backward = [&](std::size_t l, const Matrix& e, const SrmKernels& producer) {
    if (engine.from_error) return engine.from_error(net[l], traces.layers[l], e, producer);
    return engine.from_spike_grad(net[l], traces.layers[l], filtered_error(producer, e));
  };

  const double dt = loss_grad.values.dt;
  Matrix e;  // dL/da for the layer being processed, before the correlation
  for (std::size_t l = layer_count; l-- > 0;) {
    Matrix d;
    if (l == layer_count - 1) {
      d = loss_grad.kind == LossGradKind::RawSpikes
              ? engine.from_spike_grad(net[l], traces.layers[l], loss_grad.values.values)
              : layer_backward(l, loss_grad.values.values, net[l].kernels);
    } else {
      d = layer_backward(l, e, net[l + 1].kernels);
    }
    report.weight_grads[l].noalias() = d * traces.layers[l].a_in.values.transpose();
    if (keep_signals) report.d_signals[l] = TimeSeries(d, dt);
    if (l > 0) {
      e.noalias() = net[l].weights.transpose() * d;
      if (keep_signals) report.e_signals[l - 1] = TimeSeries(e, dt);
    }
  }
  report.finalize();
  return report;
}

}  // namespace detail

GradientReport backward_network_exodus(const Network& net, const NetworkTrace& traces,
                                       const LossGrad& loss_grad, bool keep_signals) {
  detail::LayerEngine engine;
  engine.from_spike_grad = [](const DenseLayer& layer, const LayerTrace& trace,
                              const Matrix& p) { return z_grad_exodus(layer, trace, p); };
  engine.from_error = [](const DenseLayer& layer, const LayerTrace& trace, const Matrix& e,
                         const SrmKernels& producer) {
    return z_grad_exodus_from_error(layer, trace, e, producer);
  };
  return detail::backward_network_common(net, traces, loss_grad, engine, keep_signals);
}

}  // namespace spikegrad
