#include "spikegrad/grad_slayer.hpp"

#include "backward_common.hpp"
#include "spikegrad/check.hpp"
#include "spikegrad/grad_exodus.hpp"

namespace spikegrad {

Matrix z_grad_slayer(const DenseLayer& layer, const LayerTrace& trace, const Matrix& p) {
  SG_CHECK(p.rows() == trace.u.channels() && p.cols() == trace.u.steps(),
           "z_grad_slayer: p shape mismatch");
  return surrogate_values(layer.surrogate, trace.u.values).cwiseProduct(p);
}

namespace {

Matrix z_grad_slayer_from_error(const DenseLayer& layer, const LayerTrace& trace,
                                const Matrix& e, const SrmKernels& producer) {
  if (!producer.is_lif()) {
    return z_grad_slayer(layer, trace, filtered_error(producer, e));
  }
  // single backward sweep: p[n] = e[n] + alpha p[n+1], d[n] = f'[n] p[n]
  const Index steps = trace.u.steps();
  const Matrix fp = surrogate_values(layer.surrogate, trace.u.values);
  const double alpha = producer.lif->alpha();
  Matrix d(trace.u.channels(), steps);
  Vector p = e.col(steps - 1);
  d.col(steps - 1) = fp.col(steps - 1).cwiseProduct(p);
  for (Index n = steps - 2; n >= 0; --n) {
    p = e.col(n) + alpha * p;
    d.col(n) = fp.col(n).cwiseProduct(p);
  }
  return d;
}

}  // namespace

GradientReport backward_network_slayer(const Network& net, const NetworkTrace& traces,
                                       const LossGrad& loss_grad, bool keep_signals) {
  detail::LayerEngine engine;
  engine.from_spike_grad = [](const DenseLayer& layer, const LayerTrace& trace,
                              const Matrix& p) { return z_grad_slayer(layer, trace, p); };
  engine.from_error = [](const DenseLayer& layer, const LayerTrace& trace, const Matrix& e,
                         const SrmKernels& producer) {
    return z_grad_slayer_from_error(layer, trace, e, producer);
  };
  return detail::backward_network_common(net, traces, loss_grad, engine, keep_signals);
}

}  // namespace spikegrad
