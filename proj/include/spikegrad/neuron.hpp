#pragma once

#include <optional>

#include "spikegrad/signal.hpp"

namespace spikegrad {

/// Leaky integrate-and-fire parameters. The decay factor per step is
/// alpha = exp(-dt/tau); tau = +infinity gives alpha = 1 (pure IF, no leak).
struct LifParams {
  double tau = 0.02;    // membrane time constant, seconds (+inf for IF)
  double dt = 1e-3;     // simulation step, seconds
  double theta = 1.0;   // firing threshold, > 0

  LifParams() = default;
  LifParams(double tau_s, double dt_s, double theta_);

  double alpha() const;

  static LifParams from_alpha(double alpha, double theta, double dt_s = 1e-3);
  static LifParams integrate_and_fire(double theta, double dt_s = 1e-3);
};

enum class KernelForm { GenericFir, LifParametric };

/// Spike response kernel (epsilon, applied to incoming spikes) and reset
/// kernel (nu, applied to the neuron's own outgoing spikes with a unit
/// delay). LifParametric kernels materialize epsilon_n = alpha^n and
/// nu_n = -theta * alpha^n on demand.
struct SrmKernels {
  KernelForm form = KernelForm::GenericFir;
  CausalKernel epsilon{{1.0}};
  CausalKernel nu{{0.0}};
  std::optional<LifParams> lif;

  static SrmKernels generic(CausalKernel epsilon_taps, CausalKernel nu_taps);
  static SrmKernels lif_parametric(const LifParams& params);

  bool is_lif() const { return form == KernelForm::LifParametric; }
  CausalKernel epsilon_taps(Index steps) const;
  CausalKernel nu_taps(Index steps) const;
};

enum class SurrogateFamily { Exponential, PiecewiseLinear, TanhDerivative, SigmoidDerivative };

/// Backward-pass stand-in for the spike nonlinearity derivative. `scale`
/// multiplies the family's base value pointwise and is the gradient-scale
/// hyperparameter exposed to experiments.
struct SurrogateSpec {
  SurrogateFamily family = SurrogateFamily::Exponential;
  double width = 1.0;
  double theta = 1.0;
  double scale = 1.0;
};

/// Hard threshold: 1 iff u reaches or exceeds theta.
double spike_fn(double u, double theta);

double surrogate_value(const SurrogateSpec& spec, double u);

/// Smoothed spike output sigma((u-theta)/width); only defined for the
/// SigmoidDerivative family so that its exact derivative equals
/// surrogate_value at scale 1. Used by the finite-difference oracle.
double soft_spike_fn(const SurrogateSpec& spec, double u);

Matrix surrogate_values(const SurrogateSpec& spec, const Matrix& u);

}  // namespace spikegrad
