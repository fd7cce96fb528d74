#include "spikegrad/neuron.hpp"

#include <cmath>
#include <limits>

#include "spikegrad/check.hpp"

namespace spikegrad {

LifParams::LifParams(double tau_s, double dt_s, double theta_) : tau(tau_s), dt(dt_s), theta(theta_) {
  SG_CHECK(tau > 0.0, "LifParams tau must be positive (may be +inf for IF)");
  SG_CHECK(dt > 0.0 && std::isfinite(dt), "LifParams dt must be positive and finite");
  SG_CHECK(theta > 0.0 && std::isfinite(theta), "LifParams theta must be positive");
}

double LifParams::alpha() const {
  if (std::isinf(tau)) return 1.0;
  return std::exp(-dt / tau);
}

LifParams LifParams::from_alpha(double alpha, double theta, double dt_s) {
  SG_CHECK(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  if (alpha == 1.0) return integrate_and_fire(theta, dt_s);
  return LifParams(-dt_s / std::log(alpha), dt_s, theta);
}

LifParams LifParams::integrate_and_fire(double theta, double dt_s) {
  return LifParams(std::numeric_limits<double>::infinity(), dt_s, theta);
}

SrmKernels SrmKernels::generic(CausalKernel epsilon_taps, CausalKernel nu_taps) {
  SrmKernels k;
  k.form = KernelForm::GenericFir;
  k.epsilon = std::move(epsilon_taps);
  k.nu = std::move(nu_taps);
  return k;
}

SrmKernels SrmKernels::lif_parametric(const LifParams& params) {
  SrmKernels k;
  k.form = KernelForm::LifParametric;
  k.lif = params;
  return k;
}

CausalKernel SrmKernels::epsilon_taps(Index steps) const {
  if (form == KernelForm::GenericFir) return epsilon;
  SG_CHECK(steps >= 1, "kernel materialization needs steps >= 1");
  const double a = lif->alpha();
  std::vector<double> taps(static_cast<std::size_t>(steps));
  double v = 1.0;
  for (std::size_t n = 0; n < taps.size(); ++n) {
    taps[n] = v;
    v *= a;
  }
  return CausalKernel(std::move(taps));
}

CausalKernel SrmKernels::nu_taps(Index steps) const {
  if (form == KernelForm::GenericFir) return nu;
  CausalKernel eps = epsilon_taps(steps);
  const double theta = lif->theta;
  for (double& t : eps.taps) t *= -theta;
  return eps;
}

double spike_fn(double u, double theta) {
  SG_CHECK(std::isfinite(u), "spike_fn: membrane potential must be finite");
  return u >= theta ? 1.0 : 0.0;
}

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double ex = std::exp(x);
  return ex / (1.0 + ex);
}

// Shared by the scalar and matrix entry points so both produce identical
// values for the same (family, width, theta, scale, u).
template <SurrogateFamily Family>
double surrogate_base(double x, double width) {
  if constexpr (Family == SurrogateFamily::Exponential) {
    return std::exp(-std::abs(x)) / (2.0 * width);
  } else if constexpr (Family == SurrogateFamily::PiecewiseLinear) {
    return std::max(0.0, 1.0 - std::abs(x)) / width;
  } else if constexpr (Family == SurrogateFamily::TanhDerivative) {
    const double t = std::tanh(x);
    return (1.0 - t * t) / (2.0 * width);
  } else {
    const double s = logistic(x);
    return s * (1.0 - s) / width;
  }
}

}  // namespace

double surrogate_value(const SurrogateSpec& spec, double u) {
  SG_CHECK(std::isfinite(u), "surrogate_value: u must be finite");
  SG_CHECK(spec.width > 0.0, "surrogate width must be positive");
  const double x = (u - spec.theta) / spec.width;
  double base = 0.0;
  switch (spec.family) {
    case SurrogateFamily::Exponential:
      base = surrogate_base<SurrogateFamily::Exponential>(x, spec.width);
      break;
    case SurrogateFamily::PiecewiseLinear:
      base = surrogate_base<SurrogateFamily::PiecewiseLinear>(x, spec.width);
      break;
    case SurrogateFamily::TanhDerivative:
      base = surrogate_base<SurrogateFamily::TanhDerivative>(x, spec.width);
      break;
    case SurrogateFamily::SigmoidDerivative:
      base = surrogate_base<SurrogateFamily::SigmoidDerivative>(x, spec.width);
      break;
  }
  return spec.scale * base;
}

double soft_spike_fn(const SurrogateSpec& spec, double u) {
  SG_CHECK(spec.family == SurrogateFamily::SigmoidDerivative,
           "soft_spike_fn requires the SigmoidDerivative family");
  SG_CHECK(std::isfinite(u), "soft_spike_fn: u must be finite");
  return logistic((u - spec.theta) / spec.width);
}

Matrix surrogate_values(const SurrogateSpec& spec, const Matrix& u) {
  SG_CHECK(spec.width > 0.0, "surrogate width must be positive");
  SG_CHECK(u.allFinite(), "surrogate_values: u must be finite");
  const auto x = (u.array() - spec.theta) / spec.width;
  const double gain = spec.scale;
  switch (spec.family) {
    case SurrogateFamily::Exponential:
      return gain * ((-x.abs()).exp() / (2.0 * spec.width));
    case SurrogateFamily::PiecewiseLinear:
      return gain * ((1.0 - x.abs()).max(0.0) / spec.width);
    case SurrogateFamily::TanhDerivative: {
      const Eigen::ArrayXXd t = x.tanh();
      return gain * ((1.0 - t.square()) / (2.0 * spec.width));
    }
    case SurrogateFamily::SigmoidDerivative: {
      const Eigen::ArrayXXd s = 1.0 / (1.0 + (-x).exp());
      return gain * (s * (1.0 - s) / spec.width);
    }
  }
  return Matrix::Zero(u.rows(), u.cols());
}

}  // namespace spikegrad
