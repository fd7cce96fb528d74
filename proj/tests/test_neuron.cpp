#include <doctest.h>

#include <cmath>

#include "spikegrad/check.hpp"
#include "spikegrad/neuron.hpp"

using namespace spikegrad;

TEST_CASE("spike_fn thresholds at reach-or-exceed") {
  CHECK(spike_fn(1.0, 1.0) == 1.0);
  CHECK(spike_fn(0.999, 1.0) == 0.0);
  CHECK(spike_fn(-5.0, 1.0) == 0.0);
  CHECK(spike_fn(2.5, 1.0) == 1.0);
}

TEST_CASE("surrogate families") {
  SurrogateSpec exp_spec{SurrogateFamily::Exponential, 1.0, 1.0, 1.0};
  CHECK(surrogate_value(exp_spec, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

  SurrogateSpec pwl{SurrogateFamily::PiecewiseLinear, 0.5, 1.0, 1.0};
  CHECK(surrogate_value(pwl, 2.0) == 0.0);
  CHECK(surrogate_value(pwl, 1.0) == doctest::Approx(2.0));

  for (SurrogateFamily family :
       {SurrogateFamily::Exponential, SurrogateFamily::PiecewiseLinear,
        SurrogateFamily::TanhDerivative, SurrogateFamily::SigmoidDerivative}) {
    SurrogateSpec zero{family, 0.7, 1.0, 0.0};
    for (double u : {-3.0, 0.0, 1.0, 9.0}) CHECK(surrogate_value(zero, u) == 0.0);
  }
}

TEST_CASE("surrogates are symmetric about theta, non-negative and peak there") {
  for (SurrogateFamily family :
       {SurrogateFamily::Exponential, SurrogateFamily::PiecewiseLinear,
        SurrogateFamily::TanhDerivative, SurrogateFamily::SigmoidDerivative}) {
    SurrogateSpec spec{family, 0.8, 1.3, 2.0};
    const double peak = surrogate_value(spec, spec.theta);
    for (double offset : {0.1, 0.4, 0.9, 2.7}) {
      const double lo = surrogate_value(spec, spec.theta - offset);
      const double hi = surrogate_value(spec, spec.theta + offset);
      CHECK(lo == doctest::Approx(hi).epsilon(1e-13));
      CHECK(lo >= 0.0);
      CHECK(lo <= peak + 1e-15);
    }
  }
}

TEST_CASE("scale multiplies the base surrogate value") {
  for (SurrogateFamily family :
       {SurrogateFamily::Exponential, SurrogateFamily::PiecewiseLinear,
        SurrogateFamily::TanhDerivative, SurrogateFamily::SigmoidDerivative}) {
    SurrogateSpec base{family, 0.6, 1.0, 1.0};
    SurrogateSpec scaled{family, 0.6, 1.0, 7.5};
    for (double u : {0.2, 0.95, 1.0, 1.4}) {
      CHECK(surrogate_value(scaled, u) ==
            doctest::Approx(7.5 * surrogate_value(base, u)).epsilon(1e-14));
    }
  }
}

TEST_CASE("soft_spike_fn") {
  SurrogateSpec spec{SurrogateFamily::SigmoidDerivative, 1.0, 1.0, 1.0};
  CHECK(soft_spike_fn(spec, 1.0) == doctest::Approx(0.5));
  CHECK(soft_spike_fn(spec, 60.0) == doctest::Approx(1.0));
  CHECK(soft_spike_fn(spec, -60.0) == doctest::Approx(0.0).epsilon(1e-20));

  SurrogateSpec unit{SurrogateFamily::SigmoidDerivative, 1.0, 0.0, 1.0};
  CHECK(soft_spike_fn(unit, 1.0) == doctest::Approx(0.7310585786).epsilon(1e-9));

  SurrogateSpec wrong{SurrogateFamily::Exponential, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(soft_spike_fn(wrong, 0.5), CheckError);
}

TEST_CASE("soft_spike_fn derivative equals the sigmoid surrogate at scale 1") {
  SurrogateSpec spec{SurrogateFamily::SigmoidDerivative, 0.7, 1.1, 1.0};
  const double h = 1e-6;
  for (double u : {-1.0, 0.3, 1.1, 1.8, 4.0}) {
    const double fd = (soft_spike_fn(spec, u + h) - soft_spike_fn(spec, u - h)) / (2.0 * h);
    CHECK(std::abs(fd - surrogate_value(spec, u)) <= 1e-8);
  }
}

TEST_CASE("LifParams alpha") {
  const LifParams lif(0.02, 1e-3, 1.0);
  CHECK(lif.alpha() == doctest::Approx(std::exp(-0.05)).epsilon(1e-15));
  const LifParams iff = LifParams::integrate_and_fire(1.0);
  CHECK(iff.alpha() == 1.0);
  const LifParams round = LifParams::from_alpha(0.9, 1.0);
  CHECK(round.alpha() == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(LifParams::from_alpha(1.0, 2.0).alpha() == 1.0);
  CHECK_THROWS_AS(LifParams(0.02, 1e-3, -1.0), CheckError);
  CHECK_THROWS_AS(LifParams::from_alpha(1.5, 1.0), CheckError);
}

TEST_CASE("LIF kernels materialize the alpha recursion exactly") {
  const LifParams lif = LifParams::from_alpha(0.75, 2.0);
  const SrmKernels kernels = SrmKernels::lif_parametric(lif);
  const CausalKernel eps = kernels.epsilon_taps(64);
  const CausalKernel nu = kernels.nu_taps(64);
  CHECK(eps.taps[0] == 1.0);
  for (std::size_t n = 0; n + 1 < eps.taps.size(); ++n) {
    CHECK(eps.taps[n + 1] == 0.75 * eps.taps[n]);
  }
  for (std::size_t n = 0; n < nu.taps.size(); ++n) {
    CHECK(nu.taps[n] == -2.0 * eps.taps[n]);
  }
}
