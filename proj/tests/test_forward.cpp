#include <doctest.h>

#include <random>

#include "spikegrad/check.hpp"
#include "spikegrad/forward.hpp"

using namespace spikegrad;

namespace {

SpikeTrain make_train(std::initializer_list<std::initializer_list<double>> rows) {
  const Index channels = static_cast<Index>(rows.size());
  const Index steps = static_cast<Index>(rows.begin()->size());
  Matrix m(channels, steps);
  Index r = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return SpikeTrain(m, 1e-3);
}

SurrogateSpec default_surrogate(double theta) {
  return SurrogateSpec{SurrogateFamily::Exponential, 1.0, theta, 1.0};
}

}  // namespace

TEST_CASE("single LIF neuron trace") {
  const LifParams lif = LifParams::from_alpha(0.5, 1.0);
  DenseLayer layer{Matrix::Constant(1, 1, 1.5), SrmKernels::lif_parametric(lif),
                   default_surrogate(1.0)};
  const SpikeTrain input = make_train({{1, 1, 0}});
  const LayerTrace trace = forward_layer(layer, input, SpikeMode::Hard);

  CHECK(trace.u.values(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(trace.u.values(0, 1) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(trace.u.values(0, 2) == doctest::Approx(-0.375).epsilon(1e-12));
  CHECK(trace.s.bits(0, 0) == 1.0);
  CHECK(trace.s.bits(0, 1) == 1.0);
  CHECK(trace.s.bits(0, 2) == 0.0);
}

TEST_CASE("zero input stays quiescent") {
  const LifParams lif = LifParams::from_alpha(0.9, 1.0);
  DenseLayer layer{Matrix::Constant(2, 3, 0.8), SrmKernels::lif_parametric(lif),
                   default_surrogate(1.0)};
  const SpikeTrain input = make_train({{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  const LayerTrace trace = forward_layer(layer, input, SpikeMode::Hard);
  CHECK(trace.u.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(trace.s.bits.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unreachable threshold leaves u equal to z") {
  const LifParams lif = LifParams::from_alpha(0.7, 1e12);
  DenseLayer layer{Matrix::Constant(1, 2, 0.9), SrmKernels::lif_parametric(lif),
                   default_surrogate(1e12)};
  const SpikeTrain input = make_train({{1, 0, 1, 1}, {0, 1, 1, 0}});
  const LayerTrace trace = forward_layer(layer, input, SpikeMode::Hard);
  CHECK((trace.u.values - trace.z.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(trace.s.bits.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("LIF recurrence agrees with the materialized convolution form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> weight(-1.2, 1.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution fire(0.35);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n_in = 2 + static_cast<Index>(rng() % 3);
    const Index n_out = 1 + static_cast<Index>(rng() % 4);
    const Index steps = trial == 0 ? 512 : 2 + static_cast<Index>(rng() % 63);
    const double alpha = trial % 3 == 0 ? 1.0 : 0.3 + 0.65 * unit(rng);
    const LifParams lif = LifParams::from_alpha(alpha, 1.0);

    Matrix w(n_out, n_in);
    for (Index i = 0; i < w.size(); ++i) w(i) = weight(rng);
    Matrix in(n_in, steps);
    for (Index i = 0; i < in.size(); ++i) in(i) = fire(rng) ? 1.0 : 0.0;
    const SpikeTrain input(in, 1e-3);

    DenseLayer fast{w, SrmKernels::lif_parametric(lif), default_surrogate(1.0)};
    SrmKernels parametric = SrmKernels::lif_parametric(lif);
    DenseLayer conv{w,
                    SrmKernels::generic(parametric.epsilon_taps(steps),
                                        parametric.nu_taps(steps)),
                    default_surrogate(1.0)};

    const LayerTrace a = forward_layer(fast, input, SpikeMode::Hard);
    const LayerTrace b = forward_layer(conv, input, SpikeMode::Hard);
    CHECK((a.u.values - b.u.values).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((a.s.bits - b.s.bits).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.a_in.values - b.a_in.values).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("forward residuals vanish") {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution fire(0.4);
  std::uniform_real_distribution<double> weight(-1.5, 1.5);

  const Index steps = 40;
  Matrix in(3, steps);
  for (Index i = 0; i < in.size(); ++i) in(i) = fire(rng) ? 1.0 : 0.0;
  const SpikeTrain input(in, 1e-3);

  for (bool lif : {true, false}) {
    SrmKernels kernels = lif
        ? SrmKernels::lif_parametric(LifParams::from_alpha(0.8, 1.0))
        : SrmKernels::generic(CausalKernel({1.0, 0.6, 0.3}), CausalKernel({-1.0, -0.5}));
    Matrix w(4, 3);
    for (Index i = 0; i < w.size(); ++i) w(i) = weight(rng);
    DenseLayer layer{w, kernels, default_surrogate(1.0)};
    const LayerTrace trace = forward_layer(layer, input, SpikeMode::Hard);

    // Phi_u[n] = u[n] - z[n] - (nu * s)[n-1]
    const TimeSeries reset =
        delayed_conv(kernels.nu_taps(steps), TimeSeries(trace.s.bits, 1e-3));
    const Matrix phi_u = trace.u.values - trace.z.values - reset.values;
    CHECK(phi_u.cwiseAbs().maxCoeff() <= 1e-12);

    // Phi_s[n] = s[n] - f(u[n])
    for (Index i = 0; i < trace.s.neurons(); ++i) {
      for (Index n = 0; n < steps; ++n) {
        CHECK(trace.s.bits(i, n) == spike_fn(trace.u.values(i, n), 1.0));
      }
    }

    // a_in is the filtered input
    const TimeSeries a_ref = causal_conv(kernels.epsilon_taps(steps), TimeSeries(in, 1e-3));
    CHECK((trace.a_in.values - a_ref.values).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("identity-weight two-layer relay") {
  const LifParams lif = LifParams::from_alpha(1.0, 0.5);
  const SrmKernels kernels = SrmKernels::lif_parametric(lif);
  const SurrogateSpec surrogate = default_surrogate(0.5);
  Network net{DenseLayer{Matrix::Identity(1, 1), kernels, surrogate},
              DenseLayer{Matrix::Identity(1, 1), kernels, surrogate}};
  const SpikeTrain input = make_train({{1, 0, 0, 0}});
  const NetworkTrace trace = forward_network(net, input, SpikeMode::Hard);

  Matrix s0(1, 4), s1(1, 4);
  s0 << 1, 1, 0, 0;
  s1 << 1, 1, 1, 1;
  CHECK((trace.layers[0].s.bits - s0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((trace.layers[1].s.bits - s1).cwiseAbs().maxCoeff() == 0.0);

  Matrix u1(1, 4);
  u1 << 1.0, 1.5, 1.0, 0.5;
  CHECK((trace.layers[1].u.values - u1).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("single-layer network reduces to forward_layer") {
  const LifParams lif = LifParams::from_alpha(0.6, 1.0);
  DenseLayer layer{Matrix::Constant(2, 2, 0.7), SrmKernels::lif_parametric(lif),
                   default_surrogate(1.0)};
  const SpikeTrain input = make_train({{1, 0, 1}, {0, 1, 1}});
  const NetworkTrace net_trace = forward_network({layer}, input, SpikeMode::Hard);
  const LayerTrace direct = forward_layer(layer, input, SpikeMode::Hard);
  CHECK((net_trace.layers[0].u.values - direct.u.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((net_trace.layers[0].s.bits - direct.s.bits).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("all-zero weights keep every layer silent") {
  const LifParams lif = LifParams::from_alpha(0.9, 1.0);
  const SurrogateSpec surrogate = default_surrogate(1.0);
  Network net{DenseLayer{Matrix::Zero(3, 2), SrmKernels::lif_parametric(lif), surrogate},
              DenseLayer{Matrix::Zero(2, 3), SrmKernels::lif_parametric(lif), surrogate}};
  const SpikeTrain input = make_train({{1, 1, 1}, {1, 0, 1}});
  const NetworkTrace trace = forward_network(net, input, SpikeMode::Hard);
  for (const LayerTrace& layer : trace.layers) {
    CHECK(layer.s.bits.cwiseAbs().maxCoeff() == 0.0);
    CHECK(layer.u.values.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("soft mode produces values in [0,1] and holds its residuals") {
  const LifParams lif = LifParams::from_alpha(0.8, 1.0);
  SurrogateSpec sigmoid{SurrogateFamily::SigmoidDerivative, 1.0, 1.0, 1.0};
  DenseLayer layer{Matrix::Constant(2, 2, 1.1), SrmKernels::lif_parametric(lif), sigmoid};
  const SpikeTrain input = make_train({{1, 0, 1, 1}, {0, 1, 0, 1}});
  const LayerTrace trace = forward_layer(layer, input, SpikeMode::Soft);
  CHECK(trace.s.bits.minCoeff() >= 0.0);
  CHECK(trace.s.bits.maxCoeff() <= 1.0);
  for (Index i = 0; i < 2; ++i) {
    for (Index n = 0; n < 4; ++n) {
      CHECK(trace.s.bits(i, n) ==
            doctest::Approx(soft_spike_fn(sigmoid, trace.u.values(i, n))).epsilon(1e-15));
    }
  }
}

TEST_CASE("deterministic builds and runs") {
  const SrmKernels kernels = SrmKernels::lif_parametric(LifParams::from_alpha(0.85, 1.0));
  const SurrogateSpec surrogate = default_surrogate(1.0);
  const Network a = build_dense_network(4, {3, 2}, kernels, surrogate, 123);
  const Network b = build_dense_network(4, {3, 2}, kernels, surrogate, 123);
  for (std::size_t l = 0; l < a.size(); ++l) {
    CHECK((a[l].weights - b[l].weights).cwiseAbs().maxCoeff() == 0.0);
  }
  const Network c = build_dense_network(4, {3, 2}, kernels, surrogate, 124);
  CHECK((a[0].weights - c[0].weights).cwiseAbs().maxCoeff() > 0.0);

  const double bound = std::sqrt(1.0 / 4.0);
  CHECK(a[0].weights.cwiseAbs().maxCoeff() <= bound);

  const SpikeTrain input = make_train({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}, {0, 0, 1}});
  const NetworkTrace t1 = forward_network(a, input, SpikeMode::Hard);
  const NetworkTrace t2 = forward_network(a, input, SpikeMode::Hard);
  CHECK((t1.layers[1].u.values - t2.layers[1].u.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward rejects bad inputs") {
  const LifParams lif = LifParams::from_alpha(0.5, 1.0);
  DenseLayer layer{Matrix::Constant(1, 2, 1.0), SrmKernels::lif_parametric(lif),
                   default_surrogate(1.0)};
  const SpikeTrain wrong = make_train({{1, 0}});
  CHECK_THROWS_AS(forward_layer(layer, wrong, SpikeMode::Hard), CheckError);

  DenseLayer nan_layer = layer;
  nan_layer.weights(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const SpikeTrain ok = make_train({{1, 0}, {0, 1}});
  CHECK_THROWS_AS(forward_layer(nan_layer, ok, SpikeMode::Hard), CheckError);

  CHECK_THROWS_AS(forward_network({}, ok, SpikeMode::Hard), CheckError);
}
