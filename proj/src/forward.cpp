#include "spikegrad/forward.hpp"

#include <cmath>
#include <random>

#include "spikegrad/check.hpp"

namespace spikegrad {

SpikeTrain::SpikeTrain(Matrix b, double dt_seconds) : bits(std::move(b)), dt(dt_seconds) {
  SG_CHECK(bits.cols() >= 1, "SpikeTrain needs at least one time step");
  SG_CHECK(bits.allFinite(), "SpikeTrain values must be finite");
  SG_CHECK(dt > 0.0, "SpikeTrain dt must be positive");
}

namespace {

// Column-wise spike emission; finiteness of u is checked once on the
// assembled trace rather than per element.
void emit_column(const DenseLayer& layer, SpikeMode mode, const Matrix& u, Matrix& s, Index n) {
  if (mode == SpikeMode::Hard) {
    s.col(n) = (u.col(n).array() >= layer.surrogate.theta).cast<double>();
    return;
  }
  for (Index i = 0; i < u.rows(); ++i) s(i, n) = soft_spike_fn(layer.surrogate, u(i, n));
}

LayerTrace forward_layer_lif(const DenseLayer& layer, const SpikeTrain& s_in, SpikeMode mode) {
  const LifParams& lif = *layer.kernels.lif;
  const double alpha = lif.alpha();
  const double theta = lif.theta;
  const Index steps = s_in.steps();
  const Index n_out = layer.n_out();

  // a_in[n] = alpha * a_in[n-1] + s_in[n]
  Matrix a_in(s_in.neurons(), steps);
  a_in.col(0) = s_in.bits.col(0);
  for (Index n = 1; n < steps; ++n) {
    a_in.col(n) = alpha * a_in.col(n - 1) + s_in.bits.col(n);
  }

  Matrix z = layer.weights * a_in;

  // reset state r[n] = alpha * r[n-1] - theta * s[n-1]
  Matrix u(n_out, steps);
  Matrix s(n_out, steps);
  Vector reset = Vector::Zero(n_out);
  for (Index n = 0; n < steps; ++n) {
    if (n > 0) reset = alpha * reset - theta * s.col(n - 1);
    u.col(n) = z.col(n) + reset;
    emit_column(layer, mode, u, s, n);
  }
  SG_CHECK(u.allFinite(), "forward_layer: membrane potential overflowed");

  LayerTrace trace;
  trace.a_in = TimeSeries(std::move(a_in), s_in.dt);
  trace.z = TimeSeries(std::move(z), s_in.dt);
  trace.u = TimeSeries(std::move(u), s_in.dt);
  trace.s = SpikeTrain(std::move(s), s_in.dt);
  return trace;
}

LayerTrace forward_layer_generic(const DenseLayer& layer, const SpikeTrain& s_in, SpikeMode mode) {
  const Index steps = s_in.steps();
  const Index n_out = layer.n_out();
  const CausalKernel eps = layer.kernels.epsilon_taps(steps);
  const CausalKernel nu = layer.kernels.nu_taps(steps);
  const Index nu_len = std::min<Index>(nu.size(), steps);

  TimeSeries a_in = causal_conv(eps, TimeSeries(s_in.bits, s_in.dt));
  Matrix z = layer.weights * a_in.values;

  Matrix u(n_out, steps);
  Matrix s(n_out, steps);
  for (Index n = 0; n < steps; ++n) {
    Vector reset = Vector::Zero(n_out);
    // (nu * s)[n-1]: own spikes strictly before n
    for (Index k = 0; k < nu_len && k <= n - 1; ++k) {
      reset += nu.taps[static_cast<std::size_t>(k)] * s.col(n - 1 - k);
    }
    u.col(n) = z.col(n) + reset;
    emit_column(layer, mode, u, s, n);
  }
  SG_CHECK(u.allFinite(), "forward_layer: membrane potential overflowed");

  LayerTrace trace;
  trace.a_in = std::move(a_in);
  trace.z = TimeSeries(std::move(z), s_in.dt);
  trace.u = TimeSeries(std::move(u), s_in.dt);
  trace.s = SpikeTrain(std::move(s), s_in.dt);
  return trace;
}

}  // namespace

LayerTrace forward_layer(const DenseLayer& layer, const SpikeTrain& s_in, SpikeMode mode) {
  SG_CHECK(layer.weights.allFinite(), "forward_layer: weights must be finite");
  SG_CHECK(layer.weights.cols() == s_in.neurons(),
           "forward_layer: weight columns must match input neuron count");
  if (layer.kernels.is_lif()) return forward_layer_lif(layer, s_in, mode);
  return forward_layer_generic(layer, s_in, mode);
}

NetworkTrace forward_network(const Network& net, const SpikeTrain& input, SpikeMode mode) {
  SG_CHECK(!net.empty(), "forward_network: network needs at least one layer");
  NetworkTrace trace;
  trace.input = input;
  trace.mode = mode;
  trace.layers.reserve(net.size());
  const SpikeTrain* feed = &input;
  for (const DenseLayer& layer : net) {
    trace.layers.push_back(forward_layer(layer, *feed, mode));
    feed = &trace.layers.back().s;
  }
  return trace;
}

TimeSeries network_output(const Network& net, const NetworkTrace& trace) {
  SG_CHECK(net.size() == trace.layers.size(), "network_output: trace/network mismatch");
  const DenseLayer& last = net.back();
  const SpikeTrain& s = trace.layers.back().s;
  if (last.kernels.is_lif()) {
    const double alpha = last.kernels.lif->alpha();
    Matrix out(s.neurons(), s.steps());
    out.col(0) = s.bits.col(0);
    for (Index n = 1; n < s.steps(); ++n) out.col(n) = alpha * out.col(n - 1) + s.bits.col(n);
    return TimeSeries(std::move(out), s.dt);
  }
  return causal_conv(last.kernels.epsilon_taps(s.steps()), TimeSeries(s.bits, s.dt));
}

Network build_dense_network(Index input_channels, const std::vector<Index>& widths,
                            const SrmKernels& kernels, const SurrogateSpec& surrogate,
                            std::uint64_t seed) {
  SG_CHECK(input_channels >= 1, "build_dense_network: need at least one input channel");
  SG_CHECK(!widths.empty(), "build_dense_network: need at least one layer");
  std::mt19937_64 rng(seed);
  Network net;
  net.reserve(widths.size());
  Index fan_in = input_channels;
  for (Index width : widths) {
    SG_CHECK(width >= 1, "build_dense_network: layer widths must be positive");
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(width, fan_in);
    for (Index i = 0; i < width; ++i) {
      for (Index j = 0; j < fan_in; ++j) w(i, j) = dist(rng);
    }
    net.push_back(DenseLayer{std::move(w), kernels, surrogate});
    fan_in = width;
  }
  return net;
}

}  // namespace spikegrad
