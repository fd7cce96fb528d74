#pragma once

#include <cstdint>
#include <vector>

#include "spikegrad/neuron.hpp"
#include "spikegrad/signal.hpp"

namespace spikegrad {

enum class SpikeMode { Hard, Soft };

/// Binary events per neuron per step (values in [0,1] under Soft mode,
/// where the hard threshold is replaced by the smooth spike function).
struct SpikeTrain {
  Matrix bits;
  double dt = 1e-3;

  SpikeTrain() = default;
  SpikeTrain(Matrix b, double dt_seconds);

  Index neurons() const { return bits.rows(); }
  Index steps() const { return bits.cols(); }
};

struct DenseLayer {
  Matrix weights;  // N_out x N_in
  SrmKernels kernels;
  SurrogateSpec surrogate;

  Index n_out() const { return weights.rows(); }
  Index n_in() const { return weights.cols(); }
};

using Network = std::vector<DenseLayer>;

/// All per-layer forward signals retained for the backward passes:
/// a_in = epsilon * s_in (filtered input), z = W a_in, the membrane
/// potential u and the emitted spikes s.
struct LayerTrace {
  TimeSeries a_in;
  TimeSeries z;
  TimeSeries u;
  SpikeTrain s;
};

struct NetworkTrace {
  std::vector<LayerTrace> layers;
  SpikeTrain input;
  SpikeMode mode = SpikeMode::Hard;

  Index steps() const { return input.steps(); }
};

/// Simulates one layer sequentially in time:
///   a_in[n] = (epsilon * s_in)[n],  z[n] = W a_in[n],
///   u[n]    = z[n] + (nu * s)[n-1], s[n] = f(u[n]).
/// LifParametric kernels run the equivalent O(T) state recurrences.
LayerTrace forward_layer(const DenseLayer& layer, const SpikeTrain& s_in, SpikeMode mode);

NetworkTrace forward_network(const Network& net, const SpikeTrain& input, SpikeMode mode);

/// Network output a^(out) = (epsilon_last * s_last): the last layer's spikes
/// filtered by that layer's own spike-response kernel.
TimeSeries network_output(const Network& net, const NetworkTrace& trace);

/// Uniform weight init in [-b, b] with b = sqrt(1/N_in), drawn layer by
/// layer from a single seeded generator.
Network build_dense_network(Index input_channels, const std::vector<Index>& widths,
                            const SrmKernels& kernels, const SurrogateSpec& surrogate,
                            std::uint64_t seed);

}  // namespace spikegrad
