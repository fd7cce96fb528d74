#pragma once

#include <Eigen/Dense>
#include <vector>

namespace spikegrad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Real-valued multichannel signal on a uniform discrete-time grid.
/// One row per channel, one column per time step.
struct TimeSeries {
  Matrix values;
  double dt = 1e-3;  // seconds per step

  TimeSeries() = default;
  TimeSeries(Matrix v, double dt_seconds);

  Index channels() const { return values.rows(); }
  Index steps() const { return values.cols(); }
};

/// Finite causal filter; taps[k] applies at lag k (tap 0 is the zero-lag
/// coefficient, the filter has no response before its input).
struct CausalKernel {
  std::vector<double> taps;

  explicit CausalKernel(std::vector<double> t);
  Index size() const { return static_cast<Index>(taps.size()); }
};

/// y[n] = sum_{k=0..min(n,K-1)} taps[k] * x[n-k].
/// Output has the same shape as the input; signals are quiescent before n=0.
TimeSeries causal_conv(const CausalKernel& kernel, const TimeSeries& x);

/// y[n] = (kernel * x)[n-1], y[0] = 0. A unit delay applied to causal_conv.
TimeSeries delayed_conv(const CausalKernel& kernel, const TimeSeries& x);

/// Adjoint of causal_conv: y[m] = sum_{j=0..K-1, m+j<T} taps[j] * e[m+j].
/// Accumulates future values of e through the kernel (correlation in time).
TimeSeries correlate_time(const CausalKernel& kernel, const TimeSeries& e);

}  // namespace spikegrad
