#include "spikegrad/signal.hpp"

#include <cmath>

#include "spikegrad/check.hpp"

namespace spikegrad {

TimeSeries::TimeSeries(Matrix v, double dt_seconds) : values(std::move(v)), dt(dt_seconds) {
  SG_CHECK(values.cols() >= 1, "TimeSeries needs at least one time step");
  SG_CHECK(values.allFinite(), "TimeSeries values must be finite");
  SG_CHECK(dt > 0.0, "TimeSeries dt must be positive");
}

CausalKernel::CausalKernel(std::vector<double> t) : taps(std::move(t)) {
  SG_CHECK(!taps.empty(), "CausalKernel needs at least one tap");
  for (double v : taps) {
    SG_CHECK(std::isfinite(v), "CausalKernel taps must be finite");
  }
}

TimeSeries causal_conv(const CausalKernel& kernel, const TimeSeries& x) {
  const Index channels = x.channels();
  const Index steps = x.steps();
  Matrix out = Matrix::Zero(channels, steps);
  const Index lags = std::min<Index>(kernel.size(), steps);
  for (Index k = 0; k < lags; ++k) {
    if (kernel.taps[static_cast<std::size_t>(k)] == 0.0) continue;
    out.block(0, k, channels, steps - k) +=
        kernel.taps[static_cast<std::size_t>(k)] * x.values.block(0, 0, channels, steps - k);
  }
  return TimeSeries(std::move(out), x.dt);
}

TimeSeries delayed_conv(const CausalKernel& kernel, const TimeSeries& x) {
  const Index channels = x.channels();
  const Index steps = x.steps();
  TimeSeries conv = causal_conv(kernel, x);
  Matrix out = Matrix::Zero(channels, steps);
  if (steps > 1) {
    out.block(0, 1, channels, steps - 1) = conv.values.block(0, 0, channels, steps - 1);
  }
  return TimeSeries(std::move(out), x.dt);
}

TimeSeries correlate_time(const CausalKernel& kernel, const TimeSeries& e) {
  const Index channels = e.channels();
  const Index steps = e.steps();
  Matrix out = Matrix::Zero(channels, steps);
  const Index lags = std::min<Index>(kernel.size(), steps);
  for (Index j = 0; j < lags; ++j) {
    if (kernel.taps[static_cast<std::size_t>(j)] == 0.0) continue;
    out.block(0, 0, channels, steps - j) +=
        kernel.taps[static_cast<std::size_t>(j)] * e.values.block(0, j, channels, steps - j);
  }
  return TimeSeries(std::move(out), e.dt);
}

}  // namespace spikegrad
