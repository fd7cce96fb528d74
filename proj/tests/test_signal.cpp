#include <doctest.h>

#include <random>

#include "spikegrad/check.hpp"
#include "spikegrad/signal.hpp"

using namespace spikegrad;

namespace {

TimeSeries series(std::initializer_list<double> row) {
  Matrix m(1, static_cast<Index>(row.size()));
  Index i = 0;
  for (double v : row) m(0, i++) = v;
  return TimeSeries(m, 1e-3);
}

// Direct double-loop evaluation of the defining sums, kept independent of
// the blocked implementations.
Matrix conv_reference(const CausalKernel& k, const Matrix& x) {
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (Index c = 0; c < x.rows(); ++c) {
    for (Index n = 0; n < x.cols(); ++n) {
      for (Index lag = 0; lag <= std::min<Index>(n, k.size() - 1); ++lag) {
        y(c, n) += k.taps[static_cast<std::size_t>(lag)] * x(c, n - lag);
      }
    }
  }
  return y;
}

Matrix correlate_reference(const CausalKernel& k, const Matrix& e) {
  Matrix y = Matrix::Zero(e.rows(), e.cols());
  for (Index c = 0; c < e.rows(); ++c) {
    for (Index m = 0; m < e.cols(); ++m) {
      for (Index kk = m; kk < e.cols(); ++kk) {
        if (kk - m >= k.size()) break;
        y(c, m) += k.taps[static_cast<std::size_t>(kk - m)] * e(c, kk);
      }
    }
  }
  return y;
}

}  // namespace

TEST_CASE("causal_conv basics") {
  CHECK(causal_conv(CausalKernel({1.0}), series({3, -1, 2})).values.row(0).isApprox(
      series({3, -1, 2}).values.row(0)));
  CHECK(causal_conv(CausalKernel({1.0, 0.5}), series({0, 0, 0})).values.cwiseAbs().maxCoeff() ==
        0.0);

  const TimeSeries y = causal_conv(CausalKernel({1.0, 0.5}), series({1, 0, 1}));
  const Matrix expect = conv_reference(CausalKernel({1.0, 0.5}), series({1, 0, 1}).values);
  CHECK(y.values(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(y.values(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(y.values(0, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((y.values - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("delayed_conv basics") {
  const TimeSeries a = delayed_conv(CausalKernel({-1.0}), series({1, 0, 0}));
  CHECK(a.values(0, 0) == 0.0);
  CHECK(a.values(0, 1) == -1.0);
  CHECK(a.values(0, 2) == 0.0);

  CHECK(delayed_conv(CausalKernel({0.3, -2.0}), series({0, 0, 0, 0})).values.cwiseAbs().maxCoeff()
        == 0.0);

  const TimeSeries b = delayed_conv(CausalKernel({-1.0, -0.5}), series({1, 1, 0}));
  CHECK(b.values(0, 0) == doctest::Approx(0.0));
  CHECK(b.values(0, 1) == doctest::Approx(-1.0));
  CHECK(b.values(0, 2) == doctest::Approx(-1.5));
}

TEST_CASE("delayed_conv equals shifted causal_conv") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix x(3, 17);
  for (Index i = 0; i < x.size(); ++i) x(i) = dist(rng);
  CausalKernel k({dist(rng), dist(rng), dist(rng)});
  const TimeSeries xs(x, 1e-3);
  const TimeSeries shifted = delayed_conv(k, xs);
  const TimeSeries conv = causal_conv(k, xs);
  for (Index n = 1; n < xs.steps(); ++n) {
    CHECK(shifted.values.col(n).isApprox(conv.values.col(n - 1), 1e-15));
  }
  CHECK(shifted.values.col(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("correlate_time basics") {
  CHECK(correlate_time(CausalKernel({1.0}), series({2, 5, -1})).values.row(0).isApprox(
      series({2, 5, -1}).values.row(0)));

  const TimeSeries a = correlate_time(CausalKernel({1.0, 0.5}), series({0, 0, 1}));
  CHECK(a.values(0, 0) == doctest::Approx(0.0));
  CHECK(a.values(0, 1) == doctest::Approx(0.5));
  CHECK(a.values(0, 2) == doctest::Approx(1.0));

  const TimeSeries b = correlate_time(CausalKernel({1.0, 0.5, 0.25}), series({1, 0, 0}));
  CHECK(b.values(0, 0) == doctest::Approx(1.0));
  CHECK(b.values(0, 1) == doctest::Approx(0.0));
  CHECK(b.values(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("conv and correlate match the double-loop references on random data") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index channels = 1 + static_cast<Index>(rng() % 4);
    const Index steps = 1 + static_cast<Index>(rng() % 32);
    const Index taps = 1 + static_cast<Index>(rng() % 6);
    Matrix x(channels, steps);
    for (Index i = 0; i < x.size(); ++i) x(i) = dist(rng);
    std::vector<double> tap_values(static_cast<std::size_t>(taps));
    for (double& t : tap_values) t = dist(rng);
    const CausalKernel k(tap_values);
    const TimeSeries xs(x, 1e-3);
    CHECK((causal_conv(k, xs).values - conv_reference(k, x)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((correlate_time(k, xs).values - correlate_reference(k, x)).cwiseAbs().maxCoeff()
          < 1e-14);
  }
}

TEST_CASE("convolution and correlation are adjoint") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index steps = 1 + static_cast<Index>(rng() % 40);
    const Index taps = 1 + static_cast<Index>(rng() % 8);
    Matrix x(2, steps), e(2, steps);
    for (Index i = 0; i < x.size(); ++i) x(i) = dist(rng);
    for (Index i = 0; i < e.size(); ++i) e(i) = dist(rng);
    std::vector<double> tap_values(static_cast<std::size_t>(taps));
    for (double& t : tap_values) t = dist(rng);
    const CausalKernel k(tap_values);
    const TimeSeries xs(x, 1e-3), es(e, 1e-3);
    const double lhs = causal_conv(k, xs).values.cwiseProduct(e).sum();
    const double rhs = correlate_time(k, es).values.cwiseProduct(x).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("causal_conv is linear and shift equivariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const CausalKernel k({0.7, -0.2, 0.1});
  Matrix x(1, 24), y(1, 24);
  for (Index i = 0; i < 24; ++i) {
    x(0, i) = dist(rng);
    y(0, i) = dist(rng);
  }
  const TimeSeries xs(x, 1e-3), ys(y, 1e-3);

  const Matrix sum = causal_conv(k, TimeSeries(2.0 * x + 3.0 * y, 1e-3)).values;
  const Matrix lin = 2.0 * causal_conv(k, xs).values + 3.0 * causal_conv(k, ys).values;
  CHECK((sum - lin).cwiseAbs().maxCoeff() < 1e-13);

  Matrix x_shift = Matrix::Zero(1, 24);
  x_shift.block(0, 1, 1, 23) = x.block(0, 0, 1, 23);
  const Matrix conv = causal_conv(k, xs).values;
  const Matrix conv_shift = causal_conv(k, TimeSeries(x_shift, 1e-3)).values;
  for (Index n = 1; n < 24; ++n) {
    CHECK(conv_shift(0, n) == doctest::Approx(conv(0, n - 1)).epsilon(1e-13));
  }
}

TEST_CASE("type invariants are enforced") {
  CHECK_THROWS_AS(TimeSeries(Matrix::Zero(1, 0), 1e-3), CheckError);
  CHECK_THROWS_AS(TimeSeries(Matrix::Zero(1, 3), 0.0), CheckError);
  Matrix bad(1, 2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(TimeSeries(bad, 1e-3), CheckError);
  CHECK_THROWS_AS(CausalKernel({}), CheckError);
  CHECK_THROWS_AS(CausalKernel({std::numeric_limits<double>::infinity()}), CheckError);
}
