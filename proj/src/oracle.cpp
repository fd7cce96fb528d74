#include "spikegrad/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "spikegrad/check.hpp"

namespace spikegrad {

DenseJacobians build_ift_jacobians(const LayerTrace& trace, const SrmKernels& kernels,
                                   const SurrogateSpec& spec) {
  const Index neurons = trace.u.channels();
  const Index steps = trace.u.steps();
  const Index nt = neurons * steps;
  SG_CHECK(nt <= 512, "build_ift_jacobians: dense path capped at N*T <= 512");

  const Matrix fp = surrogate_values(spec, trace.u.values);
  const CausalKernel nu = kernels.nu_taps(steps);
  const Index taps = nu.size();

  DenseJacobians jac;
  jac.neurons = neurons;
  jac.steps = steps;
  jac.j_dep = Matrix::Zero(2 * nt, 2 * nt);
  jac.j_indep = Matrix::Zero(2 * nt, nt);

  auto flat = [neurons](Index n, Index i) { return n * neurons + i; };
  for (Index n = 0; n < steps; ++n) {
    for (Index i = 0; i < neurons; ++i) {
      const Index r = flat(n, i);
      jac.j_dep(r, r) = 1.0;                       // dPhi_s/ds
      jac.j_dep(r, nt + r) = -fp(i, n);            // dPhi_s/du
      jac.j_dep(nt + r, nt + r) = 1.0;             // dPhi_u/du
      jac.j_indep(nt + r, r) = -1.0;               // dPhi_u/dz
      for (Index m = 0; m <= n - 1; ++m) {
        const Index lag = n - 1 - m;
        if (lag >= taps) continue;
        jac.j_dep(nt + r, flat(m, i)) = -nu.taps[static_cast<std::size_t>(lag)];
      }
    }
  }
  return jac;
}

double jacobian_determinant(const DenseJacobians& jac) {
  return jac.j_dep.partialPivLu().determinant();
}

Matrix solve_ift_dense(const DenseJacobians& jac) {
  const Index nt = jac.neurons * jac.steps;
  const Matrix a = jac.j_dep.block(0, nt, nt, nt);   // = -diag(f')
  const Matrix b = jac.j_dep.block(nt, 0, nt, nt);   // = nu_{-1}, entries -nu_{n-1-m}
  // Eliminating u from J_dep G = -J_indep leaves the unit lower triangular
  // system (I - diag(f') * conv_lower) S = diag(f'), which in terms of the
  // stored blocks reads (I - a b) S = -a.
  const Matrix m = Matrix::Identity(nt, nt) - a * b;
  const Matrix rhs = -a;
  Matrix solution(nt, nt);
  for (Index r = 0; r < nt; ++r) {
    solution.row(r) = rhs.row(r);
    if (r > 0) solution.row(r).noalias() -= m.row(r).head(r) * solution.topRows(r);
  }
  return solution;
}

Matrix sigma_to_dense(const SigmaBlock& block) {
  const Index neurons = block.neurons();
  const Index steps = block.steps;
  const Index nt = neurons * steps;
  Matrix dense = Matrix::Zero(nt, nt);
  for (Index i = 0; i < neurons; ++i) {
    const Matrix& sig = block.per_neuron[static_cast<std::size_t>(i)];
    for (Index m = 0; m < steps; ++m) {
      for (Index n = 0; n <= m; ++n) {
        dense(m * neurons + i, n * neurons + i) = sig(m, n);
      }
    }
  }
  return dense;
}

double chi_closed_form(std::span<const double> fprime, const LifParams& params, Index m,
                       Index n) {
  SG_CHECK(n > m, "chi_closed_form: requires n > m");
  SG_CHECK(m >= 0 && static_cast<std::size_t>(n) <= fprime.size(),
           "chi_closed_form: indices outside the f' sequence");
  const double alpha = params.alpha();
  const double theta = params.theta;
  double product = 1.0;
  for (Index k = m + 1; k <= n - 1; ++k) {
    product *= alpha - theta * fprime[static_cast<std::size_t>(k)];
  }
  return -theta * fprime[static_cast<std::size_t>(m)] * product;
}

double gamma_chi_iterative(std::span<const double> fprime, const LifParams& params, Index m,
                           Index n) {
  SG_CHECK(n > m, "gamma_chi_iterative: requires n > m");
  SG_CHECK(m >= 0 && static_cast<std::size_t>(n) <= fprime.size(),
           "gamma_chi_iterative: indices outside the f' sequence");
  const double alpha = params.alpha();
  const double theta = params.theta;
  double chi = 1.0;  // chi_m[m+1]
  for (Index k = m + 1; k < n; ++k) {
    chi *= alpha - theta * fprime[static_cast<std::size_t>(k)];
  }
  return -theta * fprime[static_cast<std::size_t>(m)] * chi;
}

double gamma_recursive(std::span<const double> fprime, const LifParams& params, Index m,
                       Index n) {
  SG_CHECK(n > m, "gamma_recursive: requires n > m");
  SG_CHECK(m >= 0 && static_cast<std::size_t>(n) <= fprime.size(),
           "gamma_recursive: indices outside the f' sequence");
  const double alpha = params.alpha();
  const double theta = params.theta;
  std::vector<double> gamma(static_cast<std::size_t>(n - m + 1));
  gamma[0] = 1.0;  // gamma_m[m]
  for (Index j = m + 1; j <= n; ++j) {
    double acc = 0.0;
    double power = 1.0;  // alpha^{j-1-k}, k descending from j-1
    for (Index k = j - 1; k >= m; --k) {
      const double sigma =
          fprime[static_cast<std::size_t>(k)] * gamma[static_cast<std::size_t>(k - m)];
      acc += power * sigma;
      power *= alpha;
    }
    gamma[static_cast<std::size_t>(j - m)] = -theta * acc;
  }
  return gamma[static_cast<std::size_t>(n - m)];
}

DecayBoundReport check_decay_bound(const LayerTrace& trace, const LifParams& params,
                                   const DecayBoundParams& bound, const SurrogateSpec& spec) {
  SG_CHECK(bound.mu > 0.0, "check_decay_bound: mu must be positive");
  const Index neurons = trace.u.channels();
  const Index steps = trace.u.steps();
  const Matrix fp = surrogate_values(spec, trace.u.values);
  const double alpha = params.alpha();
  const double theta = params.theta;

  DecayBoundReport report;
  report.max_upper_violation = -std::numeric_limits<double>::infinity();
  report.min_chi = std::numeric_limits<double>::infinity();
  if (steps >= 2) report.max_abs_chi_by_gap.assign(static_cast<std::size_t>(steps - 1), 0.0);

  for (Index i = 0; i < neurons; ++i) {
    for (Index m = 0; m + 1 < steps; ++m) {
      double chi = 1.0;        // chi_m[m+1]
      double envelope = 1.0;   // mu^{n-m-1}
      for (Index n = m + 1; n < steps; ++n) {
        const Index gap = n - m - 1;
        report.max_upper_violation = std::max(report.max_upper_violation, chi - envelope);
        report.min_chi = std::min(report.min_chi, chi);
        auto& cell = report.max_abs_chi_by_gap[static_cast<std::size_t>(gap)];
        cell = std::max(cell, std::abs(chi));
        chi *= alpha - theta * fp(i, n);
        envelope *= bound.mu;
      }
    }
  }
  if (!std::isfinite(report.max_upper_violation)) report.max_upper_violation = 0.0;
  if (!std::isfinite(report.min_chi)) report.min_chi = 0.0;
  return report;
}

GradientReport finite_diff_grad(const Network& net, const SpikeTrain& input, const LossSpec& loss,
                                double h) {
  SG_CHECK(h >= 1e-7 && h <= 1e-3, "finite_diff_grad: h must lie in [1e-7, 1e-3]");
  Index weight_count = 0;
  for (const DenseLayer& layer : net) {
    SG_CHECK(layer.surrogate.family == SurrogateFamily::SigmoidDerivative,
             "finite_diff_grad: needs the smooth forward (SigmoidDerivative surrogates)");
    SG_CHECK(layer.surrogate.scale == 1.0,
             "finite_diff_grad: surrogate scale must be 1 so f' matches the smooth forward");
    weight_count += layer.weights.size();
  }
  SG_CHECK(weight_count <= 200, "finite_diff_grad: capped at 200 weights");

  auto loss_at = [&](const Network& candidate) {
    NetworkTrace trace = forward_network(candidate, input, SpikeMode::Soft);
    return evaluate_network_loss(candidate, trace, loss).first;
  };

  Network work = net;
  GradientReport report;
  report.weight_grads.reserve(net.size());
  for (std::size_t l = 0; l < net.size(); ++l) {
    Matrix grad(net[l].weights.rows(), net[l].weights.cols());
    for (Index i = 0; i < grad.rows(); ++i) {
      for (Index j = 0; j < grad.cols(); ++j) {
        const double original = work[l].weights(i, j);
        work[l].weights(i, j) = original + h;
        const double loss_plus = loss_at(work);
        work[l].weights(i, j) = original - h;
        const double loss_minus = loss_at(work);
        work[l].weights(i, j) = original;
        grad(i, j) = (loss_plus - loss_minus) / (2.0 * h);
      }
    }
    report.weight_grads.push_back(std::move(grad));
  }
  report.finalize();
  return report;
}

}  // namespace spikegrad
