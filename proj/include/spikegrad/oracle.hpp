#pragma once

#include <span>
#include <vector>

#include "spikegrad/forward.hpp"
#include "spikegrad/grad_exodus.hpp"
#include "spikegrad/train.hpp"

namespace spikegrad {

/// Dense constraint Jacobians for one layer, flattened time-major
/// (flat index r = n * N + i). j_dep rows are [Phi_s; Phi_u], columns
/// [s; u]:
///     [ I            -diag(f') ]
///     [ nu_{-1}       I        ]
/// with (nu_{-1})[n][m] = -nu_{n-1-m} for m <= n-1. j_indep = [0; -I].
struct DenseJacobians {
  Matrix j_dep;    // 2NT x 2NT
  Matrix j_indep;  // 2NT x NT
  Index neurons = 0;
  Index steps = 0;
};

/// Assembles the dense Jacobians; rejects instances with N*T > 512.
DenseJacobians build_ift_jacobians(const LayerTrace& trace, const SrmKernels& kernels,
                                   const SurrogateSpec& spec);

/// det(j_dep) via LU; equals 1 for every valid instance (the dependent
/// Jacobian reduces to a unit triangular matrix).
double jacobian_determinant(const DenseJacobians& jac);

/// Solves j_dep * G = -j_indep for the dS/dZ block by forward substitution
/// of the eliminated unit-lower-triangular system (I - f' nu_{-1}) S = f'.
Matrix solve_ift_dense(const DenseJacobians& jac);

/// Dense NT x NT assembly of a SigmaBlock for comparison against
/// solve_ift_dense (same time-major flattening).
Matrix sigma_to_dense(const SigmaBlock& block);

/// gamma_m[n] in closed form:
///   gamma_m[m+1] = -theta f'[m],
///   gamma_m[n]   = -theta f'[m] prod_{k=m+1..n-1} (alpha - theta f'[k]).
/// Rejects n <= m.
double chi_closed_form(std::span<const double> fprime, const LifParams& params, Index m, Index n);

/// gamma_m[n] through the running chi state update
/// chi <- chi * (alpha - theta f'[k]) started from the identity at n = m+1.
double gamma_chi_iterative(std::span<const double> fprime, const LifParams& params, Index m,
                           Index n);

/// gamma_m[n] from its defining sum gamma_m[n] = -theta sum_{k=m..n-1}
/// alpha^{n-1-k} sigma_m[k] with sigma_m[k] = f'[k] gamma_m[k],
/// gamma_m[m] = 1. Independent of the product form.
double gamma_recursive(std::span<const double> fprime, const LifParams& params, Index m, Index n);

struct DecayBoundParams {
  double mu = 0.5;    // in (0, alpha]
  double alpha = 1.0;
  double theta = 1.0;
};

struct DecayBoundReport {
  /// max over (i, m, n) of chi_m[n] - mu^{n-m-1}; <= 0 when the bound holds.
  double max_upper_violation = 0.0;
  /// min over (i, m, n) of chi_m[n]; < 0 flags a sign violation.
  double min_chi = 0.0;
  /// max |chi_m[n]| across neurons and pairs at gap g = n-m-1.
  std::vector<double> max_abs_chi_by_gap;
};

/// Evaluates every chi diagonal of a trace against the decay envelope
/// mu^{n-m-1}. Holds whenever the surrogate output stays inside
/// [0, (alpha-mu)/theta] over the trace.
DecayBoundReport check_decay_bound(const LayerTrace& trace, const LifParams& params,
                                   const DecayBoundParams& bound, const SurrogateSpec& spec);

/// Central finite differences over every weight entry on the smooth (Soft)
/// forward. Requires SigmoidDerivative surrogates at scale 1 (the smooth
/// forward's exact derivative), at most 200 weights, and h in [1e-7, 1e-3].
GradientReport finite_diff_grad(const Network& net, const SpikeTrain& input, const LossSpec& loss,
                                double h = 1e-5);

}  // namespace spikegrad
