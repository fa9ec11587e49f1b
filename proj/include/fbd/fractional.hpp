#pragma once

#include <Eigen/Core>

#include "fbd/mittag_leffler.hpp"
#include "fbd/types.hpp"

namespace fbd {

/// p_0 .. p_kmax of N_nu(t) together with truncation diagnostics.
struct TruncatedPmf {
    Eigen::VectorXd probs;
    /// Per-entry error estimates, same length as probs.
    Eigen::VectorXd errors;
    /// Estimate of sum_{k > kmax} p_k, rounded up by its own error estimate.
    double tail_bound = 0.0;
    double series_tol = kDefaultTol;

    Eigen::Index kmax() const { return probs.size() - 1; }
};

/// Extinction probability p_0^nu(t) = Pr{N_nu(t) = 0}, |error| <= tol.
double extinction(const ModelParams& params, double t, double tol = kDefaultTol);

/// State probability p_k^nu(t), k >= 1, |error| <= tol.
double pmf(const ModelParams& params, double t, long k, double tol = kDefaultTol);

/// Entries 0..kmax plus the exact subordinated tail mass beyond kmax.
TruncatedPmf pmf_vector(const ModelParams& params, double t, long kmax, double tol = kDefaultTol);

/// Pr{M_nu(t) = k + l | M_nu(0) = l + 1} for the fractional linear pure-birth
/// process with the given birth rate, as the alternating Mittag-Leffler sum.
double pure_birth_pmf(long l, long k, double rate, double nu, double t, double tol = kDefaultTol);

/// E N_nu(t) = E_{nu,1}((lambda - mu) t^nu); exactly 1 in the balanced regime.
double mean(const ModelParams& params, double t, double tol = kDefaultTol);

/// E[N(N-1)] at time t.
double second_factorial_moment(const ModelParams& params, double t, double tol = kDefaultTol);

double variance(const ModelParams& params, double t, double tol = kDefaultTol);

namespace detail {
// Individual evaluation routes, exposed for cross-validation.

/// Printed double sum over l and the alternating r-sum, truncated by the
/// geometric tail bound. Loses about 2^{k-1} ulps to cancellation.
double pmf_double_sum(const ModelParams& params, double t, long k, double tol);

/// Resolvent form for lambda != mu, nu < 1: all of p_1 .. p_kmax from one
/// vector quadrature of the Mittag-Leffler integral representation with the
/// r-sum collapsed into a product. Entry 0 of the result is unused.
Eigen::VectorXd pmf_resolvent(const ModelParams& params, double t, long kmax, double tol,
                              Eigen::VectorXd* errors = nullptr);

/// Balanced regime: p_k = (1/k) int_0^inf x e^{-x} L^{(1)}_{k-1}(x) E_nu(-lambda t^nu x) dx
/// by Gauss-Laguerre with node doubling (64 .. 1024), falling back to adaptive
/// Gauss-Kronrod. Entry 0 of the result is unused.
Eigen::VectorXd pmf_balanced_laguerre(const ModelParams& params, double t, long kmax, double tol,
                                      Eigen::VectorXd* errors = nullptr);

/// sum_{k > kmax} p_k^nu(t) as the subordinated classical tail.
double tail_mass(const ModelParams& params, double t, long kmax, double tol, double* error = nullptr);
}  // namespace detail

}  // namespace fbd
