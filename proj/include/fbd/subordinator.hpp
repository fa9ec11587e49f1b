#pragma once

#include <functional>

#include "fbd/rng.hpp"

namespace fbd {

/// Random time T_{2nu}(t) for order nu in (0, 1] and t > 0.
struct SubordinatorSpec {
    double nu = 0.5;
    double t = 1.0;

    void validate() const;
};

/// Folded heat kernel 2 (4 pi t)^{-1/2} exp(-s^2 / (4t)), the law of T_1(t).
double density_half(double s, double t);

/// Law of T_{1/2}(t) as the composition of two folded heat kernels,
/// int_0^inf density_half(s, w) density_half(w, t) dw, by adaptive quadrature.
double density_quarter(double s, double t, double tol = 1e-10);

/// Standard one-sided nu-stable variate with Laplace transform exp(-z^nu),
/// via the Kanter form of the Chambers-Mallows-Stuck transform.
double sample_positive_stable(double nu, Philox& rng);

/// One draw of T_{2nu}(t) = t^nu S^{-nu}; returns t exactly when nu = 1.
double sample_inverse_stable(const SubordinatorSpec& spec, Philox& rng);

/// |B_1(|B_2(... |B_n(t)| ...)|)| with each layer a folded Gaussian of
/// variance 2 x (its time argument). Distributed as T_{2nu}(t) with nu = 2^{-n}.
double sample_iterated_bm(int n, double t, Philox& rng);

/// Standard normal variate by the Box-Muller transform.
double standard_normal(Philox& rng);

/// E[phi(T_{2nu}(t))] for any nu in (0, 1), by nested adaptive quadrature of
/// the Kanter representation T = t^nu B(U) X^{1-nu}, U ~ U(0, pi), X ~ Exp(1),
/// B(u) = sin(u) / (sin(nu u)^nu sin((1-nu) u)^{1-nu}). phi must be bounded.
/// Returns the value and stores the accumulated error estimate in `*error`.
double subordinated_expectation(const std::function<double(double)>& phi, double nu, double t,
                                double tol, double* error = nullptr);

}  // namespace fbd
