#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include "fbd/types.hpp"

namespace fbd::quad {

template <typename V>
struct Estimate {
    V value;
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
    return v.size() == 0 ? 0.0 : v.template lpNorm<Eigen::Infinity>();
}

// 7-point Gauss / 15-point Kronrod on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename V, typename F>
std::pair<V, double> kronrod15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const auto fc = f(c);
    V kron = fc * kWgk[7];
    V gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const auto f1 = f(c - dx);
        const auto f2 = f(c + dx);
        kron = kron + (f1 + f2) * kWgk[j];
        if (j % 2 == 1) gauss = gauss + (f1 + f2) * kWg[j / 2];
    }
    kron = kron * h;
    gauss = gauss * h;
    const V diff = kron - gauss;
    return {kron, magnitude(diff)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. The integrand may return
/// a scalar, a complex number or an Eigen vector; the error is the max-norm.
/// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|).
template <typename F>
auto integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
               int max_intervals = 4000) {
    using R = std::decay_t<decltype(f(a))>;
    using V = std::conditional_t<std::is_arithmetic_v<R>, double, R>;
    struct Interval {
        double a, b;
        V value;
        double error;
        bool operator<(const Interval& o) const { return error < o.error; }
    };
    std::priority_queue<Interval> heap;
    auto [v0, e0] = detail::kronrod15<V>(f, a, b);
    V total = v0;
    double total_err = e0;
    heap.push({a, b, std::move(v0), e0});
    int evals = 15;
    int intervals = 1;
    while (total_err > std::max(abs_tol, rel_tol * detail::magnitude(total))) {
        if (intervals >= max_intervals) {
            throw QuadratureFailure("adaptive quadrature budget exhausted");
        }
        Interval top = heap.top();
        heap.pop();
        const double mid = 0.5 * (top.a + top.b);
        auto [vl, el] = detail::kronrod15<V>(f, top.a, mid);
        auto [vr, er] = detail::kronrod15<V>(f, mid, top.b);
        evals += 30;
        ++intervals;
        total = total - top.value + vl + vr;
        total_err += el + er - top.error;
        heap.push({top.a, mid, std::move(vl), el});
        heap.push({mid, top.b, std::move(vr), er});
        if (!(mid > top.a && mid < top.b)) break;  // interval at machine resolution
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    V sum = heap.top().value;
    double err = 0.0;
    bool first = true;
    while (!heap.empty()) {
        if (!first) sum = sum + heap.top().value;
        err += heap.top().error;
        first = false;
        heap.pop();
    }
    return Estimate<V>{sum, err, evals};
}

/// Integral over [a, inf) via x = a + u/(1-u).
template <typename F>
auto integrate_to_infinity(F&& f, double a, double abs_tol, double rel_tol = 0.0,
                           int max_intervals = 4000) {
    auto mapped = [&](double u) {
        const double one_minus = 1.0 - u;
        const double x = a + u / one_minus;
        const double jac = 1.0 / (one_minus * one_minus);
        using R = std::decay_t<decltype(f(x))>;
        if (!std::isfinite(x)) return R(f(a) * 0.0);
        return R(f(x) * jac);
    };
    return integrate(mapped, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
}

/// Nodes and weights of a fixed rule.
struct Rule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// n-point generalized Gauss-Laguerre rule for weight x^alpha e^{-x}
/// (Golub-Welsch). Rules are cached per (n, alpha) and safe to share between
/// threads.
const Rule& gauss_laguerre(int n, double alpha);

/// n-point Gauss-Legendre rule on [-1, 1].
const Rule& gauss_legendre(int n);

}  // namespace fbd::quad
