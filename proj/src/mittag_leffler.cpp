#include "fbd/mittag_leffler.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "fbd/quadrature.hpp"
#include "fbd/special.hpp"
#include "fbd/types.hpp"

namespace fbd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kTaylorCap = 200000;

double scaled_tol(double tol, double value) { return tol * std::max(1.0, std::abs(value)); }

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Term m of the j-times differentiated series, m!/(m-j)! |x|^{m-j} / Gamma(alpha m + beta),
// with a bound on its relative rounding error. Direct evaluation is used while
// Gamma stays in range; the log-space fallback loses accuracy in proportion to
// the size of the logarithms involved.
struct SeriesTerm {
    double value;
    double rel_err;
};

SeriesTerm taylor_term(double alpha, double beta, double ax, double lx, int m, int j) {
    const int power = m - j;
    const double g = alpha * m + beta;
    if (g < 170.0 && power * lx < 700.0) {
        double falling = 1.0;
        for (int i = 0; i < j; ++i) falling *= m - i;
        return {falling * std::pow(ax, power) / std::tgamma(g), (8.0 + j) * kEps};
    }
    const double a1 = std::lgamma(m + 1.0), a2 = std::lgamma(power + 1.0), a3 = power * lx, a4 = std::lgamma(g);
    const double log_term = a1 - a2 + a3 - a4;
    const double rel = kEps * (4.0 + 2.0 * (std::abs(a1) + std::abs(a2) + std::abs(a3) + std::abs(a4)));
    return {log_term > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(log_term), rel};
}

std::optional<MLResult> taylor(double alpha, double beta, double x, int j, double tol) {
    if (x == 0.0) {
        const double v = std::tgamma(j + 1.0) * rgamma(alpha * j + beta);
        return MLResult{v, 4 * kEps * std::abs(v), MLMethod::taylor};
    }
    const double ax = std::abs(x);
    const double lx = std::log(ax);
    const bool negative = x < 0.0;
    CompensatedSum acc;
    double rounding = 0.0;
    double max_term = 0.0;
    double prev = 0.0;
    double lead = 0.0;
    int count = 0;
    for (int m = j; m < j + kTaylorCap; ++m, ++count) {
        const int power = m - j;
        const SeriesTerm st = taylor_term(alpha, beta, ax, lx, m, j);
        if (!std::isfinite(st.value)) return std::nullopt;
        double term = st.value;
        max_term = std::max(max_term, term);
        rounding += st.rel_err * term;
        if (count == 0) lead = term;
        const double noise = rounding + 2.0 * kEps * max_term * std::sqrt(count + 1.0);
        if (negative && noise > 0.5 * tol * std::max(1.0, lead)) return std::nullopt;
        if (negative && (power % 2 == 1)) term = -term;
        acc.add(term);
        const double mag = std::abs(term);
        if (count >= 2 && prev > 0.0) {
            const double ratio = mag / prev;
            const double target = 0.5 * scaled_tol(tol, acc.value());
            if (ratio < 1.0 && mag * ratio / (1.0 - ratio) < target && mag < target) {
                const double tail = mag * ratio / (1.0 - ratio);
                const double v = acc.value();
                const double err = tail + noise + kEps * std::abs(v);
                if (err > scaled_tol(tol, v)) return std::nullopt;
                return MLResult{v, err, MLMethod::taylor};
            }
        }
        prev = mag;
    }
    return std::nullopt;
}

// For x = -y < 0:
//   d^j E(x) ~ sum_{n>=1} (-1)^{n+1} (n)_j y^{-n-j} / Gamma(beta - alpha n)
// truncated where the term envelope stops decreasing.
std::optional<MLResult> asymptotic_negative(double alpha, double beta, double y, int j, double tol) {
    CompensatedSum acc;
    double prev_env = std::numeric_limits<double>::infinity();
    const double ly = std::log(y);
    for (int n = 1; n < 2000; ++n) {
        const double w = beta - alpha * n;
        const double log_rising = std::lgamma(n + static_cast<double>(j)) - std::lgamma(n);
        const double log_pow = log_rising - (n + j) * ly;
        const double rg = rgamma(w);
        double env_rg = std::abs(rg);
        if (1.0 - w > 0.0) env_rg = std::max(env_rg, std::exp(std::lgamma(1.0 - w)) / M_PI);
        const double env = std::exp(log_pow) * env_rg;
        if (env > prev_env) {
            double err = prev_env;
            if (alpha == 1.0) err += std::exp(-y) * std::pow(1.0 + y, j + std::abs(1.0 - beta) + 1.0);
            const double v = acc.value();
            if (err > scaled_tol(tol, v)) return std::nullopt;
            return MLResult{v, err, MLMethod::asymptotic};
        }
        const double term = ((n % 2 == 1) ? 1.0 : -1.0) * std::exp(log_pow) * rg;
        acc.add(term);
        prev_env = env;
        if (env < 1e-3 * kEps * std::max(std::abs(acc.value()), 1e-300) && env < 1e-3 * tol) {
            double err = env;
            if (alpha == 1.0) err += std::exp(-y) * std::pow(1.0 + y, j + std::abs(1.0 - beta) + 1.0);
            const double v = acc.value();
            if (err > scaled_tol(tol, v)) return std::nullopt;
            return MLResult{v, err, MLMethod::asymptotic};
        }
    }
    return std::nullopt;
}

// Real-line representation for x < 0, 0 < alpha < 1, 0 < beta < 1 + alpha:
//   E_{a,b}(x) = 1/(a pi) int_0^inf r^{(1-b)/a} e^{-r^{1/a}}
//                (r sin(pi(1-b)) - x sin(pi(1-b+a))) / (r^2 - 2 r x cos(pi a) + x^2) dr.
// The rational factor is 2 Re[A / (x - r w)], w = e^{i pi a}, so every x-derivative
// is available in closed form. r = s^q with q = a/(1+a-b) removes the endpoint
// power.
std::optional<MLResult> integral_negative(double alpha, double beta, double x, int j, double tol) {
    if (!(x < 0.0) || !(alpha < 1.0) || !(beta < 1.0 + alpha)) return std::nullopt;
    using cd = std::complex<double>;
    const double p = alpha + 1.0 - beta;
    const double q = alpha / p;
    const cd w = std::polar(1.0, M_PI * alpha);
    const cd A = (std::sin(M_PI * (1.0 - beta)) - w * std::sin(M_PI * (1.0 - beta + alpha))) /
                 cd(0.0, 2.0 * std::sin(M_PI * alpha));
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const double coef = 2.0 * sign * std::tgamma(j + 1.0) / (p * M_PI);

    const double y = -x;
    const double dmin = alpha > 0.5 ? y * std::sin(M_PI * alpha) : y;
    const double log_peak = std::log(std::abs(coef) * std::abs(A) + 1e-300) - (j + 1) * std::log(dmin);
    const double cut = std::max(40.0, log_peak - std::log(tol) + 5.0);
    const double s_max = std::pow(cut, p);

    auto integrand = [&](double s) {
        const double decay = std::exp(-std::pow(s, 1.0 / p));
        if (decay == 0.0) return 0.0;
        const cd denom = std::pow(cd(x, 0.0) - std::pow(s, q) * w, j + 1);
        return coef * decay * (A / denom).real();
    };

    const double s_star = std::pow(y, 1.0 / q);
    double value = 0.0;
    double err = 0.0;
    try {
        if (s_star > 0.0 && s_star < s_max) {
            auto left = quad::integrate(integrand, 0.0, s_star, 0.25 * tol, 0.25 * tol);
            auto right = quad::integrate(integrand, s_star, s_max, 0.25 * tol, 0.25 * tol);
            value = left.value + right.value;
            err = left.error + right.error;
        } else {
            auto all = quad::integrate(integrand, 0.0, s_max, 0.5 * tol, 0.5 * tol);
            value = all.value;
            err = all.error;
        }
    } catch (const QuadratureFailure&) {
        return std::nullopt;
    }
    err += 64.0 * kEps * std::abs(value);
    if (err > scaled_tol(tol, value)) return std::nullopt;
    return MLResult{value, err, MLMethod::integral};
}

// Leading exponential term for large positive x (value only).
std::optional<MLResult> asymptotic_positive(double alpha, double beta, double x, double tol) {
    const double z = std::pow(x, 1.0 / alpha);
    if (z > 700.0) return std::nullopt;
    const double lead = std::pow(x, (1.0 - beta) / alpha) * std::exp(z) / alpha;
    CompensatedSum acc;
    acc.add(lead);
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 1; n < 200; ++n) {
        const double t = -std::pow(x, -n) * rgamma(beta - alpha * n);
        const double env = std::pow(x, -n) * std::exp(std::lgamma(1.0 - beta + alpha * n)) / M_PI;
        if (env > prev || env < kEps * std::abs(lead)) break;
        acc.add(t);
        prev = env;
    }
    const double v = acc.value();
    const double err = 8.0 * kEps * std::abs(v);
    if (err > scaled_tol(tol, v)) return std::nullopt;
    return MLResult{v, err, MLMethod::asymptotic};
}

constexpr double kTaylorNoiseMargin = 1e-2;

MLResult evaluate(const MLQuery& q) {
    const double a = q.alpha;
    const double b = q.beta;
    const double x = q.x;
    const int j = q.deriv_order;
    if (a == 1.0 && b == 1.0) {
        const double v = std::exp(x);
        if (!std::isfinite(v)) throw NonConvergence("Mittag-Leffler value overflows");
        return MLResult{v, 2.0 * kEps * std::abs(v), MLMethod::taylor};
    }
    if (x >= 0.0) {
        if (auto r = taylor(a, b, x, j, q.tol)) return *r;
    } else if (-x <= kTaylorSwitch) {
        // Taylor is accepted here only with rounding noise below 1% of tol;
        // otherwise the asymptotic and integral tiers are tried first.
        if (auto r = taylor(a, b, x, j, kTaylorNoiseMargin * q.tol)) return *r;
    }
    if (x < 0.0) {
        if (-x > 1.0) {
            if (auto r = asymptotic_negative(a, b, -x, j, q.tol)) return *r;
        }
        if (auto r = integral_negative(a, b, x, j, q.tol)) return *r;
        if (auto r = taylor(a, b, x, j, q.tol)) return *r;
    } else if (j == 0) {
        if (auto r = asymptotic_positive(a, b, x, q.tol)) return *r;
    }
    throw NonConvergence("Mittag-Leffler E_{" + format_double(a) + "," + format_double(b) +
                         "}(" + format_double(x) + ") derivative " + std::to_string(j) +
                         ": no tier reached tol " + format_double(q.tol));
}

}  // namespace

namespace detail {
std::optional<MLResult> ml_taylor(double alpha, double beta, double x, int j, double tol) {
    return taylor(alpha, beta, x, j, tol);
}
std::optional<MLResult> ml_asymptotic_negative(double alpha, double beta, double y, int j, double tol) {
    return asymptotic_negative(alpha, beta, y, j, tol);
}
std::optional<MLResult> ml_integral_negative(double alpha, double beta, double x, int j, double tol) {
    return integral_negative(alpha, beta, x, j, tol);
}
}  // namespace detail

const char* to_string(MLMethod m) {
    switch (m) {
        case MLMethod::taylor: return "taylor";
        case MLMethod::asymptotic: return "asymptotic";
        case MLMethod::integral: return "integral";
    }
    return "?";
}

void MLQuery::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (!std::isfinite(x)) throw std::invalid_argument("x must be finite");
    if (deriv_order < 0 || deriv_order > kMaxDerivOrder) {
        throw std::invalid_argument("derivative order must lie in [0, 64]");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
}

MLResult ml(const MLQuery& query) {
    query.validate();
    if (query.deriv_order != 0) throw std::invalid_argument("ml: use ml_deriv for derivatives");
    return evaluate(query);
}

MLResult ml_deriv(const MLQuery& query) {
    query.validate();
    if (query.deriv_order < 1) throw std::invalid_argument("ml_deriv: derivative order must be >= 1");
    if (query.deriv_order == 1 && query.beta == 1.0) {
        MLQuery inner{query.alpha, query.alpha, query.x, 0, query.tol * query.alpha};
        MLResult r = evaluate(inner);
        r.value /= query.alpha;
        r.est_error /= query.alpha;
        return r;
    }
    return evaluate(query);
}

double mittag_leffler(double alpha, double beta, double x, double tol) {
    return ml(MLQuery{alpha, beta, x, 0, tol}).value;
}

}  // namespace fbd
