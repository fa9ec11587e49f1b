#include "fbd/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbd/classical.hpp"
#include "fbd/quadrature.hpp"
#include "fbd/special.hpp"
#include "fbd/subordinator.hpp"

namespace fbd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr long kMaxSeriesTerms = 2'000'000;

void check_inputs(const ModelParams& params, double t, double tol) {
    params.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be finite and >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
}

double ml_value(double nu, double x, double tol) {
    if (nu == 1.0) return std::exp(x);
    return ml({nu, 1.0, x, 0, tol}).value;
}

// Geometric structure shared by the unbalanced series: ratio rho < 1,
// Mittag-Leffler argument scale c = |lambda - mu| t^nu and the leading factor.
struct Unbalanced {
    bool birth;
    double rho;
    double c;
    double pref;  // ((max - min) / max)^2
};

Unbalanced unbalanced(const ModelParams& p, double t) {
    const bool birth = p.lambda > p.mu;
    const double hi = birth ? p.lambda : p.mu;
    const double lo = birth ? p.mu : p.lambda;
    const double frac = (hi - lo) / hi;
    return {birth, lo / hi, (hi - lo) * std::pow(t, p.nu), frac * frac};
}

double extinction_unbalanced(const ModelParams& params, double t, double tol) {
    const Unbalanced u = unbalanced(params, t);
    // lambda > mu: p0 = rho - (1 - rho) sum_m rho^m E(-c m)
    // lambda < mu: p0 = 1 - ((1 - rho) / rho) sum_m rho^m E(-c m)
    // Terms decrease in m, so the tail after m is at most E(-c m) rho^{m+1} / (1 - rho).
    const double w = u.birth ? 1.0 - u.rho : (1.0 - u.rho) / u.rho;
    const double ml_tol = 0.25 * tol;
    double sum = 0.0;
    double rho_m = 1.0;
    for (long m = 1;; ++m) {
        rho_m *= u.rho;
        if (rho_m == 0.0) break;
        const double e = ml_value(params.nu, -u.c * static_cast<double>(m), ml_tol);
        sum += rho_m * e;
        if (w * e * rho_m * u.rho / (1.0 - u.rho) < 0.5 * tol) break;
        if (m >= kMaxSeriesTerms)
            throw NonConvergence("extinction series did not reach tolerance (rho = " +
                                 format_double(u.rho) + ")");
    }
    const double p0 = u.birth ? u.rho - w * sum : 1.0 - w * sum;
    return std::clamp(p0, 0.0, 1.0);
}

// Gauss-Laguerre driver with node doubling. `poly(x, w, out)` writes the
// weight-scaled polynomial factors for every output component; `g` is the
// smooth factor shared by all components.
template <typename Poly, typename G>
Eigen::VectorXd laguerre_vector(double alpha, Eigen::Index size, Poly&& poly, G&& g, double tol,
                                Eigen::VectorXd* errors) {
    Eigen::VectorXd prev;
    Eigen::VectorXd acc(size);
    Eigen::VectorXd buf(size);
    for (int n = 64; n <= 1024; n *= 2) {
        const quad::Rule& rule = quad::gauss_laguerre(n, alpha);
        acc.setZero();
        for (int i = 0; i < n; ++i) {
            const double w = rule.weights[i];
            if (!(w > 0.0)) continue;
            poly(rule.nodes[i], w, buf);
            acc += buf * g(rule.nodes[i]);
        }
        if (prev.size() == size) {
            const Eigen::VectorXd diff = (acc - prev).cwiseAbs();
            if (diff.maxCoeff() < 0.25 * tol) {
                if (errors) *errors = diff;
                return acc;
            }
        }
        prev = acc;
    }
    auto integrand = [&](double x) {
        Eigen::VectorXd out(size);
        if (x <= 0.0 && alpha > 0.0) return Eigen::VectorXd(Eigen::VectorXd::Zero(size));
        const double w = std::pow(x, alpha) * std::exp(-x);
        if (!(w > 0.0)) return Eigen::VectorXd(Eigen::VectorXd::Zero(size));
        poly(x, w, out);
        return Eigen::VectorXd(out * g(x));
    };
    const auto est = quad::integrate_to_infinity(integrand, 0.0, 0.5 * tol, 0.0, 20000);
    if (errors) *errors = Eigen::VectorXd::Constant(size, est.error);
    return est.value;
}

double extinction_balanced(const ModelParams& params, double t, double tol) {
    const double a = params.lambda * std::pow(t, params.nu);
    auto one = [](double, double w, Eigen::VectorXd& out) { out[0] = w; };
    auto g = [&](double x) { return ml_value(params.nu, -a * x, 0.25 * tol); };
    const Eigen::VectorXd f = laguerre_vector(0.0, 1, one, g, 0.5 * tol, nullptr);
    return std::clamp(1.0 - f[0], 0.0, 1.0);
}

// Upper bound on the magnitude of the cancelling r-sum in the printed double sum.
double double_sum_amplification(const Unbalanced& u, long k) {
    const double km1 = static_cast<double>(k - 1);
    double amp = u.pref * std::pow(1.0 - u.rho, -(km1 + 2.0)) * std::pow(2.0, km1);
    if (!u.birth) amp *= std::pow(u.rho, km1);
    return amp;
}

bool double_sum_is_accurate(const Unbalanced& u, long k, double tol) {
    return 8.0 * kEps * double_sum_amplification(u, k) <= tol;
}

double pmf_single(const ModelParams& params, double t, long k, double tol) {
    if (classify(params).regime == Regime::balanced)
        return detail::pmf_balanced_laguerre(params, t, k, tol)[k];
    if (params.nu == 1.0) {
        if (double_sum_is_accurate(unbalanced(params, t), k, tol))
            return std::clamp(detail::pmf_double_sum(params, t, k, tol), 0.0, 1.0);
        return classical_pmf(params, t, k);
    }
    return std::clamp(detail::pmf_resolvent(params, t, k, tol)[k], 0.0, 1.0);
}

}  // namespace

double extinction(const ModelParams& params, double t, double tol) {
    check_inputs(params, t, tol);
    if (t == 0.0) return 0.0;
    if (classify(params).regime == Regime::balanced) return extinction_balanced(params, t, tol);
    return extinction_unbalanced(params, t, tol);
}

double pmf(const ModelParams& params, double t, long k, double tol) {
    check_inputs(params, t, tol);
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (t == 0.0) return k == 1 ? 1.0 : 0.0;
    return pmf_single(params, t, k, tol);
}

TruncatedPmf pmf_vector(const ModelParams& params, double t, long kmax, double tol) {
    check_inputs(params, t, tol);
    if (kmax < 1) throw std::invalid_argument("kmax must be >= 1");
    TruncatedPmf out;
    out.series_tol = tol;
    out.probs = Eigen::VectorXd::Zero(kmax + 1);
    out.errors = Eigen::VectorXd::Zero(kmax + 1);
    if (t == 0.0) {
        out.probs[1] = 1.0;
        return out;
    }
    out.probs[0] = extinction(params, t, tol);
    out.errors[0] = tol;
    if (classify(params).regime == Regime::balanced) {
        Eigen::VectorXd err;
        out.probs.tail(kmax) = detail::pmf_balanced_laguerre(params, t, kmax, tol, &err).tail(kmax);
        out.errors.tail(kmax) = err.tail(kmax);
    } else if (params.nu == 1.0) {
        const Unbalanced u = unbalanced(params, t);
        for (long k = 1; k <= kmax; ++k) {
            if (double_sum_is_accurate(u, k, tol)) {
                out.probs[k] = detail::pmf_double_sum(params, t, k, tol);
                out.errors[k] = tol;
            } else {
                out.probs[k] = classical_pmf(params, t, k);
                out.errors[k] = 4.0 * kEps * out.probs[k] * static_cast<double>(k);
            }
        }
    } else {
        Eigen::VectorXd err;
        out.probs.tail(kmax) = detail::pmf_resolvent(params, t, kmax, tol, &err).tail(kmax);
        out.errors.tail(kmax) = err.tail(kmax);
    }
    out.probs = out.probs.cwiseMax(0.0).cwiseMin(1.0);
    double tail_err = 0.0;
    const double tail = detail::tail_mass(params, t, kmax, tol, &tail_err);
    out.tail_bound = std::max(0.0, tail + tail_err);
    return out;
}

double pure_birth_pmf(long l, long k, double rate, double nu, double t, double tol) {
    if (l < 0) throw std::invalid_argument("l must be >= 0");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in (0, 1]");
    if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
    if (t == 0.0) return k == 1 ? 1.0 : 0.0;
    const double lead = std::exp(log_binomial(static_cast<double>(k + l - 1), static_cast<double>(k - 1)));
    const double amp = lead * std::pow(2.0, static_cast<double>(k - 1));
    const double ml_tol = std::max(0.25 * tol / amp, 1e-15);
    const double c = rate * std::pow(t, nu);
    double sum = 0.0;
    for (long r = 0; r < k; ++r) {
        const double b = std::exp(log_binomial(static_cast<double>(k - 1), static_cast<double>(r)));
        const double e = ml_value(nu, -static_cast<double>(r + 1 + l) * c, ml_tol);
        sum += (r % 2 == 0 ? b : -b) * e;
    }
    return lead * sum;
}

double mean(const ModelParams& params, double t, double tol) {
    check_inputs(params, t, tol);
    if (t == 0.0 || classify(params).regime == Regime::balanced) return 1.0;
    return ml_value(params.nu, (params.lambda - params.mu) * std::pow(t, params.nu), tol);
}

double second_factorial_moment(const ModelParams& params, double t, double tol) {
    check_inputs(params, t, tol);
    if (t == 0.0) return 0.0;
    const double nu = params.nu;
    const double tn = std::pow(t, nu);
    if (classify(params).regime == Regime::balanced) return 2.0 * params.lambda * tn * rgamma(nu + 1.0);
    const double d = params.lambda - params.mu;
    const double x = d * tn;
    if (std::abs(x) < 0.1) {
        // (E(2x) - E(x)) / d = t^nu sum_{m>=1} (2^m - 1) x^{m-1} / Gamma(nu m + 1)
        double sum = 0.0;
        double pow2 = 1.0;
        double xm = 1.0;
        for (int m = 1; m < 2000; ++m) {
            pow2 *= 2.0;
            const double term = (pow2 - 1.0) * xm * rgamma(nu * m + 1.0);
            sum += term;
            if (std::abs(term) < 0.1 * kEps * std::abs(sum)) break;
            xm *= x;
        }
        return 2.0 * params.lambda * tn * sum;
    }
    const double e2 = ml_value(nu, 2.0 * x, 0.25 * tol);
    const double e1 = ml_value(nu, x, 0.25 * tol);
    return 2.0 * params.lambda / d * (e2 - e1);
}

double variance(const ModelParams& params, double t, double tol) {
    check_inputs(params, t, tol);
    if (t == 0.0) return 0.0;
    if (classify(params).regime == Regime::balanced)
        return 2.0 * params.lambda * std::pow(t, params.nu) * rgamma(params.nu + 1.0);
    const double m = mean(params, t, tol);
    return second_factorial_moment(params, t, tol) + m - m * m;
}

namespace detail {

double pmf_double_sum(const ModelParams& params, double t, long k, double tol) {
    check_inputs(params, t, tol);
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (t == 0.0) return k == 1 ? 1.0 : 0.0;
    if (classify(params).regime == Regime::balanced)
        throw std::invalid_argument("double sum applies only to lambda != mu");
    const Unbalanced u = unbalanced(params, t);
    const double kd = static_cast<double>(k);
    const double pref = u.birth ? u.pref : u.pref * std::pow(u.rho, kd - 1.0);
    const double ml_tol = std::max(0.25 * tol / double_sum_amplification(u, k), 1e-15);
    std::vector<double> binom_r(k);
    for (long r = 0; r < k; ++r) binom_r[r] = std::exp(log_binomial(kd - 1.0, static_cast<double>(r)));
    double sum = 0.0;
    for (long l = 0;; ++l) {
        const double ld = static_cast<double>(l);
        double inner = 0.0;
        for (long r = 0; r < k; ++r) {
            const double e = ml_value(params.nu, -static_cast<double>(r + 1 + l) * u.c, ml_tol);
            inner += (r % 2 == 0 ? binom_r[r] : -binom_r[r]) * e;
        }
        sum += std::exp(log_binomial(ld + kd, ld) + ld * std::log(u.rho)) * inner;
        // Each C(l+k-1, k-1) * inner is a pure-birth probability, so term l is
        // at most ((l+k)/k) rho^l.
        const double rl1 = std::pow(u.rho, ld + 1.0);
        const double tail = rl1 / (1.0 - u.rho) * ((ld + 1.0 + kd) / kd + u.rho / ((1.0 - u.rho) * kd));
        if (pref * tail < 0.5 * tol || u.rho == 0.0) break;
        if (l >= kMaxSeriesTerms) throw NonConvergence("state-probability series did not converge");
    }
    return pref * sum;
}

Eigen::VectorXd pmf_resolvent(const ModelParams& params, double t, long kmax, double tol,
                              Eigen::VectorXd* errors) {
    check_inputs(params, t, tol);
    if (kmax < 1) throw std::invalid_argument("kmax must be >= 1");
    if (!(params.nu < 1.0)) throw std::invalid_argument("resolvent form requires nu < 1");
    if (classify(params).regime == Regime::balanced)
        throw std::invalid_argument("resolvent form applies only to lambda != mu");
    const Unbalanced u = unbalanced(params, t);
    const double nu = params.nu;
    const double theta = nu * std::numbers::pi;
    const std::complex<double> omega = std::polar(1.0, theta);
    const double sin_theta = std::sin(theta);
    const double k_d = static_cast<double>(kmax);

    // p_k = pref_k / (nu pi) * int_0^inf e^{-s^{1/nu}} Im[(omega / c) S_k(s omega / c) / k] ds
    // S_k(z) = sum_l rho^l prod_{i=1..k} (l + i) / (l + i + z)
    const double int_tol = 0.5 * tol * nu * std::numbers::pi / u.pref;
    const double pointwise_tol = 0.1 * int_tol * u.c * rgamma(nu + 1.0);
    const double log_skip = std::log(1e-3 * int_tol * u.c * (1.0 - u.rho)) +
                            (theta > 0.5 * std::numbers::pi ? k_d * std::log(sin_theta) : 0.0);

    auto integrand = [&](double s) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(kmax);
        if (s <= 0.0) s = 0.0;
        const double expo = std::pow(s, 1.0 / nu);
        if (-expo < log_skip) return out;
        const double weight = std::exp(-expo);
        const std::complex<double> z = s * omega / u.c;
        const double neg_re = std::max(0.0, -z.real());
        Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(kmax);
        double rho_l = 1.0;
        for (long l = 0;; ++l) {
            std::complex<double> q = 1.0;
            const double ld = static_cast<double>(l);
            for (long k = 1; k <= kmax; ++k) {
                const double n = ld + static_cast<double>(k);
                q *= n / (n + z);
                sum[k - 1] += rho_l * q;
            }
            rho_l *= u.rho;
            const bool bounded = ld + 1.0 >= 2.0 * k_d * neg_re;
            if (rho_l == 0.0) break;
            if (bounded && std::numbers::e * rho_l / (1.0 - u.rho) < pointwise_tol) break;
            if (l >= kMaxSeriesTerms) throw NonConvergence("resolvent l-sum did not converge");
        }
        for (long k = 1; k <= kmax; ++k)
            out[k - 1] = weight * std::imag(omega * sum[k - 1]) / (u.c * static_cast<double>(k));
        return out;
    };
    const auto est = quad::integrate_to_infinity(integrand, 0.0, int_tol, 0.0, 20000);

    Eigen::VectorXd p = Eigen::VectorXd::Zero(kmax + 1);
    if (errors) *errors = Eigen::VectorXd::Zero(kmax + 1);
    const double scale = 1.0 / (nu * std::numbers::pi);
    for (long k = 1; k <= kmax; ++k) {
        const double pk = u.birth ? u.pref : u.pref * std::pow(u.rho, static_cast<double>(k - 1));
        p[k] = pk * scale * est.value[k - 1];
        if (errors) (*errors)[k] = pk * scale * est.error;
    }
    return p;
}

Eigen::VectorXd pmf_balanced_laguerre(const ModelParams& params, double t, long kmax, double tol,
                                      Eigen::VectorXd* errors) {
    check_inputs(params, t, tol);
    if (kmax < 1) throw std::invalid_argument("kmax must be >= 1");
    const double a = params.lambda * std::pow(t, params.nu);
    // Weight-scaled generalized Laguerre recurrence, alpha = 1:
    // (n+1) L_{n+1} = (2n + 2 - x) L_n - (n + 1) L_{n-1}
    auto poly = [kmax](double x, double w, Eigen::VectorXd& out) {
        double prev = 0.0;
        double cur = w;
        for (long n = 0; n < kmax; ++n) {
            out[n] = cur / static_cast<double>(n + 1);
            const double nd = static_cast<double>(n);
            const double next = ((2.0 * nd + 2.0 - x) * cur - (nd + 1.0) * prev) / (nd + 1.0);
            prev = cur;
            cur = next;
        }
    };
    auto g = [&](double x) { return ml_value(params.nu, -a * x, 0.25 * tol); };
    Eigen::VectorXd err;
    const Eigen::VectorXd v = laguerre_vector(1.0, kmax, poly, g, tol, &err);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(kmax + 1);
    p.tail(kmax) = v;
    if (errors) {
        *errors = Eigen::VectorXd::Zero(kmax + 1);
        errors->tail(kmax) = err.array() + 0.25 * tol;
    }
    return p;
}

double tail_mass(const ModelParams& params, double t, long kmax, double tol, double* error) {
    check_inputs(params, t, tol);
    if (kmax < 0) throw std::invalid_argument("kmax must be >= 0");
    if (t == 0.0) {
        if (error) *error = 0.0;
        return kmax >= 1 ? 0.0 : 1.0;
    }
    if (params.nu == 1.0) {
        if (error) *error = kEps;
        return classical_tail(params, t, kmax);
    }
    auto phi = [&](double s) { return s <= 0.0 ? 0.0 : classical_tail(params, s, kmax); };
    return subordinated_expectation(phi, params.nu, t, tol, error);
}

}  // namespace detail

}  // namespace fbd
