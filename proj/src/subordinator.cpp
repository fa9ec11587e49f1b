#include "fbd/subordinator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fbd/quadrature.hpp"

namespace fbd {

void SubordinatorSpec::validate() const {
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in (0, 1]");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be finite and > 0");
}

double density_half(double s, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (s < 0.0) return 0.0;
    return std::exp(-s * s / (4.0 * t)) / std::sqrt(std::numbers::pi * t);
}

double density_quarter(double s, double t, double tol) {
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (s < 0.0) return 0.0;
    // w = 2 sqrt(t) y turns the outer kernel into (2/sqrt(pi)) e^{-y^2}.
    const double c = 2.0 * std::sqrt(t);
    // At s = 0 the inner kernel is (pi w)^{-1/2}, integrable in closed form.
    if (s == 0.0) return std::tgamma(0.25) / (std::numbers::pi * std::sqrt(c));
    auto f = [&](double y) { return y <= 0.0 ? 0.0 : std::exp(-y * y) * density_half(s, c * y); };
    const auto est = quad::integrate_to_infinity(f, 0.0, tol, tol);
    return 2.0 / std::sqrt(std::numbers::pi) * est.value;
}

double standard_normal(Philox& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_positive_stable(double nu, Philox& rng) {
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("stable index must lie in (0, 1)");
    const double u = std::numbers::pi * rng.uniform();
    const double e = rng.exponential();
    const double log_s = std::log(std::sin(nu * u)) - std::log(std::sin(u)) / nu +
                         (1.0 - nu) / nu * (std::log(std::sin((1.0 - nu) * u)) - std::log(e));
    return std::exp(log_s);
}

double sample_inverse_stable(const SubordinatorSpec& spec, Philox& rng) {
    spec.validate();
    if (spec.nu == 1.0) return spec.t;
    const double s = sample_positive_stable(spec.nu, rng);
    return std::exp(spec.nu * (std::log(spec.t) - std::log(s)));
}

double sample_iterated_bm(int n, double t, Philox& rng) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    double x = t;
    for (int i = 0; i < n; ++i) x = std::sqrt(2.0 * x) * std::abs(standard_normal(rng));
    return x;
}

double subordinated_expectation(const std::function<double(double)>& phi, double nu, double t,
                                double tol, double* error) {
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("nu must lie in (0, 1)");
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    const double scale = std::pow(t, nu);
    double inner_err = 0.0;
    auto outer = [&](double u) {
        if (u <= 0.0 || u >= std::numbers::pi) return 0.0;
        const double b = std::sin(u) / (std::pow(std::sin(nu * u), nu) *
                                         std::pow(std::sin((1.0 - nu) * u), 1.0 - nu));
        if (!(b > 0.0)) return 0.0;
        auto inner = [&](double x) {
            return x <= 0.0 ? 0.0 : std::exp(-x) * phi(scale * b * std::pow(x, 1.0 - nu));
        };
        const auto est = quad::integrate_to_infinity(inner, 0.0, 0.1 * tol);
        inner_err = std::max(inner_err, est.error);
        return est.value;
    };
    const auto est = quad::integrate(outer, 0.0, std::numbers::pi, 0.5 * tol * std::numbers::pi);
    if (error) *error = (est.error + std::numbers::pi * inner_err) / std::numbers::pi;
    return est.value / std::numbers::pi;
}

}  // namespace fbd
