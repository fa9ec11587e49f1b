#include "fbd/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fbd {

void ModelParams::validate() const {
    if (!(std::isfinite(lambda) && lambda > 0.0))
        throw std::invalid_argument("lambda must be > 0 (got " + format_double(lambda) + ")");
    if (!(std::isfinite(mu) && mu >= 0.0))
        throw std::invalid_argument("mu must be >= 0 (got " + format_double(mu) + ")");
    if (!(nu > 0.0 && nu <= 1.0))
        throw std::invalid_argument("nu must lie in (0, 1] (got " + format_double(nu) + ")");
}

RegimeTag classify(const ModelParams& params, double tol) {
    RegimeTag tag;
    tag.classification_tol = tol;
    const double d = params.lambda - params.mu;
    if (std::abs(d) <= tol * std::max(params.lambda, params.mu))
        tag.regime = Regime::balanced;
    else
        tag.regime = d > 0.0 ? Regime::birth_dominant : Regime::death_dominant;
    return tag;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::birth_dominant: return "birth_dominant";
        case Regime::death_dominant: return "death_dominant";
        case Regime::balanced: return "balanced";
    }
    return "unknown";
}

namespace {

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be finite and >= 0");
}

// expm1(a t) / a, with its second-order Taylor expansion for |a t| < 1e-6.
double expm1_over(double a, double t) {
    const double z = a * t;
    if (std::abs(z) < 1e-6) return t * (1.0 + z / 2.0 + z * z / 6.0);
    return std::expm1(z) / a;
}

// Geometric representation p_k = head * r^{k-1} for k >= 1, plus p_0.
struct Geometric {
    double p0;
    double head;
    double r;
    double tail_scale;  // head / (1 - r)
};

Geometric geometric_form(const ModelParams& p, double t) {
    const double a = p.lambda - p.mu;
    if (a >= 0.0) {
        // g = (1 - e^{-at})/a, e = e^{-at}
        const double g = expm1_over(-a, t);
        const double e = std::exp(-a * t);
        const double den = p.lambda * g + e;
        return {p.mu * g / den, e / (den * den), p.lambda * g / den, 1.0 / den};
    }
    // Rescaled by e^{at} to stay finite for large |a| t.
    const double h = expm1_over(a, t);
    const double den = p.lambda * h + 1.0;
    return {p.mu * h / den, std::exp(a * t) / (den * den), p.lambda * h / den, std::exp(a * t) / den};
}

}  // namespace

double classical_pmf(const ModelParams& params, double t, long k) {
    params.validate();
    check_time(t);
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (t == 0.0) return k == 1 ? 1.0 : 0.0;
    const Geometric g = geometric_form(params, t);
    return g.head * std::pow(g.r, static_cast<double>(k - 1));
}

double classical_extinction(const ModelParams& params, double t) {
    params.validate();
    check_time(t);
    if (t == 0.0) return 0.0;
    return geometric_form(params, t).p0;
}

double classical_tail(const ModelParams& params, double t, long kmax) {
    params.validate();
    check_time(t);
    if (kmax < 0) throw std::invalid_argument("kmax must be >= 0");
    if (t == 0.0) return kmax >= 1 ? 0.0 : 1.0;
    const Geometric g = geometric_form(params, t);
    return g.tail_scale * std::pow(g.r, static_cast<double>(kmax));
}

double classical_mean(const ModelParams& params, double t) {
    params.validate();
    check_time(t);
    return std::exp((params.lambda - params.mu) * t);
}

double classical_variance(const ModelParams& params, double t) {
    params.validate();
    check_time(t);
    const double a = params.lambda - params.mu;
    return (params.lambda + params.mu) * std::exp(a * t) * expm1_over(a, t);
}

std::uint64_t gillespie_sample(const ModelParams& params, double t, Philox& rng) {
    const double total = params.lambda + params.mu;
    const double p_birth = params.lambda / total;
    std::uint64_t k = 1;
    double s = 0.0;
    while (k > 0) {
        s += rng.exponential() / (static_cast<double>(k) * total);
        if (s > t) break;
        if (rng.uniform() < p_birth)
            ++k;
        else
            --k;
    }
    return k;
}

}  // namespace fbd
