#include "fbd/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fbd/classical.hpp"
#include "fbd/quadrature.hpp"

namespace fbd {

void OracleConfig::validate() const {
    if (kmax < 2) throw std::invalid_argument("kmax must be >= 2");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite and >= 0");
    if (t_end > 0.0 && dt > t_end) throw std::invalid_argument("dt must not exceed t_end");
    if (!(grading == 0.0 || grading >= 1.0)) throw std::invalid_argument("grading must be 0 (auto) or >= 1");
}

TruncatedPmf CaputoSolution::at(Eigen::Index n) const {
    TruncatedPmf out;
    out.probs = raw.col(n).cwiseMax(0.0).cwiseMin(1.0);
    out.errors = (raw.col(n) - out.probs).cwiseAbs();
    out.tail_bound = std::max(0.0, leakage[n]);
    out.series_tol = 0.0;
    return out;
}

namespace {

constexpr double kStabilityEps = 1e-4;

// LU factors of a constant tridiagonal matrix, reused for every step.
struct Tridiagonal {
    Eigen::VectorXd sub, diag, sup;  // sub[i] couples row i to i-1
    Eigen::VectorXd c_prime, denom;

    void factor() {
        const Eigen::Index n = diag.size();
        c_prime.resize(n);
        denom.resize(n);
        denom[0] = diag[0];
        c_prime[0] = sup[0] / denom[0];
        for (Eigen::Index i = 1; i < n; ++i) {
            denom[i] = diag[i] - sub[i] * c_prime[i - 1];
            c_prime[i] = i + 1 < n ? sup[i] / denom[i] : 0.0;
        }
    }

    void solve(Eigen::Ref<Eigen::VectorXd> x) const {
        const Eigen::Index n = diag.size();
        x[0] /= denom[0];
        for (Eigen::Index i = 1; i < n; ++i) x[i] = (x[i] - sub[i] * x[i - 1]) / denom[i];
        for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= c_prime[i] * x[i + 1];
    }
};

}  // namespace

namespace {

// a^p - b^p for a > b > 0 without cancellation when a - b is small.
double pow_diff(double a, double b, double p) {
    if (b <= 0.0) return std::pow(a, p);
    return std::pow(b, p) * std::expm1(p * std::log1p((a - b) / b));
}

}  // namespace

CaputoSolution solve_caputo_system(const ModelParams& params, const OracleConfig& config) {
    params.validate();
    config.validate();
    const long kmax = config.kmax;
    const Eigen::Index size = kmax + 1;
    const long steps = config.t_end == 0.0 ? 0 : std::lround(std::ceil(config.t_end / config.dt - 1e-9));
    const double nu = params.nu;
    const double lam = params.lambda;
    const double mu = params.mu;
    const double r = config.grading == 0.0 ? (2.0 - nu) / nu : config.grading;

    CaputoSolution sol;
    sol.times.resize(steps + 1);
    for (long n = 0; n <= steps; ++n)
        sol.times[n] = steps == 0 ? 0.0 : config.t_end * std::pow(static_cast<double>(n) / steps, r);
    sol.raw = Eigen::MatrixXd::Zero(size, steps + 1);
    sol.leakage = Eigen::VectorXd::Zero(steps + 1);
    sol.raw(1, 0) = 1.0;
    if (steps == 0) return sol;

    // Dividing the L1 formula by the weight of the newest increment gives
    // (I - g_n A) p_n = p_{n-1} - sum_{j<n} c_{n,j} (p_j - p_{j-1}),
    // g_n = Gamma(2-nu) tau_n^nu,  c_{n,j} = tau_n^nu [(t_n - t_{j-1})^{1-nu} - (t_n - t_j)^{1-nu}] / tau_j.
    const double gamma2 = std::tgamma(2.0 - nu);
    const Eigen::VectorXd& t = sol.times;
    Eigen::MatrixXd increments(size, steps);
    Eigen::VectorXd coeff(steps);
    Eigen::VectorXd rhs(size);
    Tridiagonal m;
    m.sub = Eigen::VectorXd::Zero(size);
    m.diag = Eigen::VectorXd::Ones(size);
    m.sup = Eigen::VectorXd::Zero(size);
    double last_g = -1.0;
    for (long n = 1; n <= steps; ++n) {
        const double tau_n = t[n] - t[n - 1];
        const double g = gamma2 * std::pow(tau_n, nu);
        if (g != last_g) {
            for (long k = 0; k <= kmax; ++k) {
                const double kd = static_cast<double>(k);
                m.diag[k] = 1.0 + g * (lam + mu) * kd;
                if (k >= 1) m.sub[k] = -g * lam * (kd - 1.0);
                if (k < kmax) m.sup[k] = -g * mu * (kd + 1.0);
            }
            m.factor();
            last_g = g;
        }
        rhs = sol.raw.col(n - 1);
        if (n > 1 && nu < 1.0) {
            const double scale = std::pow(tau_n, nu);
            for (long j = 1; j < n; ++j) {
                const double tau_j = t[j] - t[j - 1];
                coeff[j - 1] = scale * pow_diff(t[n] - t[j - 1], t[n] - t[j], 1.0 - nu) / tau_j;
            }
            rhs.noalias() -= increments.leftCols(n - 1) * coeff.head(n - 1);
        }
        m.solve(rhs);
        const double lo = rhs.minCoeff();
        const double hi = rhs.maxCoeff();
        if (lo < -kStabilityEps || hi > 1.0 + kStabilityEps || !std::isfinite(lo) || !std::isfinite(hi))
            throw UnstableStep("probability left [-1e-4, 1+1e-4] at step " + std::to_string(n) +
                               " (t = " + format_double(t[n]) + "); reduce dt or raise kmax");
        sol.raw.col(n) = rhs;
        increments.col(n - 1) = rhs - sol.raw.col(n - 1);
        sol.leakage[n] = 1.0 - rhs.sum();
    }
    return sol;
}

namespace {

double classical_value(const ModelParams& p, double s, long k) {
    if (s <= 0.0) return k == 1 ? 1.0 : 0.0;
    return k == 0 ? classical_extinction(p, s) : classical_pmf(p, s, k);
}

}  // namespace

OracleValue subordination_quadrature(const ModelParams& params, double t, StateQuery state, double nu) {
    params.validate();
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (state.k < 0) throw std::invalid_argument("k must be >= 0");
    const long k = state.k;
    const double gauss = 2.0 / std::sqrt(std::numbers::pi);
    // Folded heat kernel in s = 2 sqrt(t) x becomes (2/sqrt(pi)) e^{-x^2} dx.
    auto half = [&](double time, double abs_tol, double* err) {
        const double c = 2.0 * std::sqrt(time);
        auto f = [&](double x) {
            const double w = std::exp(-x * x);
            return w > 0.0 ? w * classical_value(params, c * x, k) : 0.0;
        };
        const auto est = quad::integrate_to_infinity(f, 0.0, abs_tol / gauss);
        if (err) *err = gauss * est.error;
        return gauss * est.value;
    };
    OracleValue out;
    if (nu == 0.5) {
        out.value = half(t, 1e-9, &out.error);
        return out;
    }
    if (nu == 0.25) {
        const double c = 2.0 * std::sqrt(t);
        double inner_err = 0.0;
        auto outer = [&](double y) {
            const double w = std::exp(-y * y);
            if (!(w > 0.0)) return 0.0;
            if (y <= 0.0) return w * (k == 1 ? 1.0 : 0.0);
            double e = 0.0;
            const double v = half(c * y, 1e-9, &e);
            inner_err = std::max(inner_err, e);
            return w * v;
        };
        const auto est = quad::integrate_to_infinity(outer, 0.0, 1e-8 / gauss);
        out.value = gauss * est.value;
        out.error = gauss * est.error + inner_err;
        return out;
    }
    throw std::invalid_argument("subordination oracle supports nu = 0.25 and nu = 0.5 only");
}

}  // namespace fbd
