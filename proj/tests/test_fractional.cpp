#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <tuple>
#include <utility>

#include "fbd/classical.hpp"
#include "fbd/fractional.hpp"
#include "fbd/mittag_leffler.hpp"
#include "fbd/quadrature.hpp"
#include "fbd/subordinator.hpp"

using namespace fbd;

namespace {

// p_k at nu = 1/2 straight from N(T(t)) with the folded heat kernel.
double half_order_by_quadrature(const ModelParams& p, double t, long k) {
    auto f = [&](double s) {
        const ModelParams q{p.lambda, p.mu, 1.0};
        const double v = k == 0 ? classical_extinction(q, s) : classical_pmf(q, s, k);
        return v * density_half(s, t);
    };
    return quad::integrate_to_infinity(f, 0.0, 1e-12).value;
}

// Balanced p_k through the lambda-derivative form
//   p_k = (-1)^{k-1} lambda^{k-1} / k! [lambda f^(k) + k f^(k-1)],
//   f(lambda) = int_0^inf e^{-w} E_nu(-lambda t^nu w) dw,
// with f^(j) from ml_deriv under Gauss-Laguerre quadrature.
double balanced_by_leibniz(double lambda, double nu, double t, long k) {
    const double c = std::pow(t, nu);
    const quad::Rule& rule = quad::gauss_laguerre(256, 0.0);
    auto fj = [&](int j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
            const double w = rule.nodes[i];
            const double arg = -lambda * c * w;
            const double d = j == 0 ? mittag_leffler(nu, 1.0, arg) : ml_deriv({nu, 1.0, arg, j, 1e-12}).value;
            s += rule.weights[i] * std::pow(-c * w, j) * d;
        }
        return s;
    };
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    return sign * std::pow(lambda, k - 1) / std::tgamma(k + 1.0) * (lambda * fj(int(k)) + k * fj(int(k) - 1));
}

}  // namespace

TEST_CASE("t = 0 starts from one progenitor") {
    for (auto p : {ModelParams{2, 1, 0.6}, ModelParams{1, 1, 0.5}, ModelParams{1, 3, 1}}) {
        CHECK(extinction(p, 0.0) == 0.0);
        CHECK(pmf(p, 0.0, 1) == 1.0);
        CHECK(pmf(p, 0.0, 2) == 0.0);
        const TruncatedPmf v = pmf_vector(p, 0.0, 5);
        CHECK(v.kmax() == 5);
        CHECK(v.probs[1] == 1.0);
        CHECK(v.probs.sum() == 1.0);
        CHECK(v.tail_bound == 0.0);
    }
}

TEST_CASE("unit order reproduces the classical process") {
    for (auto [l, m] : {std::pair{2.0, 1.0}, {1.0, 2.0}, {1.0, 1.0}}) {
        for (double t : {0.1, 1.0, 5.0}) {
            const ModelParams p{l, m, 1.0};
            CHECK(std::abs(extinction(p, t) - classical_extinction(p, t)) <= 1e-8);
            for (long k = 1; k <= 10; ++k) CHECK(std::abs(pmf(p, t, k) - classical_pmf(p, t, k)) <= 1e-8);
        }
    }
    CHECK(pmf({1, 1, 1}, 1.0, 1) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(extinction({1, 0.5, 1}, 1.0) == doctest::Approx(0.2823667008126).epsilon(1e-11));
}

TEST_CASE("half order against direct subordination quadrature") {
    for (auto [l, m] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}}) {
        const ModelParams p{l, m, 0.5};
        CAPTURE(l);
        CAPTURE(m);
        CHECK(std::abs(extinction(p, 1.0) - half_order_by_quadrature(p, 1.0, 0)) <= 1e-6);
        for (long k = 1; k <= 4; ++k)
            CHECK(std::abs(pmf(p, 1.0, k) - half_order_by_quadrature(p, 1.0, k)) <= 1e-7);
    }
}

TEST_CASE("balanced pmf agrees with the Leibniz derivative route") {
    for (double nu : {0.4, 0.7}) {
        for (long k = 1; k <= 4; ++k) {
            CAPTURE(nu);
            CAPTURE(k);
            CHECK(std::abs(pmf({1.2, 1.2, nu}, 0.8, k) - balanced_by_leibniz(1.2, nu, 0.8, k)) <= 1e-7);
        }
    }
}

TEST_CASE("balanced k = 1 is the lambda-derivative of lambda(1 - p0)") {
    const double nu = 0.6, t = 1.0, h = 1e-4;
    for (double l : {0.5, 1.0, 2.0}) {
        auto g = [&](double x) { return x * (1.0 - extinction({x, x, nu}, t, 1e-12)); };
        CHECK(std::abs(pmf({l, l, nu}, t, 1) - (g(l + h) - g(l - h)) / (2 * h)) <= 1e-5);
    }
}

TEST_CASE("resolvent route agrees with the printed double series") {
    for (auto [l, m, nu, t] : {std::tuple{2.0, 1.0, 0.5, 1.0}, {1.0, 2.0, 0.7, 1.0}, {3.0, 1.0, 0.8, 0.5}}) {
        const ModelParams p{l, m, nu};
        const Eigen::VectorXd r = detail::pmf_resolvent(p, t, 6, 1e-12);
        for (long k = 1; k <= 6; ++k) {
            CAPTURE(k);
            CHECK(std::abs(r[k] - detail::pmf_double_sum(p, t, k, 1e-10)) <= 1e-9);
        }
    }
}

TEST_CASE("geometric mixture of pure-birth laws") {
    const double l = 2.0, m = 1.0, nu = 0.6, t = 1.0;
    const double rho = m / l;
    for (long k = 1; k <= 3; ++k) {
        double s = 0.0;
        for (long j = 0; j < 200; ++j) {
            const double term = (double(j + k) / k) * std::pow(rho, j) * pure_birth_pmf(j, k, l - m, nu, t);
            s += term;
            if (j > 10 && std::abs(term) < 1e-15) break;
        }
        s *= std::pow((l - m) / l, 2);
        CHECK(std::abs(pmf({l, m, nu}, t, k) - s) <= 1e-6);
    }
}

TEST_CASE("pure-birth law examples") {
    CHECK(pure_birth_pmf(0, 1, 1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(pure_birth_pmf(0, 1, 1.0, 0.5, 1.0) == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-10));
    CHECK(pure_birth_pmf(0, 2, 1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0) * (1 - std::exp(-1.0))).epsilon(1e-12));
    // negative-binomial law of a Yule process from l + 1 ancestors
    const double e = std::exp(-2.0);
    CHECK(pure_birth_pmf(2, 3, 1.0, 1.0, 2.0) ==
          doctest::Approx(6.0 * std::pow(e, 3) * std::pow(1 - e, 2)).epsilon(1e-10));
}

TEST_CASE("normalization of truncated pmf vectors") {
    for (auto [l, m, nu, t, bound] : {std::tuple{1.0, 0.5, 1.0, 1.0, 1e-8}, {1.0, 2.0, 0.6, 2.0, 1e-6}}) {
        const TruncatedPmf v = pmf_vector({l, m, nu}, t, 200);
        CHECK(std::abs(v.probs.sum() + v.tail_bound - 1.0) <= bound);
        CHECK((v.probs.array() >= 0.0).all());
        CHECK((v.probs.array() <= 1.0).all());
        CHECK(v.errors.size() == v.probs.size());
    }
}

TEST_CASE("moment examples") {
    CHECK(mean({1, 1, 0.5}, 7.0) == 1.0);
    CHECK(mean({1, 0.5, 1.0}, 1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-13));
    // E_{1/2}(x) = e^{x^2} erfc(-x) at x = 1/2
    CHECK(mean({1, 0.5, 0.5}, 1.0) == doctest::Approx(std::exp(0.25) * std::erfc(-0.5)).epsilon(1e-11));
    CHECK(variance({1, 1, 1.0}, 3.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(variance({1, 1, 0.5}, 1.0) == doctest::Approx(4.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
    const double e = std::exp(1.0);
    CHECK(variance({2, 1, 1.0}, 1.0) == doctest::Approx(3 * e * (e - 1)).epsilon(1e-11));
}

TEST_CASE("second factorial moment closed form") {
    for (auto [l, m, nu] : {std::tuple{2.0, 1.0, 0.7}, {1.0, 3.0, 0.4}}) {
        const double a = (l - m) * std::pow(1.3, nu);
        const double ref = 2 * l / (l - m) * (mittag_leffler(nu, 1, 2 * a) - mittag_leffler(nu, 1, a));
        CHECK(second_factorial_moment({l, m, nu}, 1.3) == doctest::Approx(ref).epsilon(1e-10));
    }
    // continuity into the balanced branch, where mu_(2) = 2 lambda t^nu / Gamma(1 + nu)
    const double bal = 2.0 * std::pow(1.3, 0.7) / std::tgamma(1.7);
    CHECK(second_factorial_moment({1, 1 + 1e-9, 0.7}, 1.3) == doctest::Approx(bal).epsilon(1e-7));
}

TEST_CASE("mean matches the pmf-weighted sum") {
    for (auto p : {ModelParams{2, 1, 0.7}, ModelParams{1, 2, 0.6}, ModelParams{1, 1, 0.5}}) {
        long kmax = 200;
        auto bound = [&](long K) {
            double err = 0.0;
            return detail::tail_mass(p, 1.0, K, kDefaultTol, &err) + err;
        };
        while (bound(kmax) * kmax >= 1e-8) kmax += 200;
        const TruncatedPmf v = pmf_vector(p, 1.0, kmax);
        CHECK(v.tail_bound * kmax < 1e-8);
        double s = 0.0;
        for (long k = 1; k <= v.kmax(); ++k) s += k * v.probs[k];
        CHECK(std::abs(s - mean(p, 1.0)) <= 1e-6);
    }
}

TEST_CASE("extinction is nondecreasing with the right limits") {
    for (auto p : {ModelParams{2, 1, 0.7}, ModelParams{1, 2, 0.7}, ModelParams{1, 1, 0.7}}) {
        double prev = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double v = extinction(p, 0.1 * i);
            CHECK(v >= prev - 1e-10);
            prev = v;
        }
    }
    CHECK(std::abs(extinction({2, 1, 0.7}, 1e4) - 0.5) <= 1e-2);
    CHECK(extinction({1, 2, 0.7}, 1e4) > 0.99);
    CHECK(extinction({1, 1, 0.7}, 1e4) > 0.99);
}

TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(extinction({1, 1, 0.5}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(pmf({1, 1, 0.5}, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(pmf_vector({1, 1, 0.5}, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(extinction({1, 1, 0.5}, 1.0, 0.0), std::invalid_argument);
}
