#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <tuple>
#include <utility>
#include <vector>

#include "fbd/classical.hpp"
#include "fbd/rng.hpp"

using namespace fbd;

namespace {

// Direct textbook forms, written independently of the library's stable rewrite.
double naive_extinction(double l, double m, double t) {
    if (l == m) return l * t / (1 + l * t);
    const double e = std::exp(-(l - m) * t);
    return (m - m * e) / (l - m * e);
}

double naive_pmf(double l, double m, double t, long k) {
    if (l == m) return std::pow(l * t, k - 1) / std::pow(1 + l * t, k + 1);
    const double e = std::exp(-(l - m) * t);
    return (l - m) * (l - m) * e * std::pow(l - l * e, k - 1) / std::pow(l - m * e, k + 1);
}

struct Histogram {
    std::vector<std::uint64_t> counts;
    double sum = 0.0;
    std::uint64_t n = 0;
};

Histogram run_gillespie(const ModelParams& p, double t, std::uint64_t n, std::uint64_t seed) {
    Histogram h;
    h.counts.assign(64, 0);
    h.n = n;
    for (std::uint64_t i = 0; i < n; ++i) {
        Philox rng(seed, i);
        const std::uint64_t k = gillespie_sample(p, t, rng);
        if (k < h.counts.size()) ++h.counts[k];
        h.sum += static_cast<double>(k);
    }
    return h;
}

}  // namespace

TEST_CASE("classification") {
    CHECK(classify({2, 1, 1}).regime == Regime::birth_dominant);
    CHECK(classify({1, 2, 1}).regime == Regime::death_dominant);
    CHECK(classify({1, 1, 1}).regime == Regime::balanced);
    CHECK(classify({1, 1 + 1e-15, 1}).regime == Regime::balanced);
    CHECK(classify({1, 1 + 1e-9, 1}).regime == Regime::death_dominant);
    CHECK(classify({1, 1, 1}).classification_tol == 1e-12);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ModelParams({0, 1, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams({1, -1, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams({1, 1, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams({1, 1, 1.5}).validate(), std::invalid_argument);
    CHECK_NOTHROW(ModelParams({1, 0, 1}).validate());
}

TEST_CASE("closed-form examples") {
    CHECK(classical_pmf({1, 1, 1}, 1.0, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(classical_pmf({1, 0.5, 1}, 0.0, 1) == 1.0);
    CHECK(classical_pmf({1, 0.5, 1}, 0.0, 2) == 0.0);
    CHECK(classical_extinction({1, 1, 1}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(classical_extinction({1, 0.5, 1}, 1e3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(classical_extinction({1, 0.5, 1}, 0.0) == 0.0);

    const double e = std::exp(-0.5);
    const double p0 = (0.5 - 0.5 * e) / (1 - 0.5 * e);
    const double p2 = 0.25 * e * (1 - e) / std::pow(1 - 0.5 * e, 3);
    CHECK(classical_extinction({1, 0.5, 1}, 1.0) == doctest::Approx(p0).epsilon(1e-14));
    CHECK(classical_pmf({1, 0.5, 1}, 1.0, 2) == doctest::Approx(p2).epsilon(1e-14));
    // six-digit reference values, accurate to about 1e-4
    CHECK(std::abs(p0 - 0.282375) < 1e-4);
    CHECK(std::abs(p2 - 0.176518) < 2e-4);
}

TEST_CASE("stable rewrite agrees with the naive forms") {
    for (auto [l, m] : {std::pair{2.0, 1.0}, {1.0, 2.0}, {1.0, 1.0}, {3.0, 0.0}, {0.5, 4.0}}) {
        for (double t : {0.01, 0.5, 1.0, 5.0}) {
            CAPTURE(l);
            CAPTURE(m);
            CAPTURE(t);
            CHECK(classical_extinction({l, m, 1}, t) == doctest::Approx(naive_extinction(l, m, t)).epsilon(1e-12));
            for (long k = 1; k <= 12; ++k)
                CHECK(classical_pmf({l, m, 1}, t, k) == doctest::Approx(naive_pmf(l, m, t, k)).epsilon(1e-11));
        }
    }
}

TEST_CASE("near-balanced rates are continuous with the balanced branch") {
    for (double d : {1e-8, 1e-10, -1e-9}) {
        const ModelParams p{1.0, 1.0 + d, 1};
        CHECK(classical_extinction(p, 1.0) == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(classical_pmf(p, 1.0, 3) == doctest::Approx(naive_pmf(1, 1, 1, 3)).epsilon(1e-7));
    }
}

TEST_CASE("normalization with the geometric tail") {
    const ModelParams p{1, 0.5, 1};
    double s = classical_extinction(p, 1.0);
    for (long k = 1; k <= 200; ++k) s += classical_pmf(p, 1.0, k);
    CHECK(1.0 - s < 1e-12);
    CHECK(std::abs(s + classical_tail(p, 1.0, 200) - 1.0) < 1e-12);
    for (auto q : {ModelParams{2, 1, 1}, ModelParams{1, 2, 1}, ModelParams{1, 1, 1}}) {
        double sum = classical_extinction(q, 2.0);
        for (long k = 1; k <= 20; ++k) sum += classical_pmf(q, 2.0, k);
        CHECK(std::abs(sum + classical_tail(q, 2.0, 20) - 1.0) < 1e-13);
    }
}

TEST_CASE("Riccati equation for the balanced extinction probability") {
    const double l = 1.3, h = 1e-5;
    for (double t : {0.2, 1.0, 3.0}) {
        const ModelParams p{l, l, 1};
        const double p0 = classical_extinction(p, t);
        const double d = (classical_extinction(p, t + h) - classical_extinction(p, t - h)) / (2 * h);
        CHECK(std::abs(d + 2 * l * p0 - l - l * p0 * p0) < 1e-6);
    }
}

TEST_CASE("moments") {
    CHECK(classical_mean({1, 1, 1}, 3.0) == 1.0);
    CHECK(classical_variance({1, 1, 1}, 3.0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(classical_mean({1, 0.5, 1}, 0.0) == 1.0);
    CHECK(classical_variance({1, 0.5, 1}, 0.0) == 0.0);
    const double e = std::exp(1.0);
    CHECK(classical_mean({2, 1, 1}, 1.0) == doctest::Approx(e).epsilon(1e-15));
    CHECK(classical_variance({2, 1, 1}, 1.0) == doctest::Approx(3 * e * (e - 1)).epsilon(1e-14));
    // the six-digit value 14.01214 for 3e(e - 1) is off in the fifth digit
    CHECK(std::abs(3 * e * (e - 1) - 14.01214) < 2e-4);
}

TEST_CASE("moments match pmf-weighted sums") {
    for (auto [l, m, t] : {std::tuple{1.0, 1.0, 1.0}, {2.0, 1.0, 0.5}, {1.0, 2.0, 0.5}}) {
        const ModelParams p{l, m, 1};
        double m1 = 0, m2 = 0;
        for (long k = 1; k <= 400; ++k) {
            const double pk = classical_pmf(p, t, k);
            m1 += k * pk;
            m2 += double(k) * k * pk;
        }
        CHECK(std::abs(m1 - classical_mean(p, t)) < 1e-8);
        CHECK(std::abs(m2 - m1 * m1 - classical_variance(p, t)) < 1e-8);
    }
}

TEST_CASE("Gillespie at t = 0 returns the progenitor") {
    Philox rng(3, 0);
    for (int i = 0; i < 100; ++i) CHECK(gillespie_sample({2, 1, 1}, 0.0, rng) == 1);
}

TEST_CASE("Gillespie histogram matches the closed form per bin") {
    const std::uint64_t n = 1000000;
    for (auto [l, m, t] : {std::tuple{1.0, 1.0, 1.0}, {2.0, 1.0, 0.5}, {1.0, 2.0, 0.5}}) {
        const ModelParams p{l, m, 1};
        const Histogram h = run_gillespie(p, t, n, 20240611);
        for (long k = 0; k <= 10; ++k) {
            const double pk = k == 0 ? classical_extinction(p, t) : classical_pmf(p, t, k);
            const double sigma = std::sqrt(pk * (1 - pk) / double(n));
            const double f = double(h.counts[k]) / double(n);
            CAPTURE(l);
            CAPTURE(m);
            CAPTURE(k);
            CHECK(std::abs(f - pk) <= 3 * sigma + 1e-12);
        }
        if (l == 1.0 && m == 1.0) CHECK(std::abs(double(h.counts[0]) / double(n) - 0.5) <= 0.002);
    }
}

TEST_CASE("pure birth mean") {
    const ModelParams p{1, 0, 1};
    const std::uint64_t n = 100000;
    double s = 0, s2 = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        Philox rng(99, i);
        const double k = double(gillespie_sample(p, 1.0, rng));
        s += k;
        s2 += k * k;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - std::exp(1.0)) <= 3 * se);
}
