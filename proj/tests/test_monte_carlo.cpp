#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fbd/classical.hpp"
#include "fbd/fractional.hpp"
#include "fbd/monte_carlo.hpp"

using namespace fbd;

namespace {
McConfig config(std::uint64_t n, std::uint64_t seed, unsigned workers = 1) {
    McConfig c;
    c.n_samples = n;
    c.seed = seed;
    c.worker_count = workers;
    return c;
}
}  // namespace

TEST_CASE("t = 0 puts all mass in state 1") {
    const McSummary s = simulate({2, 1, 0.6}, 0.0, config(100, 3));
    CHECK(s.counts[1] == 100);
    CHECK(s.n == 100);
    CHECK(s.sample_mean() == 1.0);
}

TEST_CASE("bins, overflow and seed bookkeeping") {
    McConfig c = config(20000, 17);
    c.kmax_report = 3;
    const McSummary s = simulate({3, 1, 0.8}, 1.0, c);
    CHECK(s.counts.size() == 4);
    CHECK(std::accumulate(s.counts.begin(), s.counts.end(), std::uint64_t{0}) + s.overflow == s.n);
    CHECK(s.overflow > 0);
    CHECK(s.seed == 17);
    CHECK(s.std_errs().size() == 4);
    CHECK(s.std_err(0) == doctest::Approx(std::sqrt(s.frequency(0) * (1 - s.frequency(0)) / s.n)));
}

TEST_CASE("bit-identical across worker counts") {
    const McSummary a = simulate({1, 1, 0.5}, 1.0, config(50000, 7, 1));
    const McSummary b = simulate({1, 1, 0.5}, 1.0, config(50000, 7, 3));
    const McSummary c = simulate({1, 1, 0.5}, 1.0, config(50000, 7, 8));
    CHECK(a == b);
    CHECK(a == c);
    CHECK_FALSE(a == simulate({1, 1, 0.5}, 1.0, config(50000, 8, 1)));
}

TEST_CASE("classical balanced extinction at unit order") {
    const McSummary s = simulate({1, 1, 1.0}, 1.0, config(1000000, 2024, 4));
    CHECK(std::abs(s.frequency(0) - 0.5) <= 0.0015);
}

TEST_CASE("half-order extinction frequency within three sigma of the closed form") {
    const double p0 = extinction({1, 1, 0.5}, 1.0);
    const McSummary s = simulate({1, 1, 0.5}, 1.0, config(1000000, 99, 4));
    CHECK(std::abs(s.frequency(0) - p0) <= 3 * std::sqrt(p0 * (1 - p0) / s.n));
}

TEST_CASE("iterated Brownian time sampler gives the same law") {
    const ModelParams p{1, 2, 0.25};
    McConfig c = config(400000, 5);
    c.sampler = TimeSampler::iterated_bm;
    const McSummary s = simulate(p, 1.0, c);
    const TruncatedPmf v = pmf_vector(p, 1.0, 30);
    for (long k = 0; k <= 3; ++k) CHECK(std::abs(s.frequency(k) - v.probs[k]) <= 3 * std::sqrt(v.probs[k] * (1 - v.probs[k]) / s.n));
    c.sampler = TimeSampler::iterated_bm;
    CHECK_THROWS_AS(simulate({1, 2, 0.3}, 1.0, c), std::invalid_argument);
}

TEST_CASE("chi-square statistic on a hand-made histogram") {
    McSummary s;
    s.counts = {40, 35, 25};
    s.n = 100;
    TruncatedPmf p;
    p.probs = Eigen::Vector3d(0.4, 0.35, 0.25);
    const ChiSquare exact = chi_square_test(s, p);
    CHECK(exact.statistic == doctest::Approx(0.0));
    CHECK(exact.p_value == doctest::Approx(1.0));

    s.counts = {50, 30, 20};
    const ChiSquare off = chi_square_test(s, p);
    const double stat = 100.0 / 40 + 25.0 / 35 + 25.0 / 25;
    CHECK(off.statistic == doctest::Approx(stat));
    CHECK(off.dof == 2);
    // chi-square survival function with two degrees of freedom is exp(-x/2)
    CHECK(off.p_value == doctest::Approx(std::exp(-stat / 2)).epsilon(1e-12));
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config(0, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(10, 1, 0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(simulate({1, 1, 0.5}, -1.0, config(10, 1)), std::invalid_argument);
}
