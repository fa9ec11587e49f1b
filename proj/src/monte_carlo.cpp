#include "fbd/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/SpecialFunctions>

#include "fbd/classical.hpp"
#include "fbd/rng.hpp"
#include "fbd/subordinator.hpp"

namespace fbd {

void McConfig::validate() const {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    if (worker_count < 1) throw std::invalid_argument("worker_count must be >= 1");
    if (kmax_report < 1) throw std::invalid_argument("kmax_report must be >= 1");
}

double McSummary::frequency(long k) const {
    if (k < 0 || k >= static_cast<long>(counts.size()))
        throw std::out_of_range("bin index outside histogram");
    return static_cast<double>(counts[k]) / static_cast<double>(n);
}

double McSummary::std_err(long k) const {
    const double f = frequency(k);
    return std::sqrt(f * (1.0 - f) / static_cast<double>(n));
}

std::vector<double> McSummary::std_errs() const {
    std::vector<double> out(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) out[k] = std_err(static_cast<long>(k));
    return out;
}

double McSummary::sample_mean() const { return static_cast<double>(sum_k) / static_cast<double>(n); }

double McSummary::sample_variance() const {
    if (n < 2) return 0.0;
    const double nd = static_cast<double>(n);
    const double m = sample_mean();
    return (static_cast<double>(sum_k2) - nd * m * m) / (nd - 1.0);
}

double McSummary::mean_std_err() const { return std::sqrt(sample_variance() / static_cast<double>(n)); }

namespace {

int iterated_depth(double nu) {
    for (int n = 1; n <= 30; ++n)
        if (nu == std::ldexp(1.0, -n)) return n;
    throw std::invalid_argument("iterated Brownian sampler requires nu = 2^{-n}");
}

}  // namespace

std::uint64_t draw_fractional(const ModelParams& params, double t, std::uint64_t seed,
                              std::uint64_t index, TimeSampler sampler) {
    if (t == 0.0) return 1;
    Philox rng(seed, index);
    double s = t;
    if (params.nu < 1.0) {
        s = sampler == TimeSampler::iterated_bm
                ? sample_iterated_bm(iterated_depth(params.nu), t, rng)
                : sample_inverse_stable({params.nu, t}, rng);
    }
    return gillespie_sample(params, s, rng);
}

McSummary simulate(const ModelParams& params, double t, const McConfig& config) {
    params.validate();
    config.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be finite and >= 0");
    if (config.sampler == TimeSampler::iterated_bm && params.nu < 1.0) iterated_depth(params.nu);

    const std::uint64_t n = config.n_samples;
    const std::size_t bins = static_cast<std::size_t>(config.kmax_report) + 1;
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(config.worker_count, n));

    std::vector<McSummary> parts(workers);
    auto run = [&](unsigned w) {
        McSummary& part = parts[w];
        part.counts.assign(bins, 0);
        const std::uint64_t begin = n * w / workers;
        const std::uint64_t end = n * (w + 1) / workers;
        for (std::uint64_t i = begin; i < end; ++i) {
            const std::uint64_t k = draw_fractional(params, t, config.seed, i, config.sampler);
            if (k < bins)
                ++part.counts[k];
            else
                ++part.overflow;
            part.sum_k += k;
            part.sum_k2 += static_cast<unsigned __int128>(k) * k;
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }

    McSummary out;
    out.counts.assign(bins, 0);
    out.n = n;
    out.seed = config.seed;
    for (const McSummary& part : parts) {
        for (std::size_t k = 0; k < bins; ++k) out.counts[k] += part.counts[k];
        out.overflow += part.overflow;
        out.sum_k += part.sum_k;
        out.sum_k2 += part.sum_k2;
    }
    return out;
}

ChiSquare chi_square_test(const McSummary& summary, const TruncatedPmf& pmf, double min_expected) {
    const double n = static_cast<double>(summary.n);
    const long limit = std::min<long>(pmf.kmax(), static_cast<long>(summary.counts.size()) - 1);
    ChiSquare out;
    double used_p = 0.0;
    double used_obs = 0.0;
    int bins = 0;
    for (long k = 0; k <= limit; ++k) {
        const double expected = n * pmf.probs[k];
        if (expected < min_expected) continue;
        const double obs = static_cast<double>(summary.counts[k]);
        out.statistic += (obs - expected) * (obs - expected) / expected;
        used_p += pmf.probs[k];
        used_obs += obs;
        ++bins;
    }
    const double rest_expected = n * std::max(0.0, 1.0 - used_p);
    if (rest_expected >= min_expected) {
        const double obs = n - used_obs;
        out.statistic += (obs - rest_expected) * (obs - rest_expected) / rest_expected;
        ++bins;
    }
    out.dof = std::max(bins - 1, 1);
    Eigen::ArrayXd a = Eigen::ArrayXd::Constant(1, 0.5 * out.dof);
    Eigen::ArrayXd x = Eigen::ArrayXd::Constant(1, 0.5 * out.statistic);
    out.p_value = Eigen::igammac(a, x)(0);
    return out;
}

}  // namespace fbd
