#pragma once

#include <cstdint>
#include <vector>

#include "fbd/fractional.hpp"
#include "fbd/types.hpp"

namespace fbd {

/// How the random time T_{2nu}(t) is drawn.
enum class TimeSampler {
    inverse_stable,  ///< t^nu S^{-nu} with S one-sided stable
    iterated_bm,     ///< nested folded Gaussians; requires nu = 2^{-n}
};

struct McConfig {
    std::uint64_t n_samples = 100000;
    std::uint64_t seed = 0;
    unsigned worker_count = 1;
    long kmax_report = 1024;
    TimeSampler sampler = TimeSampler::inverse_stable;

    void validate() const;
};

struct McSummary {
    /// counts[k] for k = 0..kmax_report; larger draws land in `overflow`.
    std::vector<std::uint64_t> counts;
    std::uint64_t overflow = 0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    /// Exact integer sums of k and k^2 over all draws, overflow included.
    unsigned __int128 sum_k = 0;
    unsigned __int128 sum_k2 = 0;

    double frequency(long k) const;
    /// Binomial standard error sqrt(f (1 - f) / n) of bin k.
    double std_err(long k) const;
    std::vector<double> std_errs() const;
    double sample_mean() const;
    /// Unbiased sample variance.
    double sample_variance() const;
    double mean_std_err() const;

    bool operator==(const McSummary&) const = default;
};

/// One draw of N_nu(t) from stream `index` of `seed`: the subordinated time
/// first, then the Gillespie path, both from the same counter-based stream.
std::uint64_t draw_fractional(const ModelParams& params, double t, std::uint64_t seed,
                              std::uint64_t index, TimeSampler sampler);

/// n_samples independent draws split over worker_count threads. Sample i
/// always uses stream i, and bins are merged by integer addition, so the
/// summary is bit-identical for every worker count.
McSummary simulate(const ModelParams& params, double t, const McConfig& config);

struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson goodness of fit of the histogram against `pmf`. Bins with expected
/// count below `min_expected` are pooled with the remaining mass into one bin.
ChiSquare chi_square_test(const McSummary& summary, const TruncatedPmf& pmf, double min_expected = 5.0);

}  // namespace fbd
