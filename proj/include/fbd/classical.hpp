#pragma once

#include <cstdint>

#include "fbd/rng.hpp"
#include "fbd/types.hpp"

namespace fbd {

/// Classical (nu = 1) linear birth-death process started from one individual.
///
/// All closed forms are written in terms of g = (1 - e^{-(lambda-mu)t})/(lambda-mu),
/// which tends to t in the balanced limit, so no branch switch is needed as
/// lambda approaches mu. params.nu is ignored.
double classical_pmf(const ModelParams& params, double t, long k);

double classical_extinction(const ModelParams& params, double t);

/// sum_{k > kmax} p_k(t), from the geometric form of the state probabilities.
double classical_tail(const ModelParams& params, double t, long kmax);

double classical_mean(const ModelParams& params, double t);

double classical_variance(const ModelParams& params, double t);

/// One exact draw of N(t) by the Gillespie direct method. Consumes only `rng`.
std::uint64_t gillespie_sample(const ModelParams& params, double t, Philox& rng);

}  // namespace fbd
