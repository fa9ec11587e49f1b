#pragma once

#include <cstdint>

namespace fbd {

/// 1/Gamma(x), zero at the poles x = 0, -1, -2, ...
double rgamma(double x);

/// log |C(n, k)| for real n >= k >= 0.
double log_binomial(double n, double k);

}  // namespace fbd
