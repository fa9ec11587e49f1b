#include "fbd/special.hpp"

#include <cmath>

namespace fbd {

double rgamma(double x) {
    if (x <= 0.0 && x == std::nearbyint(x)) return 0.0;
    if (x > 171.0) return 0.0;
    if (x > 0.0 && x < 160.0) return 1.0 / std::tgamma(x);
    // Reflection keeps the sign for negative non-integers.
    if (x < 0.0) {
        const double s = std::sin(M_PI * x);
        return s * std::tgamma(1.0 - x) / M_PI;
    }
    return std::exp(-std::lgamma(x));
}

double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace fbd
