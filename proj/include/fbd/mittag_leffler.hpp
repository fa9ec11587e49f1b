#pragma once

#include <optional>

namespace fbd {

/// Evaluation tier that produced a Mittag-Leffler value.
enum class MLMethod { taylor, asymptotic, integral };

const char* to_string(MLMethod m);

inline constexpr int kMaxDerivOrder = 64;
inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kRelaxedTol = 1e-8;
/// Taylor series is attempted for |x| <= kTaylorSwitch.
inline constexpr double kTaylorSwitch = 10.0;

/// Request for d^j/dx^j E_{alpha,beta}(x).
///
/// `tol` is an absolute target for |value| <= 1 and a relative one above,
/// i.e. success means est_error <= tol * max(1, |value|).
struct MLQuery {
    double alpha = 1.0;
    double beta = 1.0;
    double x = 0.0;
    int deriv_order = 0;
    double tol = kDefaultTol;

    void validate() const;
};

struct MLResult {
    double value = 0.0;
    double est_error = 0.0;
    MLMethod method_used = MLMethod::taylor;
};

/// E_{alpha,beta}(x) = sum_m x^m / Gamma(alpha m + beta), alpha in (0,1], beta > 0.
///
/// Tiers, in order: Taylor series (|x| <= kTaylorSwitch, abandoned as soon as
/// the largest term makes cancellation exceed tol), the optimally truncated
/// asymptotic expansion for large negative x, and finally the real-line
/// integral representation valid for x < 0, alpha < 1, beta < 1 + alpha,
/// evaluated by adaptive Gauss-Kronrod. Throws NonConvergence when no tier
/// meets the tolerance. Pure and thread-safe.
MLResult ml(const MLQuery& query);

/// j-th derivative in x, 1 <= j <= kMaxDerivOrder. For j = 1 and beta = 1 the
/// identity d/dx E_{a,1}(x) = E_{a,a}(x) / a is used.
MLResult ml_deriv(const MLQuery& query);

/// Shorthand returning only the value of E_{alpha,beta}(x).
double mittag_leffler(double alpha, double beta, double x, double tol = kDefaultTol);

namespace detail {
// Individual tiers; each returns nullopt when it cannot certify tol.
std::optional<MLResult> ml_taylor(double alpha, double beta, double x, int j, double tol);
std::optional<MLResult> ml_asymptotic_negative(double alpha, double beta, double y, int j, double tol);
std::optional<MLResult> ml_integral_negative(double alpha, double beta, double x, int j, double tol);
}  // namespace detail

}  // namespace fbd
