#pragma once

#include <stdexcept>
#include <string>

namespace fbd {

/// Shortest round-trip decimal form of a double, locale independent.
std::string format_double(double v);

/// Raised when a series, quadrature or iteration cannot reach the requested
/// tolerance within its budget.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature exhausted its subdivision budget.
class QuadratureFailure : public NonConvergence {
public:
    using NonConvergence::NonConvergence;
};

/// A time-stepping solver produced probabilities outside [-eps, 1+eps].
class UnstableStep : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Birth rate lambda, death rate mu, fractional order nu.
struct ModelParams {
    double lambda = 1.0;
    double mu = 0.0;
    double nu = 1.0;

    /// Throws std::invalid_argument naming the first violated bound.
    void validate() const;
};

enum class Regime { birth_dominant, death_dominant, balanced };

struct RegimeTag {
    Regime regime = Regime::balanced;
    double classification_tol = 1e-12;
};

inline constexpr double kClassificationTol = 1e-12;

RegimeTag classify(const ModelParams& params, double tol = kClassificationTol);

const char* to_string(Regime r);

}  // namespace fbd
