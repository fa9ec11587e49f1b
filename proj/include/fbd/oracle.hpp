#pragma once

#include <Eigen/Core>

#include "fbd/fractional.hpp"
#include "fbd/types.hpp"

namespace fbd {

enum class CaputoScheme { L1 };

/// The grid has N = ceil(t_end / dt) steps at t_n = t_end (n / N)^r. With
/// grading r = 0 the exponent is chosen as (2 - nu) / nu, which restores the
/// 2 - nu convergence order against the t^nu behaviour at the origin; r = 1
/// gives the uniform grid.
struct OracleConfig {
    long kmax = 200;
    double dt = 1e-3;
    double t_end = 1.0;
    CaputoScheme scheme = CaputoScheme::L1;
    double grading = 0.0;

    void validate() const;
};

/// Time history of the truncated forward system D^nu p = A p on states 0..kmax.
struct CaputoSolution {
    Eigen::VectorXd times;
    /// Unclipped probabilities, one column per time level.
    Eigen::MatrixXd raw;
    /// 1 - sum_k p_k(t): mass that escaped through the top state.
    Eigen::VectorXd leakage;

    Eigen::Index steps() const { return times.size() - 1; }

    /// Column n clipped to [0, 1], with the leaked mass as tail bound.
    TruncatedPmf at(Eigen::Index n) const;
};

/// L1 discretisation of the Caputo derivative with full history, one
/// tridiagonal solve per step. The k = 0 row is D^nu p_0 = mu p_1.
/// Throws UnstableStep if any value leaves [-1e-4, 1 + 1e-4].
CaputoSolution solve_caputo_system(const ModelParams& params, const OracleConfig& config);

struct OracleValue {
    double value = 0.0;
    double error = 0.0;
};

/// Which probability the subordination oracle integrates: k = 0 is extinction.
struct StateQuery {
    long k = 0;
};

/// int_0^inf p_k^1(s) Pr{T_{2nu}(t) in ds} for nu in {1/4, 1/2}, using the
/// folded heat kernel (nu = 1/2) or its two-fold composition (nu = 1/4).
/// Throws QuadratureFailure when the adaptive budget runs out.
OracleValue subordination_quadrature(const ModelParams& params, double t, StateQuery state, double nu);

}  // namespace fbd
