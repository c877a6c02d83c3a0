/**
 * @file corr_core.hpp
 * @brief Factor-structured correlation assembly C(X) = J o XX' + I, portfolio
 *        variance aggregation and the feasibility checker.
 */

#pragma once

#include "impliedcorr/types.hpp"

#include <optional>

namespace icorr {

struct FeasibilityReport {
    bool symmetric = false;
    double max_asymmetry = 0.0;
    bool unit_diagonal = false;
    bool bounded = false;
    double min_eigenvalue = 0.0;
    bool psd = false;
    Vector constraint_residuals;  ///< g_j, empty when no market is supplied
    bool economically_matched = false;

    bool mathematically_feasible() const noexcept {
        return symmetric && unit_diagonal && bounded && psd;
    }
};

/// Off-diagonal (XX')[i,j], diagonal exactly one.
CorrMatrix assemble_correlation(const FactorLoadings& x);

/// F[i,i]^2 = 1 - sum_d X[i,d]^2. Throws RowNormError for rows outside the unit ball.
Vector residual_variances(const FactorLoadings& x);

/// h(X) = 1 - (X o X) 1; non-negative iff X lies in the feasible set.
Vector inequality_slack(const FactorLoadings& x);

/// w_j' sigma C sigma w_j. Throws std::out_of_range for a bad index.
double portfolio_variance(const CorrMatrix& c, const MarketSpec& spec, std::size_t j);

/// g(X) = sigma_j^2 - diag(V' C(X) V) evaluated for all constraints at once.
Vector constraint_residuals(const FactorLoadings& x, const MarketSpec& spec);
Vector constraint_residuals(const CorrMatrix& c, const MarketSpec& spec);

/// v'(J o YZ')v for n x k matrices Y and Z, without forming an n x n product.
double masked_cross_form(const Vector& v, const Matrix& y, const Matrix& z);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& symmetric);

/**
 * Evaluates symmetry, unit diagonal, bounds, definiteness and (when a market
 * is given) the constraint residuals; economically_matched iff max |g_j| <= tol.
 * The raw-matrix overload checks symmetry before any symmetrization.
 */
FeasibilityReport check_feasibility(const CorrMatrix& c, const MarketSpec* spec, double tol);
FeasibilityReport check_feasibility(const Matrix& raw, const MarketSpec* spec, double tol);

}  // namespace icorr
