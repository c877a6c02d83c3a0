/**
 * @file factor_pricing.hpp
 * @brief Economic approach: tilt physically expected asset-to-factor
 *        correlations X_P toward +1 (positive correlation risk premium) or
 *        -1 (negative premium) by a scalar weight so that the market
 *        constraint holds.
 *
 *   X_Q = X_P + alpha (u 1 - X_P),   u = sign(CRP)
 *
 * alpha solves sigma_P^2 + 2 alpha sigma_PD^2 + alpha^2 sigma_D^2 = sigma_m^2,
 * taking the upper root when u = +1 and the lower one when u = -1.
 */

#pragma once

#include "impliedcorr/types.hpp"

#include <string>
#include <vector>

namespace icorr {

struct OrthogonalizedLoadings {
    FactorLoadings X;
    std::vector<Index> rescaled_rows;  ///< rows pulled back onto the unit sphere
};

/// Classical Gram-Schmidt over columns in input order, without normalization.
OrthogonalizedLoadings orthogonalize_loadings(const FactorLoadings& x_p);

/// sign(sigma_m^2 - w'sigma C(X_P) sigma w); differences at rounding level count as zero.
int crp_sign(const FactorLoadings& x_p, const MarketSpec& spec);

struct AlphaSolution {
    double alpha_tilde = 0.0;
    int upsilon = 0;
    double sigma_P_sq = 0.0;
    double sigma_Delta_sq = 0.0;
    double sigma_PDelta_sq = 0.0;
    bool out_of_range = false;  ///< alpha outside [0, 1], returned unclamped
};

AlphaSolution solve_alpha_tilde(const FactorLoadings& x_p, const MarketSpec& spec);
/// Same with the premium sign supplied by the caller.
AlphaSolution solve_alpha_tilde(const FactorLoadings& x_p, const MarketSpec& spec, int upsilon);

FactorLoadings risk_neutral_loadings(const FactorLoadings& x_p, double alpha_tilde, int upsilon);

struct EconomicResult {
    double alpha_tilde = 0.0;
    int upsilon = 0;
    FactorLoadings X_P;   ///< loadings after orthogonalization
    FactorLoadings X_Q;
    CorrMatrix C;
    double sigma_P_sq = 0.0;
    double sigma_Delta_sq = 0.0;
    double sigma_PDelta_sq = 0.0;
    double constraint_residual = 0.0;
    bool x_q_in_omega = true;
    std::vector<std::string> warnings;
};

EconomicResult economic_implied_corr(const FactorLoadings& x_p, const MarketSpec& spec,
                                     bool orthogonalize = true);

}  // namespace icorr
