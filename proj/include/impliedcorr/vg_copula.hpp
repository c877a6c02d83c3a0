/**
 * @file vg_copula.hpp
 * @brief Variance-gamma direct <-> centered parametrization, so the nearest
 *        implied correlation solver can estimate the direct correlation
 *        matrix of a multivariate VG model.
 *
 * Centered covariance: Sigma_cen = omega C_dir omega + nu theta theta'.
 */

#pragma once

#include "impliedcorr/types.hpp"

#include <optional>

namespace icorr {

struct VGParams {
    Vector xi;      ///< location
    Vector omega;   ///< scale, > 0
    Vector theta;   ///< shape
    double nu = 0;  ///< variance rate, > 0
    std::optional<CorrMatrix> C_dir;

    Index n() const noexcept { return omega.size(); }
    /// Throws ValidationError; C_dir is required only when require_corr is set.
    void validate(bool require_corr = true) const;
};

struct VGMoments {
    Vector mean;
    Matrix cov;
};

VGMoments vg_centered_moments(const VGParams& p);

struct CenteredCorrelation {
    Vector sigma;   ///< sqrt(omega_i^2 + nu theta_i^2)
    CorrMatrix C_cen;
};

CenteredCorrelation direct_to_centered_corr(const VGParams& p);

/**
 * Rewrites the market constraints for an unknown C_dir: volatilities become
 * omega and each target variance drops by nu (w'theta)^2. Throws when an
 * adjusted target is not positive.
 */
MarketSpec vg_market_constraint(const VGParams& p, const MarketSpec& spec);

/// w' Sigma_cen w for a given C_dir.
double vg_portfolio_variance(const VGParams& p, const CorrMatrix& c_dir, const Vector& weights);

}  // namespace icorr
