/**
 * @file baselines.hpp
 * @brief Closed-form reference models: equicorrelation, the adjusted ex-post
 *        blend and its lower-bound workaround for negative risk premia.
 */

#pragma once

#include "impliedcorr/types.hpp"

namespace icorr {

struct EquicorrelationResult {
    double c_bar = 0.0;
    CorrMatrix C;
    /// -1/(n-1) <= c_bar <= 1, the range in which c_bar J + I is PSD.
    bool psd_range = false;
};

/// c_bar = (sigma_m^2 - w'sigma^2 w) / (w'sigma J sigma w) on the market constraint.
EquicorrelationResult equicorrelation(const MarketSpec& spec);

struct AdjustedExPostResult {
    double alpha_hat = 0.0;
    CorrMatrix C_Q;
    bool used_lower_bound = false;  ///< blend target was L instead of the all-ones matrix
    int crp_sign = 0;
    bool bounded = true;            ///< all entries of C_Q inside [-1, 1]
};

/**
 * Calibrates C_Q = alpha_hat B + (1 - alpha_hat) C_P to the market constraint.
 * B is the all-ones matrix when CRP = sigma_m^2 - w'sigma C_P sigma w >= 0 and
 * the equicorrelation lower bound L (off-diagonal -1/(n-1)) otherwise. The
 * constraint is affine in alpha_hat, so the solve is exact. Entries outside
 * [-1, 1] are flagged, never clipped.
 */
AdjustedExPostResult adjusted_ex_post(const CorrMatrix& c_p, const MarketSpec& spec);

/// alpha_hat in [0, 1): the blend of two PSD matrices is guaranteed PSD.
bool is_psd_weighted_average(double alpha_hat) noexcept;

/// Off-diagonal -1/(n-1), unit diagonal.
Matrix equicorrelation_lower_bound(Index n);

}  // namespace icorr
