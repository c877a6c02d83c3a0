#include "impliedcorr/vg_copula.hpp"

#include <cmath>

namespace icorr {

void VGParams::validate(bool require_corr) const {
    const Index n = omega.size();
    if (n == 0) throw ValidationError("VG parameters: omega is empty");
    if (xi.size() != n || theta.size() != n) {
        throw ValidationError("VG parameters: xi, omega and theta must have the same length");
    }
    if (!xi.allFinite() || !theta.allFinite() || !omega.allFinite()) {
        throw ValidationError("VG parameters contain NaN or Inf");
    }
    if ((omega.array() <= 0.0).any()) throw ValidationError("VG parameters: omega must be positive");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ValidationError("VG parameters: nu must be positive");
    if (C_dir) {
        if (C_dir->n() != n) throw ValidationError("VG parameters: C_dir has the wrong dimension");
    } else if (require_corr) {
        throw ValidationError("VG parameters: C_dir is required");
    }
}

VGMoments vg_centered_moments(const VGParams& p) {
    p.validate();
    VGMoments m;
    m.mean = p.xi + p.theta;
    m.cov = p.omega.asDiagonal() * p.C_dir->matrix() * p.omega.asDiagonal();
    m.cov += p.nu * p.theta * p.theta.transpose();
    m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
    return m;
}

CenteredCorrelation direct_to_centered_corr(const VGParams& p) {
    const VGMoments m = vg_centered_moments(p);
    CenteredCorrelation out;
    out.sigma = (p.omega.cwiseAbs2() + p.nu * p.theta.cwiseAbs2()).cwiseSqrt();
    const Vector inv = out.sigma.cwiseInverse();
    Matrix c = inv.asDiagonal() * m.cov * inv.asDiagonal();
    c.diagonal().setOnes();
    out.C_cen = CorrMatrix(c);
    return out;
}

MarketSpec vg_market_constraint(const VGParams& p, const MarketSpec& spec) {
    p.validate(false);
    if (p.n() != spec.n()) {
        throw ValidationError("vg_market_constraint: VG parameters and market disagree on n");
    }
    std::vector<PortfolioConstraint> adjusted;
    for (const auto& c : spec.constraints()) {
        const double skew = c.weights.dot(p.theta);
        const double target = c.variance - p.nu * skew * skew;
        if (!(target > 0.0)) {
            throw ValidationError("VG skew term exceeds index variance for constraint '" + c.name + "'");
        }
        adjusted.push_back({c.name, c.weights, target});
    }
    return MarketSpec(p.omega, std::move(adjusted));
}

double vg_portfolio_variance(const VGParams& p, const CorrMatrix& c_dir, const Vector& weights) {
    const Vector ow = p.omega.cwiseProduct(weights);
    const double skew = weights.dot(p.theta);
    return ow.dot(c_dir.matrix() * ow) + p.nu * skew * skew;
}

}  // namespace icorr
