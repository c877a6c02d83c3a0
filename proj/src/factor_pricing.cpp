#include "impliedcorr/factor_pricing.hpp"

#include "impliedcorr/corr_core.hpp"

#include <cmath>
#include <sstream>

namespace icorr {

namespace {

constexpr double kRankTol = 1e-10;
// Premia within this relative distance of zero are rounding noise.
constexpr double kCrpZeroTol = 1e-12;

const PortfolioConstraint& market_of(const MarketSpec& spec, const FactorLoadings& x, const char* who) {
    if (spec.num_constraints() != 1) {
        throw ValidationError(std::string(who) + " supports exactly one market constraint, got " +
                              std::to_string(spec.num_constraints()));
    }
    if (x.n() != spec.n()) {
        throw ValidationError(std::string(who) + ": loadings have " + std::to_string(x.n()) +
                              " rows but the market has " + std::to_string(spec.n()) + " assets");
    }
    return spec.constraint(0);
}

double aggregated_variance(const Matrix& x, const Vector& v) {
    return masked_cross_form(v, x, x) + v.squaredNorm();
}

}  // namespace

OrthogonalizedLoadings orthogonalize_loadings(const FactorLoadings& x_p) {
    const Matrix& x = x_p.matrix();
    if (x.cols() <= 1) return {x_p, {}};
    Matrix q(x.rows(), x.cols());
    for (Index d = 0; d < x.cols(); ++d) {
        Vector col = x.col(d);
        for (Index e = 0; e < d; ++e) {
            col -= (x.col(d).dot(q.col(e)) / q.col(e).squaredNorm()) * q.col(e);
        }
        const double scale = x.col(d).norm();
        if (scale == 0.0 || col.norm() <= kRankTol * scale) {
            throw ValidationError("orthogonalize_loadings: column " + std::to_string(d) +
                                  " is linearly dependent on the preceding columns");
        }
        q.col(d) = col;
    }
    OrthogonalizedLoadings out;
    for (Index i = 0; i < q.rows(); ++i) {
        const double sq = q.row(i).squaredNorm();
        if (sq > 1.0) {
            q.row(i) /= std::sqrt(sq);
            out.rescaled_rows.push_back(i);
        }
    }
    out.X = FactorLoadings(std::move(q));
    return out;
}

int crp_sign(const FactorLoadings& x_p, const MarketSpec& spec) {
    const auto& m = market_of(spec, x_p, "crp_sign");
    const double s_p = aggregated_variance(x_p.matrix(), spec.scaled_weights(0));
    const double crp = m.variance - s_p;
    if (std::abs(crp) <= kCrpZeroTol * std::max(m.variance, std::abs(s_p))) {
        return 0;
    }
    return crp > 0.0 ? 1 : -1;
}

AlphaSolution solve_alpha_tilde(const FactorLoadings& x_p, const MarketSpec& spec) {
    return solve_alpha_tilde(x_p, spec, crp_sign(x_p, spec));
}

AlphaSolution solve_alpha_tilde(const FactorLoadings& x_p, const MarketSpec& spec, int upsilon) {
    const auto& m = market_of(spec, x_p, "solve_alpha_tilde");
    if (upsilon < -1 || upsilon > 1) {
        throw ValidationError("solve_alpha_tilde: upsilon must be -1, 0 or +1");
    }
    const Vector v = spec.scaled_weights(0);
    const Matrix& xp = x_p.matrix();

    AlphaSolution s;
    s.upsilon = upsilon;
    s.sigma_P_sq = aggregated_variance(xp, v);
    if (upsilon == 0) {
        return s;
    }
    const Matrix x_delta = Matrix::Constant(xp.rows(), xp.cols(), static_cast<double>(upsilon)) - xp;
    s.sigma_Delta_sq = masked_cross_form(v, x_delta, x_delta);
    s.sigma_PDelta_sq = masked_cross_form(v, xp, x_delta);

    const double a = s.sigma_Delta_sq;
    const double b = s.sigma_PDelta_sq;
    const double c = s.sigma_P_sq - m.variance;
    if (a == 0.0) {
        if (b == 0.0) {
            throw ValidationError("solve_alpha_tilde: constraint unreachable from X_P "
                                  "(premium direction does not move the index variance)");
        }
        s.alpha_tilde = -c / (2.0 * b);
    } else {
        const double disc = b * b - a * c;
        if (disc < 0.0) {
            std::ostringstream os;
            os.precision(6);
            os << "solve_alpha_tilde: constraint unreachable from X_P (discriminant " << disc << ")";
            throw ValidationError(os.str());
        }
        const double root = upsilon * std::sqrt(disc);
        // (-b + root)/a cancels when b and root share a sign; use the product of the roots then.
        if ((b > 0.0) == (root > 0.0) && root != 0.0) {
            const double other = -b - root;
            s.alpha_tilde = other != 0.0 ? c / other : 0.0;
        } else {
            s.alpha_tilde = (-b + root) / a;
        }
    }
    s.out_of_range = !(s.alpha_tilde >= 0.0 && s.alpha_tilde <= 1.0);
    return s;
}

FactorLoadings risk_neutral_loadings(const FactorLoadings& x_p, double alpha_tilde, int upsilon) {
    const Matrix& xp = x_p.matrix();
    const Matrix bound = Matrix::Constant(xp.rows(), xp.cols(), static_cast<double>(upsilon));
    return FactorLoadings(xp + alpha_tilde * (bound - xp));
}

EconomicResult economic_implied_corr(const FactorLoadings& x_p, const MarketSpec& spec, bool orthogonalize) {
    market_of(spec, x_p, "economic_implied_corr");
    EconomicResult r;
    if (orthogonalize) {
        OrthogonalizedLoadings o = orthogonalize_loadings(x_p);
        for (Index row : o.rescaled_rows) {
            r.warnings.push_back("orthogonalized loadings row " + std::to_string(row) +
                                 " exceeded unit norm and was rescaled");
        }
        r.X_P = std::move(o.X);
    } else {
        r.X_P = x_p;
    }

    const AlphaSolution a = solve_alpha_tilde(r.X_P, spec);
    r.alpha_tilde = a.alpha_tilde;
    r.upsilon = a.upsilon;
    r.sigma_P_sq = a.sigma_P_sq;
    r.sigma_Delta_sq = a.sigma_Delta_sq;
    r.sigma_PDelta_sq = a.sigma_PDelta_sq;
    if (a.out_of_range) {
        r.warnings.push_back("alpha_tilde = " + std::to_string(a.alpha_tilde) + " lies outside [0, 1]");
    }

    r.X_Q = a.upsilon == 0 ? r.X_P : risk_neutral_loadings(r.X_P, a.alpha_tilde, a.upsilon);
    r.x_q_in_omega = r.X_Q.in_omega();
    if (!r.x_q_in_omega) {
        r.warnings.push_back("risk-neutral loadings leave the unit row-norm set; C may not be PSD");
    }
    r.C = assemble_correlation(r.X_Q);
    r.constraint_residual = constraint_residuals(r.X_Q, spec)[0];
    return r;
}

}  // namespace icorr
