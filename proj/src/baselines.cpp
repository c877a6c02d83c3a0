#include "impliedcorr/baselines.hpp"

#include "impliedcorr/corr_core.hpp"

#include <cmath>

namespace icorr {

namespace {

const PortfolioConstraint& market_of(const MarketSpec& spec, const char* who) {
    if (spec.num_constraints() == 0) {
        throw ValidationError(std::string(who) + ": market spec has no index constraint");
    }
    return spec.constraint(0);
}

}  // namespace

Matrix equicorrelation_lower_bound(Index n) {
    Matrix l = Matrix::Constant(n, n, n > 1 ? -1.0 / static_cast<double>(n - 1) : 0.0);
    l.diagonal().setOnes();
    return l;
}

EquicorrelationResult equicorrelation(const MarketSpec& spec) {
    const auto& m = market_of(spec, "equicorrelation");
    const Index n = spec.n();
    if (n < 2) {
        throw ValidationError("equicorrelation needs at least two assets");
    }
    const Vector v = spec.scaled_weights(0);
    const double own = v.squaredNorm();
    const double sum = v.sum();
    const double cross = v.dot((Vector::Constant(n, sum) - v));  // w' sigma J sigma w
    if (cross == 0.0) {
        throw ValidationError("equicorrelation: weights load on a single asset, c_bar undefined");
    }
    EquicorrelationResult r;
    r.c_bar = (m.variance - own) / cross;
    Matrix c = Matrix::Constant(n, n, r.c_bar);
    c.diagonal().setOnes();
    r.C = CorrMatrix(c);
    r.psd_range = r.c_bar >= -1.0 / static_cast<double>(n - 1) && r.c_bar <= 1.0;
    return r;
}

AdjustedExPostResult adjusted_ex_post(const CorrMatrix& c_p, const MarketSpec& spec) {
    const auto& m = market_of(spec, "adjusted_ex_post");
    const Index n = spec.n();
    if (c_p.n() != n) {
        throw ValidationError("adjusted_ex_post: prior matrix and market spec disagree on n");
    }
    const Vector v = spec.scaled_weights(0);
    const double s_p = v.dot(c_p.matrix() * v);
    const double crp = m.variance - s_p;

    AdjustedExPostResult r;
    r.crp_sign = crp > 0.0 ? 1 : (crp < 0.0 ? -1 : 0);
    if (crp == 0.0) {
        r.alpha_hat = 0.0;
        r.C_Q = c_p;
        r.bounded = (c_p.matrix().array().abs() <= 1.0).all();
        return r;
    }

    r.used_lower_bound = crp < 0.0;
    const Matrix b = r.used_lower_bound ? equicorrelation_lower_bound(n)
                                        : Matrix::Ones(n, n).eval();
    const double s_b = v.dot(b * v);
    if (s_b == s_p) {
        throw ValidationError("adjusted_ex_post: blend target aggregates to the prior variance, "
                              "alpha_hat undefined");
    }
    r.alpha_hat = crp / (s_b - s_p);
    Matrix q = r.alpha_hat * b + (1.0 - r.alpha_hat) * c_p.matrix();
    q.diagonal().setOnes();
    r.C_Q = CorrMatrix(q);
    r.bounded = (r.C_Q.matrix().array().abs() <= 1.0).all();
    return r;
}

bool is_psd_weighted_average(double alpha_hat) noexcept {
    return alpha_hat >= 0.0 && alpha_hat < 1.0;
}

}  // namespace icorr
