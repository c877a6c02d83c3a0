#include "impliedcorr/types.hpp"

#include <cmath>
#include <sstream>

namespace icorr {

RowNormError::RowNormError(Index row, double squared_norm)
    : ValidationError("loadings row " + std::to_string(row) + " has squared norm " +
                      std::to_string(squared_norm) + " > 1"),
      row_(row),
      squared_norm_(squared_norm) {}

FactorLoadings::FactorLoadings(Matrix x) : x_(std::move(x)) {
    if (!x_.allFinite()) {
        throw ValidationError("factor loadings contain NaN or Inf");
    }
}

bool FactorLoadings::in_omega(double eps) const {
    return x_.size() == 0 || (x_.rowwise().squaredNorm().array() <= 1.0 + eps).all();
}

CorrMatrix::CorrMatrix(const Matrix& c) {
    if (c.rows() != c.cols()) {
        std::ostringstream os;
        os << "correlation matrix must be square, got " << c.rows() << "x" << c.cols();
        throw ValidationError(os.str());
    }
    if (!c.allFinite()) {
        throw ValidationError("correlation matrix contains NaN or Inf");
    }
    c_ = 0.5 * (c + c.transpose());
}

MarketSpec::MarketSpec(Vector sigma, std::vector<PortfolioConstraint> constraints)
    : sigma_(std::move(sigma)), constraints_(std::move(constraints)) {
    if (sigma_.size() == 0) {
        throw ValidationError("market spec needs at least one asset");
    }
    for (Index i = 0; i < sigma_.size(); ++i) {
        if (!std::isfinite(sigma_[i]) || sigma_[i] <= 0.0) {
            throw ValidationError("implied volatility of asset " + std::to_string(i) +
                                  " must be positive");
        }
    }
    for (const auto& c : constraints_) {
        if (c.weights.size() != sigma_.size()) {
            throw ValidationError("constraint '" + c.name + "' has " +
                                  std::to_string(c.weights.size()) + " weights for " +
                                  std::to_string(sigma_.size()) + " assets");
        }
        if (!c.weights.allFinite()) {
            throw ValidationError("constraint '" + c.name + "' has non-finite weights");
        }
        const double sum = c.weights.sum();
        if (std::abs(sum - 1.0) > kWeightSumTol) {
            std::ostringstream os;
            os.precision(17);
            os << "weights of constraint '" << c.name << "' sum to " << sum << ", expected 1";
            throw ValidationError(os.str());
        }
        if (!std::isfinite(c.variance) || c.variance <= 0.0) {
            throw ValidationError("target variance of constraint '" + c.name +
                                  "' must be positive");
        }
    }
}

const PortfolioConstraint& MarketSpec::constraint(std::size_t j) const {
    if (j >= constraints_.size()) {
        throw std::out_of_range("constraint index " + std::to_string(j) + " out of range (" +
                                std::to_string(constraints_.size()) + " constraints)");
    }
    return constraints_[j];
}

Vector MarketSpec::scaled_weights(std::size_t j) const {
    return sigma_.cwiseProduct(constraint(j).weights);
}

Matrix MarketSpec::scaled_weight_matrix() const {
    Matrix v(n(), static_cast<Index>(constraints_.size()));
    for (std::size_t j = 0; j < constraints_.size(); ++j) {
        v.col(static_cast<Index>(j)) = sigma_.cwiseProduct(constraints_[j].weights);
    }
    return v;
}

Vector MarketSpec::target_variances() const {
    Vector t(static_cast<Index>(constraints_.size()));
    for (std::size_t j = 0; j < constraints_.size(); ++j) {
        t[static_cast<Index>(j)] = constraints_[j].variance;
    }
    return t;
}

}  // namespace icorr
