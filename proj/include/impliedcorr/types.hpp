/**
 * @file types.hpp
 * @brief Domain types shared by every module: factor loadings, correlation
 *        matrices, market constraints and the error hierarchy.
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace icorr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Slack allowed on the row-norm condition sum_d X[i,d]^2 <= 1.
inline constexpr double kFeasibilityEps = 1e-12;
/// Eigenvalue floor for PSD verdicts.
inline constexpr double kPsdEps = 1e-8;
/// Tolerance on sum(w) == 1 for constraint weights.
inline constexpr double kWeightSumTol = 1e-12;

// ----------------------------------------------------------------------------
// Errors. The CLI maps them onto exit codes (validation 1, convergence 2, io 3).
// ----------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// A loadings row whose squared norm exceeds one.
class RowNormError : public ValidationError {
public:
    RowNormError(Index row, double squared_norm);
    Index row() const noexcept { return row_; }
    double squared_norm() const noexcept { return squared_norm_; }

private:
    Index row_;
    double squared_norm_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// ----------------------------------------------------------------------------

/**
 * n x k matrix of asset-to-factor correlations.
 *
 * Entries must be finite. Membership in the feasible set (every row with
 * squared norm <= 1) is not enforced on construction because optimizer
 * iterates and projection inputs legitimately leave it; query in_omega().
 */
class FactorLoadings {
public:
    FactorLoadings() = default;
    explicit FactorLoadings(Matrix x);

    static FactorLoadings zeros(Index n, Index k) { return FactorLoadings(Matrix::Zero(n, k)); }

    Index n() const noexcept { return x_.rows(); }
    Index k() const noexcept { return x_.cols(); }
    const Matrix& matrix() const noexcept { return x_; }
    double operator()(Index i, Index d) const { return x_(i, d); }

    /// Squared row norms sum_d X[i,d]^2.
    Vector row_squared_norms() const { return x_.rowwise().squaredNorm(); }
    bool in_omega(double eps = kFeasibilityEps) const;

private:
    Matrix x_;
};

/**
 * Dense symmetric n x n matrix. Construction symmetrizes (C + C')/2 and
 * rejects non-square or non-finite input; bounds, diagonal and definiteness
 * are reported by check_feasibility rather than enforced here.
 */
class CorrMatrix {
public:
    CorrMatrix() = default;
    explicit CorrMatrix(const Matrix& c);

    static CorrMatrix identity(Index n) { return CorrMatrix(Matrix::Identity(n, n)); }

    Index n() const noexcept { return c_.rows(); }
    const Matrix& matrix() const noexcept { return c_; }
    double operator()(Index i, Index j) const { return c_(i, j); }

private:
    Matrix c_;
};

struct PortfolioConstraint {
    std::string name;
    Vector weights;   ///< sums to one; zeros for assets outside a sub-index
    double variance;  ///< implied variance of the portfolio
};

/**
 * Implied volatilities of the n assets plus the portfolio constraints
 * sigma_j^2 = w_j' diag(sigma) C diag(sigma) w_j. The first constraint is
 * the market index.
 */
class MarketSpec {
public:
    MarketSpec() = default;
    MarketSpec(Vector sigma, std::vector<PortfolioConstraint> constraints);

    Index n() const noexcept { return sigma_.size(); }
    const Vector& sigma() const noexcept { return sigma_; }
    std::size_t num_constraints() const noexcept { return constraints_.size(); }
    const std::vector<PortfolioConstraint>& constraints() const noexcept { return constraints_; }
    const PortfolioConstraint& constraint(std::size_t j) const;

    /// v_j = sigma o w_j.
    Vector scaled_weights(std::size_t j) const;
    /// Stacked n x n_c matrix diag(sigma) W.
    Matrix scaled_weight_matrix() const;
    /// Target variances as a length-n_c vector.
    Vector target_variances() const;

private:
    Vector sigma_;
    std::vector<PortfolioConstraint> constraints_;
};

}  // namespace icorr
