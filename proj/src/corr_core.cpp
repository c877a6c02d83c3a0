#include "impliedcorr/corr_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace icorr {

namespace {

// Entry tolerance for the diagonal, bound and symmetry flags on external input.
constexpr double kEntryTol = 1e-12;

void require_same_n(Index a, Index b, const char* what) {
    if (a != b) {
        throw ValidationError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                              " vs " + std::to_string(b) + ")");
    }
}

}  // namespace

CorrMatrix assemble_correlation(const FactorLoadings& x) {
    Matrix c = x.matrix() * x.matrix().transpose();
    c.diagonal().setOnes();
    return CorrMatrix(c);
}

Vector residual_variances(const FactorLoadings& x) {
    const Vector sq = x.row_squared_norms();
    Vector f(sq.size());
    for (Index i = 0; i < sq.size(); ++i) {
        if (sq[i] > 1.0 + kFeasibilityEps) {
            throw RowNormError(i, sq[i]);
        }
        f[i] = std::max(0.0, 1.0 - sq[i]);
    }
    return f;
}

Vector inequality_slack(const FactorLoadings& x) {
    return Vector::Ones(x.n()) - x.row_squared_norms();
}

double portfolio_variance(const CorrMatrix& c, const MarketSpec& spec, std::size_t j) {
    require_same_n(c.n(), spec.n(), "portfolio_variance");
    const Vector v = spec.scaled_weights(j);
    return v.dot(c.matrix() * v);
}

Vector constraint_residuals(const FactorLoadings& x, const MarketSpec& spec) {
    require_same_n(x.n(), spec.n(), "constraint_residuals");
    const Matrix v = spec.scaled_weight_matrix();
    // C(X) V without forming C: X (X'V) with the diagonal of XX' swapped for ones.
    const Vector diag_shift = Vector::Ones(x.n()) - x.row_squared_norms();
    const Matrix cv = x.matrix() * (x.matrix().transpose() * v) + diag_shift.asDiagonal() * v;
    const Vector aggregated = v.cwiseProduct(cv).colwise().sum().transpose();
    return spec.target_variances() - aggregated;
}

Vector constraint_residuals(const CorrMatrix& c, const MarketSpec& spec) {
    require_same_n(c.n(), spec.n(), "constraint_residuals");
    const Matrix v = spec.scaled_weight_matrix();
    const Vector aggregated = v.cwiseProduct(c.matrix() * v).colwise().sum().transpose();
    return spec.target_variances() - aggregated;
}

double masked_cross_form(const Vector& v, const Matrix& y, const Matrix& z) {
    const Vector yv = y.transpose() * v;
    const Vector zv = z.transpose() * v;
    const double diag = (v.cwiseAbs2().array() * y.cwiseProduct(z).rowwise().sum().array()).sum();
    return yv.dot(zv) - diag;
}

double min_eigenvalue(const Matrix& symmetric) {
    if (symmetric.size() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

FeasibilityReport check_feasibility(const CorrMatrix& c, const MarketSpec* spec, double tol) {
    return check_feasibility(c.matrix(), spec, tol);
}

FeasibilityReport check_feasibility(const Matrix& raw, const MarketSpec* spec, double tol) {
    if (raw.rows() != raw.cols()) {
        throw ValidationError("check_feasibility: matrix is not square");
    }
    FeasibilityReport r;
    r.max_asymmetry = raw.size() == 0 ? 0.0 : (raw - raw.transpose()).cwiseAbs().maxCoeff();
    r.symmetric = r.max_asymmetry <= kEntryTol;
    r.unit_diagonal = ((raw.diagonal().array() - 1.0).abs() <= kEntryTol).all();
    r.bounded = (raw.array().abs() <= 1.0 + kEntryTol).all();

    const CorrMatrix sym(raw);
    r.min_eigenvalue = min_eigenvalue(sym.matrix());
    r.psd = r.min_eigenvalue >= -kPsdEps;

    if (spec != nullptr && spec->num_constraints() > 0) {
        r.constraint_residuals = constraint_residuals(sym, *spec);
        r.economically_matched = r.constraint_residuals.cwiseAbs().maxCoeff() <= tol;
    } else {
        r.constraint_residuals = Vector();
        r.economically_matched = true;
    }
    return r;
}

}  // namespace icorr
