#include "impliedcorr/nicm_solver.hpp"

#include "impliedcorr/corr_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace icorr {

namespace {

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------
// Kernels on raw matrices. The solver works on these; the public functions
// wrap them in the domain types.
// ---------------------------------------------------------------------------

Matrix residual_matrix(const Matrix& x, const Matrix& a_hat) {
    Matrix m = x * x.transpose();
    m.diagonal().setZero();
    m -= a_hat;
    return m;
}

double objective_raw(const Matrix& x, const Matrix& a_hat) {
    return residual_matrix(x, a_hat).squaredNorm();
}

Matrix gradient_raw(const Matrix& x, const Matrix& a_hat) {
    return 4.0 * residual_matrix(x, a_hat) * x;
}

// (vv' o J) Y without forming the n x n matrix.
Matrix apply_masked_outer(const Vector& v, const Matrix& y) {
    return v * (v.transpose() * y) - v.cwiseAbs2().asDiagonal() * y;
}

double masked_form(const Vector& v, const Matrix& y, const Matrix& z) {
    return masked_cross_form(v, y, z);
}

// Single-constraint market residual g(X) = target - v'C(X)v.
double market_residual(const Matrix& x, const Vector& v, double target) {
    return target - (masked_form(v, x, x) + v.squaredNorm());
}

void project_omega_inplace(Matrix& x) {
    for (Index i = 0; i < x.rows(); ++i) {
        const double sq = x.row(i).squaredNorm();
        if (sq > 1.0) {
            x.row(i) /= std::sqrt(sq);
        }
    }
}

struct RawEqualityProjection {
    Matrix plus;
    Matrix minus;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double distance_plus = 0.0;
    double distance_minus = 0.0;
    bool complex_roots = false;
    std::array<double, 3> coefficients{};

    const Matrix& pick(RootBranch b) const { return b == RootBranch::plus ? plus : minus; }
    RootBranch nearer() const {
        return distance_minus < distance_plus ? RootBranch::minus : RootBranch::plus;
    }
};

RawEqualityProjection equality_projection_raw(const Matrix& x, const Vector& v, double target) {
    const Matrix u = apply_masked_outer(v, x);
    const double a = masked_form(v, u, u);
    const double b = 2.0 * masked_form(v, x, u);
    const double c = masked_form(v, x, x) + v.squaredNorm() - target;

    RawEqualityProjection p;
    p.coefficients = {a, b, c};
    if (a == 0.0) {
        if (b == 0.0) {
            throw ValidationError("market constraint is insensitive to the loadings");
        }
        p.lambda_plus = p.lambda_minus = -c / b;
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) {
            p.complex_roots = true;
            p.lambda_plus = p.lambda_minus = -b / (2.0 * a);
        } else {
            // Cancellation-free pair; q/a and c/q are the two roots.
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (b + std::copysign(sq, b));
            const double r_q = q / a;
            const double r_c = q != 0.0 ? c / q : 0.0;
            if (b >= 0.0) {
                p.lambda_minus = r_q;  // (-b - sqrt(disc)) / 2a
                p.lambda_plus = r_c;
            } else {
                p.lambda_plus = r_q;   // (-b + sqrt(disc)) / 2a
                p.lambda_minus = r_c;
            }
        }
    }
    const double u_norm = u.norm();
    p.plus = x + p.lambda_plus * u;
    p.minus = x + p.lambda_minus * u;
    p.distance_plus = std::abs(p.lambda_plus) * u_norm;
    p.distance_minus = std::abs(p.lambda_minus) * u_norm;
    return p;
}

struct RawRestoration {
    Matrix x;
    RootBranch branch;
    int iterations;
    double residual;
};

RawRestoration restore_raw(const Matrix& x, const Vector& v, double target, double tol, int max_iter) {
    const RawEqualityProjection first = equality_projection_raw(x, v, target);
    const RootBranch branch = first.nearer();
    Matrix y = first.pick(branch);
    double residual = 0.0;
    for (int it = 0; it <= max_iter; ++it) {
        project_omega_inplace(y);
        residual = market_residual(y, v, target);
        if (std::abs(residual) <= tol) {
            return {std::move(y), branch, it, std::abs(residual)};
        }
        if (it == max_iter) {
            break;
        }
        y = equality_projection_raw(y, v, target).pick(branch);
    }
    throw ConvergenceError("restoration did not reach the market constraint within " +
                               std::to_string(max_iter) + " alternations (|g| = " +
                               std::to_string(std::abs(residual)) + ")",
                           std::abs(residual));
}

const PortfolioConstraint& single_constraint(const MarketSpec& spec, const char* who) {
    if (spec.num_constraints() != 1) {
        throw ValidationError(std::string(who) + " supports exactly one market constraint, got " +
                              std::to_string(spec.num_constraints()));
    }
    return spec.constraint(0);
}

void require_dims(const CorrMatrix& a, const MarketSpec& spec, int k, const char* who) {
    if (a.n() != spec.n()) {
        throw ValidationError(std::string(who) + ": target is " + std::to_string(a.n()) +
                              "x" + std::to_string(a.n()) + " but the market has " +
                              std::to_string(spec.n()) + " assets");
    }
    if (k < 1 || k > a.n()) {
        throw ValidationError(std::string(who) + ": factor count k = " + std::to_string(k) +
                              " must lie in [1, n]");
    }
}

// Market constraint in solver units, with the volatility time-scaling guard.
struct ScaledMarket {
    Vector v;
    double target;
    double scale = 1.0;
};

ScaledMarket scaled_market(const MarketSpec& spec) {
    ScaledMarket m{spec.scaled_weights(0), spec.constraint(0).variance};
    const double vmax = m.v.cwiseAbs().maxCoeff();
    if (vmax >= 1.0) {
        m.scale = 0.5 / vmax;
        m.v *= m.scale;
        m.target *= m.scale * m.scale;
    }
    return m;
}

// Component of m tangent to the constraint surface at x (normal is grad g(x)).
Matrix tangent_gradient(const Matrix& m, const Vector& v, const Matrix& x) {
    const Matrix normal = apply_masked_outer(v, x);
    const double nn = normal.squaredNorm();
    if (nn == 0.0) {
        return m;
    }
    return m - (m.cwiseProduct(normal).sum() / nn) * normal;
}

double clamp_step(double eta, const SolverConfig& config) {
    return std::clamp(eta, config.step_min, config.step_max);
}

// First spectral step: minimizer of the quadratic model of t -> f(Y - tG).
// With M0 = J o YY' - A_hat, M1 = J o (YG' + GY'), M2 = J o GG' the second
// derivative along G is 2||M1||^2 + 4<M0, M2>. Falls back to 1/||P(Y - G) - Y||_inf.
double initial_step(const Matrix& y, const Matrix& g, const Matrix& a_hat, const SolverConfig& config) {
    const Matrix m0 = residual_matrix(y, a_hat);
    Matrix m1 = y * g.transpose();
    m1 += m1.transpose().eval();
    m1.diagonal().setZero();
    Matrix m2 = g * g.transpose();
    m2.diagonal().setZero();
    const double curvature = 2.0 * m1.squaredNorm() + 4.0 * m0.cwiseProduct(m2).sum();
    if (curvature > 0.0) {
        return clamp_step(g.squaredNorm() / curvature, config);
    }
    Matrix probe = y - g;
    project_omega_inplace(probe);
    const double pg_inf = (probe - y).cwiseAbs().maxCoeff();
    return pg_inf > 0.0 ? clamp_step(1.0 / pg_inf, config) : config.step_max;
}

bool improvement_below(double previous, double current, const SolverConfig& config) {
    const double gain = previous - current;
    if (config.stop_rule == StopRule::relative) {
        return gain < config.fn_tol * std::max(std::abs(previous), std::numeric_limits<double>::min());
    }
    return gain < config.fn_tol;
}

}  // namespace

// ---------------------------------------------------------------------------

void SolverConfig::validate() const {
    if (k < 1) throw ValidationError("solver config: k must be >= 1");
    if (!(var_tol > 0.0)) throw ValidationError("solver config: var_tol must be positive");
    if (!(fn_tol > 0.0)) throw ValidationError("solver config: fn_tol must be positive");
    if (!(restoration_tol > 0.0)) throw ValidationError("solver config: restoration_tol must be positive");
    if (max_outer_iter < 1 || max_restoration_iter < 1 || max_backtracks < 1) {
        throw ValidationError("solver config: iteration limits must be >= 1");
    }
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ValidationError("solver config: armijo_c must lie in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw ValidationError("solver config: backtrack must lie in (0, 1)");
    if (!(step_min > 0.0 && step_min <= step_max)) {
        throw ValidationError("solver config: spectral step bounds must satisfy 0 < min <= max");
    }
}

Matrix target_offdiagonal(const CorrMatrix& a) {
    Matrix a_hat = a.matrix();
    a_hat.diagonal().setZero();
    return a_hat;
}

double objective(const FactorLoadings& x, const Matrix& a_hat) {
    if (a_hat.rows() != x.n() || a_hat.cols() != x.n()) {
        throw ValidationError("objective: target and loadings disagree on n");
    }
    return objective_raw(x.matrix(), a_hat);
}

Matrix objective_gradient(const FactorLoadings& x, const Matrix& a_hat) {
    if (a_hat.rows() != x.n() || a_hat.cols() != x.n()) {
        throw ValidationError("objective_gradient: target and loadings disagree on n");
    }
    return gradient_raw(x.matrix(), a_hat);
}

Matrix lagrangian_gradient_g(const FactorLoadings& x, const MarketSpec& spec, const Vector& lambda) {
    if (x.n() != spec.n() || lambda.size() != static_cast<Index>(spec.num_constraints())) {
        throw ValidationError("lagrangian_gradient_g: dimension mismatch");
    }
    Matrix grad = Matrix::Zero(x.n(), x.k());
    for (std::size_t j = 0; j < spec.num_constraints(); ++j) {
        const double l = lambda[static_cast<Index>(j)];
        if (l != 0.0) {
            grad -= 2.0 * l * apply_masked_outer(spec.scaled_weights(j), x.matrix());
        }
    }
    return grad;
}

Matrix lagrangian_gradient_h(const FactorLoadings& x, const Vector& kappa) {
    if (kappa.size() != x.n()) {
        throw ValidationError("lagrangian_gradient_h: kappa has wrong length");
    }
    return -2.0 * (kappa.asDiagonal() * x.matrix());
}

FactorLoadings project_omega(const FactorLoadings& x) {
    Matrix y = x.matrix();
    project_omega_inplace(y);
    return FactorLoadings(std::move(y));
}

EqualityProjection project_equality(const FactorLoadings& x, const MarketSpec& spec) {
    const auto& m = single_constraint(spec, "project_equality");
    if (x.n() != spec.n()) {
        throw ValidationError("project_equality: loadings and market disagree on n");
    }
    RawEqualityProjection raw = equality_projection_raw(x.matrix(), spec.scaled_weights(0), m.variance);
    EqualityProjection p;
    p.plus = FactorLoadings(std::move(raw.plus));
    p.minus = FactorLoadings(std::move(raw.minus));
    p.lambda_plus = raw.lambda_plus;
    p.lambda_minus = raw.lambda_minus;
    p.distance_plus = raw.distance_plus;
    p.distance_minus = raw.distance_minus;
    p.complex_roots = raw.complex_roots;
    p.coefficients = raw.coefficients;
    return p;
}

Restoration restore_feasibility(const FactorLoadings& x, const MarketSpec& spec, const SolverConfig& config) {
    const auto& m = single_constraint(spec, "project_feasible");
    if (x.n() != spec.n()) {
        throw ValidationError("project_feasible: loadings and market disagree on n");
    }
    RawRestoration r = restore_raw(x.matrix(), spec.scaled_weights(0), m.variance,
                                   config.restoration_tol, config.max_restoration_iter);
    return {FactorLoadings(std::move(r.x)), r.branch, r.iterations, r.residual};
}

namespace {

// One common factor at the equicorrelation level, clamped into (0, 1]; it meets
// the market constraint exactly whenever that level is attainable.
Matrix common_factor_start(Index n, Index k, const Vector& v, double target) {
    const double own = v.squaredNorm();
    const double cross = v.sum() * v.sum() - own;
    const double c_bar = cross > 0.0 ? (target - own) / cross : 0.0;
    Matrix x = Matrix::Zero(n, k);
    x.col(0).setConstant(std::sqrt(std::clamp(c_bar, 1e-2, 1.0)));
    return x;
}

// A start with (vv' o J) X = 0, e.g. zero loadings from an identity target,
// gives the restoration nothing to move along.
Matrix sensitive_start(Matrix x, const Vector& v, double target) {
    if (apply_masked_outer(v, x).squaredNorm() > 0.0) return x;
    return common_factor_start(x.rows(), x.cols(), v, target);
}

}  // namespace

FactorLoadings project_feasible(const FactorLoadings& x, const MarketSpec& spec, const SolverConfig& config) {
    return restore_feasibility(x, spec, config).X;
}

FactorLoadings initial_loadings(const CorrMatrix& a, int k) {
    const Index n = a.n();
    if (k < 1 || k > n) {
        throw ValidationError("initial_loadings: k = " + std::to_string(k) + " must lie in [1, " +
                              std::to_string(n) + "]");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    if (es.info() != Eigen::Success) {
        throw Error("initial_loadings: eigendecomposition failed");
    }
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index l, Index r) {
        return es.eigenvalues()[l] > es.eigenvalues()[r];
    });

    const double kd = static_cast<double>(k);
    Matrix x(n, k);
    for (int d = 0; d < k; ++d) {
        const Index col = order[static_cast<std::size_t>(d)];
        Vector e = es.eigenvectors().col(col);
        // Fix the arbitrary eigenvector sign: positive sum, else positive largest entry.
        Index imax = 0;
        e.cwiseAbs().maxCoeff(&imax);
        const double total = e.sum();
        if (total < 0.0 || (total == 0.0 && e[imax] < 0.0)) {
            e = -e;
        }
        const double iota = es.eigenvalues()[col];
        const double norm2 = e.squaredNorm();
        const double num = (iota - 1.0) * norm2;
        const double den = kd * norm2 * norm2 - kd * e.array().pow(4).sum();
        const double cap = 1.0 / (std::sqrt(kd) * e.cwiseAbs().maxCoeff());
        double scale = 0.0;
        if (num > 0.0) {
            const double first = den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity();
            scale = std::min(first, cap);
        }
        x.col(d) = scale * e;
    }
    return FactorLoadings(std::move(x));
}

SolverResult solve_nicm(const CorrMatrix& a, const MarketSpec& spec, const SolverConfig& config) {
    config.validate();
    single_constraint(spec, "solve_nicm");
    require_dims(a, spec, config.k, "solve_nicm");
    const auto t0 = Clock::now();

    const ScaledMarket market = scaled_market(spec);
    const double tol_r = config.restoration_tol * market.scale * market.scale;
    const Matrix a_hat = target_offdiagonal(a);

    SolverResult res;
    res.vol_scale = market.scale;

    Matrix x0 = sensitive_start(initial_loadings(a, config.k).matrix(), market.v, market.target);
    Matrix y;
    try {
        y = restore_raw(x0, market.v, market.target, tol_r, config.max_restoration_iter).x;
        res.restorations = 1;
    } catch (const ConvergenceError&) {
        x0 = common_factor_start(x0.rows(), x0.cols(), market.v, market.target);
        y = restore_raw(x0, market.v, market.target, tol_r, config.max_restoration_iter).x;
        res.restorations = 2;
    }
    res.fn_start = objective_raw(x0, a_hat);
    double f = objective_raw(y, a_hat);
    Matrix g = tangent_gradient(gradient_raw(y, a_hat), market.v, y);
    res.fn_trace.push_back(f);

    double eta = initial_step(y, g, a_hat, config);

    bool stopped = false;
    res.message = "iteration cap reached";
    for (int it = 0; it < config.max_outer_iter; ++it) {
        Matrix z = y - eta * g;
        project_omega_inplace(z);
        Matrix dir = tangent_gradient(z - y, market.v, y);
        double slope = dir.cwiseProduct(g).sum();
        if (!(slope < 0.0)) {
            dir = z - y;
            slope = dir.cwiseProduct(g).sum();
        }
        if (!(slope < 0.0) || dir.cwiseAbs().maxCoeff() == 0.0) {
            res.message = "projected gradient vanished";
            stopped = true;
            break;
        }

        double alpha = 1.0;
        bool accepted = false;
        Matrix y_new;
        double f_new = f;
        for (int bt = 0; bt < config.max_backtracks; ++bt, alpha *= config.backtrack) {
            try {
                y_new = restore_raw(y + alpha * dir, market.v, market.target, tol_r,
                                    config.max_restoration_iter).x;
            } catch (const ConvergenceError&) {
                ++res.restorations;
                continue;
            }
            ++res.restorations;
            f_new = objective_raw(y_new, a_hat);
            if (f_new <= f + config.armijo_c * alpha * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.message = "line search found no further decrease";
            stopped = true;
            break;
        }

        Matrix g_new = tangent_gradient(gradient_raw(y_new, a_hat), market.v, y_new);
        const Matrix s = y_new - y;
        const double sy = s.cwiseProduct(g_new - g).sum();
        eta = sy > 0.0 ? clamp_step(s.squaredNorm() / sy, config) : config.step_max;

        const double f_prev = f;
        y = std::move(y_new);
        g = std::move(g_new);
        f = f_new;
        res.fn_trace.push_back(f);
        ++res.outer_iterations;
        if (improvement_below(f_prev, f, config)) {
            res.message = "objective improvement below tolerance";
            stopped = true;
            break;
        }
    }

    res.X_star = FactorLoadings(std::move(y));
    res.C_star = assemble_correlation(res.X_star);
    res.fn = f;
    res.constraint_residual = std::abs(constraint_residuals(res.X_star, spec)[0]);
    res.converged = stopped && res.constraint_residual <= config.var_tol;
    if (stopped && !res.converged) {
        res.message = "market residual above var_tol";
    }
    res.wall_time = Clock::now() - t0;
    return res;
}

// ---------------------------------------------------------------------------
// Reference optimizer
// ---------------------------------------------------------------------------

namespace {

SolverResult augmented_lagrangian(const CorrMatrix& a, const MarketSpec& spec, const Matrix& start,
                                  const SolverConfig& config) {
    const auto& m = spec.constraint(0);
    const Index k = start.cols();

    const Index n = a.n();
    const Index dim = n * k;
    const Matrix a_hat = target_offdiagonal(a);
    const Vector v = spec.scaled_weights(0);
    const double target = m.variance;

    auto as_matrix = [&](const Vector& z) { return Eigen::Map<const Matrix>(z.data(), n, k); };
    auto scaled_g = [&](const Matrix& x) { return market_residual(x, v, target) / target; };

    double lambda = 0.0;
    double mu = 10.0;
    Vector kappa = Vector::Zero(n);

    auto merit = [&](const Vector& z) {
        const Matrix x = as_matrix(z);
        const double gv = scaled_g(x);
        const Vector h = Vector::Ones(n) - x.rowwise().squaredNorm();
        double val = objective_raw(x, a_hat) + lambda * gv + 0.5 * mu * gv * gv;
        for (Index i = 0; i < n; ++i) {
            const double t = std::max(0.0, kappa[i] - mu * h[i]);
            val += (t * t - kappa[i] * kappa[i]) / (2.0 * mu);
        }
        return val;
    };
    auto fd_gradient = [&](const Vector& z) {
        Vector grad(dim);
        Vector zp = z;
        for (Index i = 0; i < dim; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(z[i]));
            zp[i] = z[i] + h;
            const double up = merit(zp);
            zp[i] = z[i] - h;
            const double down = merit(zp);
            zp[i] = z[i];
            grad[i] = (up - down) / (2.0 * h);
        }
        return grad;
    };

    Vector z = Eigen::Map<const Vector>(start.data(), dim);

    SolverResult res;
    res.fn_start = objective_raw(start, a_hat);
    res.fn_trace.push_back(res.fn_start);

    double prev_violation = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < 60; ++outer) {
        // BFGS on the augmented Lagrangian.
        Matrix h_inv = Matrix::Identity(dim, dim);
        double val = merit(z);
        Vector grad = fd_gradient(z);
        for (int inner = 0; inner < 500; ++inner) {
            if (grad.lpNorm<Eigen::Infinity>() <= 1e-9) break;
            Vector p = -h_inv * grad;
            if (p.dot(grad) >= 0.0) {
                h_inv.setIdentity();
                p = -grad;
            }
            double step = 1.0;
            Vector z_new;
            double val_new = val;
            bool ok = false;
            for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
                z_new = z + step * p;
                val_new = merit(z_new);
                if (val_new <= val + 1e-4 * step * p.dot(grad)) {
                    ok = true;
                    break;
                }
            }
            if (!ok) break;
            const Vector grad_new = fd_gradient(z_new);
            const Vector s = z_new - z;
            const Vector yv = grad_new - grad;
            const double sy = s.dot(yv);
            if (sy > 1e-14) {
                const double rho = 1.0 / sy;
                const Matrix ident = Matrix::Identity(dim, dim);
                h_inv = (ident - rho * s * yv.transpose()) * h_inv * (ident - rho * yv * s.transpose()) +
                        rho * s * s.transpose();
            }
            const double change = val - val_new;
            z = z_new;
            val = val_new;
            grad = grad_new;
            if (change <= 1e-15 * (1.0 + std::abs(val))) break;
        }
        ++res.outer_iterations;

        const Matrix x = as_matrix(z);
        const double gv = scaled_g(x);
        const Vector h = Vector::Ones(n) - x.rowwise().squaredNorm();
        res.fn_trace.push_back(objective_raw(x, a_hat));
        lambda += mu * gv;
        for (Index i = 0; i < n; ++i) kappa[i] = std::max(0.0, kappa[i] - mu * h[i]);

        const double violation = std::max(std::abs(gv) * target, std::max(0.0, -h.minCoeff()));
        if (violation <= 1e-3 * config.var_tol) {
            res.converged = true;
            break;
        }
        if (violation > 0.25 * prev_violation) mu = std::min(mu * 10.0, 1e12);
        prev_violation = violation;
    }

    res.X_star = FactorLoadings(as_matrix(z));
    res.C_star = assemble_correlation(res.X_star);
    res.fn = objective_raw(res.X_star.matrix(), a_hat);
    res.constraint_residual = std::abs(constraint_residuals(res.X_star, spec)[0]);
    res.message = res.converged ? "augmented Lagrangian converged" : "outer iteration cap reached";
    return res;
}

}  // namespace

SolverResult reference_solve(const CorrMatrix& a, const MarketSpec& spec, int k, const SolverConfig& config) {
    const auto& m = single_constraint(spec, "reference_solve");
    require_dims(a, spec, k, "reference_solve");
    const auto t0 = Clock::now();

    // Two starts: the eigenvector loadings as they are, and the same loadings
    // moved onto the constraint. X = 0 is a stationary point of the penalty
    // terms, so a start whose constraint is far off can collapse onto it.
    const Vector v = spec.scaled_weights(0);
    const Matrix x0 = initial_loadings(a, k).matrix();
    std::vector<Matrix> starts{x0};
    try {
        starts.push_back(restore_raw(sensitive_start(x0, v, m.variance), v, m.variance,
                                     config.restoration_tol, config.max_restoration_iter)
                             .x);
    } catch (const Error&) {
    }

    SolverResult best;
    bool have = false;
    for (const Matrix& start : starts) {
        SolverResult r = augmented_lagrangian(a, spec, start, config);
        const bool better = !have || (r.converged && !best.converged) ||
                            (r.converged == best.converged && r.fn < best.fn);
        if (better) {
            best = std::move(r);
            have = true;
        }
    }
    best.wall_time = Clock::now() - t0;
    return best;
}

}  // namespace icorr
