/**
 * @file nicm_solver.hpp
 * @brief Nearest implied correlation matrix: minimize ||C(X) - A||_F^2 over
 *        factor loadings X subject to the row-norm set and the market
 *        constraint, by spectral projected gradient with inexact restoration.
 *
 * The feasible set is handled by two cheap projections:
 *  - project_omega rescales rows of X with squared norm above one;
 *  - project_equality moves X along X + lambda (vv' o J) X, with lambda a root
 *    of a scalar quadratic, onto the constraint surface v'C(X)v = sigma_m^2
 *    where v = sigma o w.
 * project_feasible alternates the two with the root branch locked after the
 * first step. solve_nicm runs the outer loop: restore, take a Barzilai-Borwein
 * scaled projected gradient step, backtrack monotonically on f, restore again.
 *
 * Only a single market constraint is supported by the solver.
 */

#pragma once

#include "impliedcorr/types.hpp"

#include <array>
#include <chrono>
#include <string>
#include <vector>

namespace icorr {

enum class StopRule { absolute, relative };

struct SolverConfig {
    int k = 1;
    double var_tol = 1e-6;          ///< |g| accepted at the solution
    double fn_tol = 1e-3;           ///< stop when the objective improves by less
    StopRule stop_rule = StopRule::absolute;
    int max_outer_iter = 200;
    int max_restoration_iter = 100;
    double restoration_tol = 1e-10;
    double armijo_c = 1e-4;         ///< sufficient-decrease constant
    double backtrack = 0.5;
    int max_backtracks = 50;
    double step_min = 1e-10;        ///< spectral step bounds
    double step_max = 1e10;

    /// Throws ValidationError on non-positive tolerances or unordered bounds.
    void validate() const;
};

struct SolverResult {
    FactorLoadings X_star;
    CorrMatrix C_star;
    double fn = 0.0;                ///< ||C_star - A||_F^2
    double fn_start = 0.0;          ///< objective at the starting loadings
    std::vector<double> fn_trace;   ///< objective after each restoration, first entry is the restored start
    double constraint_residual = 0.0;
    int outer_iterations = 0;
    int restorations = 0;
    std::chrono::duration<double> wall_time{0.0};
    bool converged = false;
    std::string message;
    double vol_scale = 1.0;         ///< common factor applied to sigma before solving
};

/// A_hat = A - I with the diagonal forced to zero.
Matrix target_offdiagonal(const CorrMatrix& a);

/// f(X) = ||J o XX' - A_hat||_F^2.
double objective(const FactorLoadings& x, const Matrix& a_hat);

/// 4 (J o XX' - A_hat) X.
Matrix objective_gradient(const FactorLoadings& x, const Matrix& a_hat);

/// sum_j lambda_j grad g_j = -2 sum_j lambda_j sigma (J o w_j w_j') sigma X.
Matrix lagrangian_gradient_g(const FactorLoadings& x, const MarketSpec& spec, const Vector& lambda);

/// grad (kappa' h(X)) = -2 diag(kappa) X.
Matrix lagrangian_gradient_h(const FactorLoadings& x, const Vector& kappa);

FactorLoadings project_omega(const FactorLoadings& x);

enum class RootBranch { plus, minus };

struct EqualityProjection {
    FactorLoadings plus;
    FactorLoadings minus;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double distance_plus = 0.0;     ///< ||X_E,+ - X||_F
    double distance_minus = 0.0;
    bool complex_roots = false;     ///< negative discriminant, real part used
    std::array<double, 3> coefficients{};  ///< a lambda^2 + b lambda + c = 0

    RootBranch nearer() const noexcept {
        return distance_minus < distance_plus ? RootBranch::minus : RootBranch::plus;
    }
    const FactorLoadings& pick(RootBranch b) const noexcept {
        return b == RootBranch::plus ? plus : minus;
    }
};

/**
 * Candidate projections X + lambda (vv' o J) X onto the market constraint for
 * both roots of the quadratic in lambda. The quadratic is exact for this
 * first-order form, so either candidate satisfies the constraint up to
 * rounding unless the roots are complex.
 */
EqualityProjection project_equality(const FactorLoadings& x, const MarketSpec& spec);

struct Restoration {
    FactorLoadings X;
    RootBranch branch = RootBranch::plus;
    int iterations = 0;             ///< alternation rounds after the first equality step
    double residual = 0.0;          ///< |g| at X
};

/// Alternating projection onto {h >= 0, g = 0}; throws ConvergenceError.
Restoration restore_feasibility(const FactorLoadings& x, const MarketSpec& spec, const SolverConfig& config);
FactorLoadings project_feasible(const FactorLoadings& x, const MarketSpec& spec, const SolverConfig& config);

/// Eigenvector-based start; column d is s_d e_d with s_d capped so X stays in the row-norm set.
FactorLoadings initial_loadings(const CorrMatrix& a, int k);

SolverResult solve_nicm(const CorrMatrix& a, const MarketSpec& spec, const SolverConfig& config);

/**
 * Independent cross-check: augmented Lagrangian with BFGS inner solves on
 * central-difference gradients. Meant for small n (tests and diagnostics).
 */
SolverResult reference_solve(const CorrMatrix& a, const MarketSpec& spec, int k, const SolverConfig& config);

}  // namespace icorr
