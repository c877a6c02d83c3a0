// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "impliedcorr/baselines.hpp"
#include "impliedcorr/corr_core.hpp"
#include "impliedcorr/factor_pricing.hpp"
#include "impliedcorr/harness.hpp"
#include "impliedcorr/io.hpp"
#include "impliedcorr/nicm_solver.hpp"
#include "impliedcorr/vg_copula.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace icorr;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes, fixed here rather than read from anywhere else.
constexpr double kPsdFloor = -1e-10;
constexpr int kPsdSamples = 1000;
constexpr double kPsdSeconds = 30.0;
constexpr double kGradientRelTol = 1e-6;
constexpr int kGradientInstances = 100;
constexpr double kGradientSeconds = 10.0;
constexpr double kVarTol = 1e-6;
constexpr int kSyntheticInstances = 20;
constexpr double kOracleTol = 1e-3;
constexpr int kOracleInstances = 20;
constexpr double kMedianIterations = 10.0;
constexpr double kSolveSeconds = 5.0;
constexpr int kRepairInstances = 20;
constexpr double kRepairTol = 1e-6;
constexpr int kRepairAttempts = 200;
constexpr Index kRepairWindow = 6;
constexpr double kZeroCrpFn = 1e-6;
constexpr double kZeroCrpAlpha = 1e-6;
constexpr double kEconomicTol = 1e-8;
constexpr int kEconomicInstances = 50;
constexpr double kEquicorrUlps = 4.0;
constexpr double kEquicorrResidual = 1e-12;
constexpr double kVgRoundTrip = 1e-12;
constexpr double kVgVariance = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

Matrix random_loadings(std::mt19937_64& rng, Index n, Index k, double max_radius) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    Matrix x(n, k);
    for (Index i = 0; i < n; ++i) {
        for (Index d = 0; d < k; ++d) x(i, d) = normal(rng);
        x.row(i) *= max_radius * unit(rng) / x.row(i).norm();
    }
    return x;
}

Vector uniform_vector(std::mt19937_64& rng, Index n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

Vector random_weights(std::mt19937_64& rng, Index n) {
    const Vector w = uniform_vector(rng, n, 0.1, 1.0);
    return w / w.sum();
}

double aggregated(const Matrix& c, const MarketSpec& spec) {
    const Vector v = spec.scaled_weights(0);
    return v.dot(c * v);
}

MarketSpec market_at(const Vector& sigma, const Vector& w, double variance) {
    return MarketSpec(sigma, {{"market", w, variance}});
}

double abs_residual(const CorrMatrix& c, const MarketSpec& spec) {
    return std::abs(constraint_residuals(c, spec)(0));
}

bool non_increasing(const std::vector<double>& trace) {
    for (std::size_t t = 1; t < trace.size(); ++t) {
        if (trace[t] > trace[t - 1]) return false;
    }
    return true;
}

Matrix central_difference(const std::function<double(const Matrix&)>& f, const Matrix& x) {
    Matrix g(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index d = 0; d < x.cols(); ++d) {
            const double h = 1e-6 * (1.0 + std::abs(x(i, d)));
            Matrix up = x, down = x;
            up(i, d) += h;
            down(i, d) -= h;
            g(i, d) = (f(up) - f(down)) / (2.0 * h);
        }
    }
    return g;
}

double relative_error(const Matrix& approx, const Matrix& exact) {
    return (approx - exact).norm() / std::max(exact.norm(), 1e-12);
}

SyntheticMarket synthetic(Index n, int k_true, double crp, std::uint64_t seed) {
    return generate_synthetic_market({n, k_true, crp, seed, 252});
}

// 1 -------------------------------------------------------------------------
Verdict psd_by_construction() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    const Index sizes[] = {5, 50, 100};
    const Index factors[] = {1, 3, 5};
    double worst = 1.0;
    int diag_failures = 0;
    for (int s = 0; s < kPsdSamples; ++s) {
        const Index n = sizes[s % 3];
        const Index k = factors[(s / 3) % 3];
        const CorrMatrix c = assemble_correlation(FactorLoadings(random_loadings(rng, n, k, 1.0)));
        worst = std::min(worst, min_eigenvalue(c.matrix()));
        if (!(c.matrix().diagonal().array() == 1.0).all()) ++diag_failures;
    }
    const double secs = seconds_since(t0);
    return {worst >= kPsdFloor && diag_failures == 0 && secs < kPsdSeconds,
            "min eigenvalue " + fmt(worst) + ", diagonal failures " + std::to_string(diag_failures) + ", " +
                fmt(secs) + " s"};
}

// 2 -------------------------------------------------------------------------
Verdict gradient_suite() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(202);
    double worst_f = 0.0, worst_g = 0.0, worst_h = 0.0;
    for (int trial = 0; trial < kGradientInstances; ++trial) {
        const Index n = 2 + trial % 7;
        const Index k = 1 + trial % 3;
        const Matrix x = random_loadings(rng, n, k, 1.0);
        Matrix a = Matrix::Zero(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) a(i, j) = a(j, i) = uniform_vector(rng, 1, -0.9, 0.9)(0);
        }
        const MarketSpec spec = market_at(uniform_vector(rng, n, 0.1, 0.6), random_weights(rng, n), 0.04);
        Vector lambda(1);
        lambda << uniform_vector(rng, 1, -2.0, 2.0)(0);
        const Vector kappa = uniform_vector(rng, n, 0.0, 2.0);

        const auto f = [&](const Matrix& y) { return objective(FactorLoadings(y), a); };
        const auto g = [&](const Matrix& y) { return lambda.dot(constraint_residuals(FactorLoadings(y), spec)); };
        const auto h = [&](const Matrix& y) { return kappa.dot(inequality_slack(FactorLoadings(y))); };
        worst_f = std::max(worst_f, relative_error(central_difference(f, x), objective_gradient(FactorLoadings(x), a)));
        worst_g = std::max(worst_g, relative_error(central_difference(g, x),
                                                   lagrangian_gradient_g(FactorLoadings(x), spec, lambda)));
        worst_h = std::max(worst_h, relative_error(central_difference(h, x),
                                                   lagrangian_gradient_h(FactorLoadings(x), kappa)));
    }
    const double secs = seconds_since(t0);
    const double worst = std::max({worst_f, worst_g, worst_h});
    return {worst <= kGradientRelTol && secs < kGradientSeconds,
            "max relative error objective " + fmt(worst_f) + ", constraint " + fmt(worst_g) + ", row norms " +
                fmt(worst_h) + ", " + fmt(secs) + " s"};
}

// 3 -------------------------------------------------------------------------
Verdict constraint_satisfaction() {
    SolverConfig cfg;
    cfg.k = 3;
    int converged = 0, total = 0;
    double worst = 0.0;
    for (Index n : {10, 50, 100}) {
        for (int i = 0; i < kSyntheticInstances; ++i) {
            const SyntheticMarket m = synthetic(n, 3, 0.1, 3000 + static_cast<std::uint64_t>(100 * n + i));
            const SolverResult r = solve_nicm(CorrMatrix(*m.snapshot.target), m.snapshot.spec, cfg);
            ++total;
            if (!r.converged) continue;
            ++converged;
            worst = std::max(worst, abs_residual(r.C_star, m.snapshot.spec));
        }
    }
    return {converged > 0 && worst <= kVarTol,
            std::to_string(converged) + "/" + std::to_string(total) + " converged, max |g| " + fmt(worst)};
}

// 4 -------------------------------------------------------------------------
Verdict oracle_equivalence() {
    std::mt19937_64 rng(404);
    SolverConfig cfg;
    cfg.stop_rule = StopRule::relative;
    cfg.fn_tol = 1e-10;
    cfg.max_outer_iter = 2000;
    double worst = 0.0;
    for (int trial = 0; trial < kOracleInstances; ++trial) {
        const Index n = 2 + trial % 3;
        const Matrix truth = assemble_correlation(FactorLoadings(random_loadings(rng, n, 2, 0.95))).matrix();
        Matrix target = truth;
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                target(i, j) = target(j, i) = std::clamp(truth(i, j) + uniform_vector(rng, 1, -0.1, 0.1)(0), -1.0, 1.0);
            }
        }
        const Vector sigma = uniform_vector(rng, n, 0.1, 0.6);
        const Vector w = random_weights(rng, n);
        const double markup = uniform_vector(rng, 1, -0.1, 0.2)(0);
        const MarketSpec spec = market_at(sigma, w, (1.0 + markup) * aggregated(truth, market_at(sigma, w, 1.0)));
        const SolverResult fast = solve_nicm(CorrMatrix(target), spec, cfg);
        const SolverResult ref = reference_solve(CorrMatrix(target), spec, 1, cfg);
        worst = std::max(worst, std::abs(fast.fn - ref.fn));
    }
    return {worst <= kOracleTol, "max |fn - fn_reference| " + fmt(worst) + " over " +
                                     std::to_string(kOracleInstances) + " instances"};
}

// 5 -------------------------------------------------------------------------
Verdict monotone_descent() {
    int runs = 0, violations = 0;
    for (Index n : {10, 50}) {
        for (int k : {1, 3, 5}) {
            SolverConfig cfg;
            cfg.k = k;
            for (int i = 0; i < kSyntheticInstances; ++i) {
                const SyntheticMarket m = synthetic(n, 5, 0.1, 5000 + static_cast<std::uint64_t>(100 * n + 10 * k + i));
                const SolverResult r = solve_nicm(CorrMatrix(*m.snapshot.target), m.snapshot.spec, cfg);
                if (!r.converged) continue;
                ++runs;
                if (!non_increasing(r.fn_trace)) ++violations;
            }
        }
    }
    return {runs > 0 && violations == 0,
            std::to_string(violations) + " non-monotone traces over " + std::to_string(runs) + " converged runs"};
}

// 6 -------------------------------------------------------------------------
Verdict factor_count_trend() {
    std::vector<double> med;
    for (int k : {1, 3, 5}) {
        SolverConfig cfg;
        cfg.k = k;
        std::vector<double> fns;
        for (int i = 0; i < kSyntheticInstances; ++i) {
            const SyntheticMarket m = synthetic(50, 5, 0.1, 6000 + static_cast<std::uint64_t>(i));
            fns.push_back(solve_nicm(CorrMatrix(*m.snapshot.target), m.snapshot.spec, cfg).fn);
        }
        med.push_back(median(fns));
    }
    return {med[2] <= med[1] && med[1] <= med[0],
            "median fn k=1 " + fmt(med[0]) + ", k=3 " + fmt(med[1]) + ", k=5 " + fmt(med[2])};
}

// 7 -------------------------------------------------------------------------
Verdict iteration_economy() {
    SolverConfig cfg;
    std::vector<double> iters;
    double slowest = 0.0;
    for (int i = 0; i < kSyntheticInstances; ++i) {
        const SyntheticMarket m = synthetic(100, 3, 0.1, 7000 + static_cast<std::uint64_t>(i));
        const SolverResult r = solve_nicm(CorrMatrix(*m.snapshot.target), m.snapshot.spec, cfg);
        iters.push_back(r.outer_iterations);
        slowest = std::max(slowest, r.wall_time.count());
    }
    const double med = median(iters);
    return {med <= kMedianIterations && slowest < kSolveSeconds,
            "median outer iterations " + fmt(med) + ", slowest solve " + fmt(slowest) + " s"};
}

// 8 -------------------------------------------------------------------------
Verdict repair_capability() {
    std::mt19937_64 rng(808);
    SolverConfig cfg;
    cfg.k = 3;
    const Index n = 10;
    int built = 0, repaired = 0, attempts = 0;
    double worst = 0.0, most_negative = 0.0;
    while (built < kRepairInstances && attempts < kRepairAttempts) {
        ++attempts;
        // A window shorter than n gives a singular sample correlation, so any
        // negative blend weight pushes its null directions below zero.
        const SyntheticMarket m = synthetic(n, 3, 0.0, 8000 + static_cast<std::uint64_t>(attempts));
        const Matrix c_p = pearson_correlation(m.snapshot.asset_returns->bottomRows(kRepairWindow));
        const Vector& sigma = m.snapshot.spec.sigma();
        const Vector& w = m.snapshot.spec.constraint(0).weights;
        const MarketSpec unit = market_at(sigma, w, 1.0);
        const double alpha = -uniform_vector(rng, 1, 0.05, 0.3)(0);
        const Matrix c_q = alpha * Matrix::Ones(n, n) + (1.0 - alpha) * c_p;
        const double variance = aggregated(c_q, unit);
        const double floor = min_eigenvalue(c_q);
        if (!(variance > 0.0)) continue;
        const double c_bar = equicorrelation(market_at(sigma, w, variance)).c_bar;
        if (floor >= -1e-3 || !(c_bar > 0.0 && c_bar < 1.0)) continue;
        ++built;
        most_negative = std::min(most_negative, floor);
        const MarketSpec spec = market_at(sigma, w, variance);
        const SolverResult r = solve_nicm(CorrMatrix(c_q), spec, cfg);
        const FeasibilityReport rep = check_feasibility(r.C_star, &spec, kRepairTol);
        const double g = abs_residual(r.C_star, spec);
        worst = std::max(worst, g);
        if (r.converged && rep.mathematically_feasible() && g <= kRepairTol) ++repaired;
    }
    return {built == kRepairInstances && repaired == built,
            std::to_string(repaired) + "/" + std::to_string(built) + " non-PSD targets repaired (min eigenvalue " +
                fmt(most_negative) + "), max |g| " + fmt(worst)};
}

// 9 -------------------------------------------------------------------------
Verdict zero_crp_exactness() {
    SolverConfig cfg;
    cfg.k = 3;
    cfg.stop_rule = StopRule::relative;
    double worst_fn = 0.0, worst_alpha = 0.0;
    for (Index n : {50, 100}) {
        for (int i = 0; i < 5; ++i) {
            const SyntheticMarket m = synthetic(n, 3, 0.0, 9000 + static_cast<std::uint64_t>(n + i));
            worst_fn = std::max(worst_fn, solve_nicm(m.ground_truth, m.snapshot.spec, cfg).fn);
            const EconomicResult e = economic_implied_corr(m.true_loadings, m.snapshot.spec, false);
            worst_alpha = std::max(worst_alpha, std::abs(e.alpha_tilde));
        }
    }
    for (int i = 0; i < 5; ++i) {
        const SyntheticMarket m = synthetic(30, 1, 0.0, 9500 + static_cast<std::uint64_t>(i));
        worst_alpha = std::max(worst_alpha, std::abs(economic_implied_corr(m.true_loadings, m.snapshot.spec).alpha_tilde));
    }
    return {worst_fn <= kZeroCrpFn && worst_alpha <= kZeroCrpAlpha,
            "max fn " + fmt(worst_fn) + ", max alpha " + fmt(worst_alpha)};
}

// 10 ------------------------------------------------------------------------
Verdict economic_back_substitution() {
    int done = 0, attempts = 0, bad_direction = 0, ups = 0, downs = 0;
    double worst = 0.0;
    while (done < kEconomicInstances && attempts < 10 * kEconomicInstances) {
        const double crp = attempts % 2 ? -0.05 : 0.1;
        const SyntheticMarket m = synthetic(20, 3, crp, 10000 + static_cast<std::uint64_t>(attempts));
        ++attempts;
        EconomicResult r;
        try {
            r = economic_implied_corr(m.true_loadings, m.snapshot.spec);
        } catch (const ValidationError&) {
            continue;  // unreachable from X_P
        }
        ++done;
        worst = std::max(worst, std::abs(r.constraint_residual));
        const double before = aggregated(assemble_correlation(r.X_P).matrix(), m.snapshot.spec);
        const double after = aggregated(r.C.matrix(), m.snapshot.spec);
        if (r.upsilon > 0) {
            ++ups;
            if (after < before) ++bad_direction;
        } else if (r.upsilon < 0) {
            ++downs;
            if (after > before) ++bad_direction;
        }
    }
    return {done == kEconomicInstances && worst <= kEconomicTol && bad_direction == 0,
            std::to_string(done) + " instances (" + std::to_string(ups) + " up, " + std::to_string(downs) +
                " down), max |g| " + fmt(worst) + ", wrong direction " + std::to_string(bad_direction)};
}

// 11 ------------------------------------------------------------------------
Verdict equicorrelation_closed_form() {
    struct Case {
        double variance;
        double expected;
    };
    // sigma = 0.2, w = 0.5: sigma_m^2 = 0.02 (1 + c).
    const Case cases[] = {{0.04, 1.0}, {0.02, 0.0}, {0.03, 0.5}, {0.035, 0.75}, {0.025, 0.25}};
    double worst_ulps = 0.0, worst_res = 0.0;
    for (const Case& c : cases) {
        const MarketSpec spec = market_at(Vector::Constant(2, 0.2), Vector::Constant(2, 0.5), c.variance);
        const EquicorrelationResult r = equicorrelation(spec);
        const double ulp = std::nextafter(std::max(std::abs(c.expected), 0.5), 2.0) - std::max(std::abs(c.expected), 0.5);
        worst_ulps = std::max(worst_ulps, std::abs(r.c_bar - c.expected) / ulp);
        worst_res = std::max(worst_res, abs_residual(r.C, spec));
    }
    return {worst_ulps <= kEquicorrUlps && worst_res <= kEquicorrResidual,
            "max error " + fmt(worst_ulps) + " ulp, max |g| " + fmt(worst_res)};
}

// 12 ------------------------------------------------------------------------
Verdict vg_round_trip() {
    std::mt19937_64 rng(1212);
    double worst_rt = 0.0, worst_var = 0.0;
    int unconverged = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 10;
        VGParams p;
        p.xi = Vector::Zero(n);
        p.omega = uniform_vector(rng, n, 0.1, 0.6);
        p.theta = uniform_vector(rng, n, -0.3, 0.3);
        p.nu = uniform_vector(rng, 1, 0.1, 0.6)(0);
        p.C_dir = assemble_correlation(FactorLoadings(random_loadings(rng, n, 2, 0.95)));
        const CenteredCorrelation c = direct_to_centered_corr(p);
        const Matrix rebuilt = c.sigma.asDiagonal() * c.C_cen.matrix() * c.sigma.asDiagonal();
        worst_rt = std::max(worst_rt, (rebuilt - vg_centered_moments(p).cov).cwiseAbs().maxCoeff());

        const Vector w = random_weights(rng, n);
        const double index_variance = 1.05 * vg_portfolio_variance(p, *p.C_dir, w);
        const MarketSpec spec = market_at(c.sigma, w, index_variance);
        SolverConfig cfg;
        cfg.k = 2;
        const SolverResult r = solve_nicm(*p.C_dir, vg_market_constraint(p, spec), cfg);
        if (!r.converged) ++unconverged;
        worst_var = std::max(worst_var, std::abs(vg_portfolio_variance(p, r.C_star, w) - index_variance));
    }
    return {worst_rt <= kVgRoundTrip && worst_var <= kVgVariance && unconverged == 0,
            "max reconstruction error " + fmt(worst_rt) + ", max centered index variance error " + fmt(worst_var)};
}

// 13 ------------------------------------------------------------------------
std::string directory_bytes(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += fs::relative(f, dir).string() + "\n" + io::read_text(f);
    return all;
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / ("impliedcorr_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    bool snapshots = true, traces = true, tables = true;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const SyntheticMarket a = synthetic(40, 3, 0.1, seed);
        const SyntheticMarket b = synthetic(40, 3, 0.1, seed);
        save_snapshot(a.snapshot, root / "a");
        save_snapshot(b.snapshot, root / "b");
        snapshots = snapshots && directory_bytes(root / "a") == directory_bytes(root / "b");
        SolverConfig cfg;
        cfg.k = 3;
        const SolverResult ra = solve_nicm(CorrMatrix(*a.snapshot.target), a.snapshot.spec, cfg);
        const SolverResult rb = solve_nicm(CorrMatrix(*b.snapshot.target), b.snapshot.spec, cfg);
        traces = traces && ra.fn_trace == rb.fn_trace && ra.X_star.matrix() == rb.X_star.matrix();
    }
    BenchSuite suite = default_bench_suite();
    suite.n = 20;
    suite.instances = 3;
    suite.jobs = 2;
    const std::string first = render_table(run_bench(suite).rows, false);
    const std::string second = render_table(run_bench(suite).rows, false);
    tables = first == second;
    fs::remove_all(root);
    return {snapshots && traces && tables, std::string("snapshots ") + (snapshots ? "identical" : "differ") +
                                               ", traces " + (traces ? "identical" : "differ") + ", bench tables " +
                                               (tables ? "identical" : "differ")};
}

struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "psd-by-construction", psd_by_construction},
        {2, "gradient-suite", gradient_suite},
        {3, "constraint-satisfaction", constraint_satisfaction},
        {4, "oracle-equivalence", oracle_equivalence},
        {5, "monotone-descent", monotone_descent},
        {6, "factor-count-trend", factor_count_trend},
        {7, "iteration-economy", iteration_economy},
        {8, "repair-capability", repair_capability},
        {9, "zero-crp-exactness", zero_crp_exactness},
        {10, "economic-back-substitution", economic_back_substitution},
        {11, "equicorrelation-closed-form", equicorrelation_closed_form},
        {12, "vg-round-trip", vg_round_trip},
        {13, "determinism", determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Verdict v;
        const auto t0 = Clock::now();
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::printf("%s %2d %-28s %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
