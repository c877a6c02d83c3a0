#include "impliedcorr/baselines.hpp"
#include "impliedcorr/corr_core.hpp"
#include "impliedcorr/factor_pricing.hpp"
#include "impliedcorr/harness.hpp"
#include "impliedcorr/nicm_solver.hpp"
#include "impliedcorr/vg_copula.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace icorr;

namespace {

MarketSpec market(const Vector& sigma, const Vector& weights, double variance) {
    return MarketSpec(sigma, {{"market", weights, variance}});
}

py::dict report_dict(const FeasibilityReport& r) {
    py::dict d;
    d["symmetric"] = r.symmetric;
    d["max_asymmetry"] = r.max_asymmetry;
    d["unit_diagonal"] = r.unit_diagonal;
    d["bounded"] = r.bounded;
    d["min_eigenvalue"] = r.min_eigenvalue;
    d["psd"] = r.psd;
    d["mathematically_feasible"] = r.mathematically_feasible();
    d["economically_matched"] = r.economically_matched;
    if (r.constraint_residuals.size() > 0) d["constraint_residuals"] = Vector(r.constraint_residuals);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "C++ core of impliedcorr";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def("assemble_correlation",
          [](const Matrix& x) { return Matrix(assemble_correlation(FactorLoadings(x)).matrix()); },
          py::arg("X"), "C(X) = J o XX' + I");

    m.def("check_feasibility",
          [](const Matrix& c, std::optional<Vector> sigma, std::optional<Vector> weights,
             std::optional<double> variance, double tol) {
              if (sigma && weights && variance) {
                  const MarketSpec spec = market(*sigma, *weights, *variance);
                  return report_dict(check_feasibility(c, &spec, tol));
              }
              if (sigma || weights || variance) {
                  throw ValidationError("check_feasibility: give sigma, weights and variance together");
              }
              return report_dict(check_feasibility(c, nullptr, tol));
          },
          py::arg("C"), py::arg("sigma") = py::none(), py::arg("weights") = py::none(),
          py::arg("variance") = py::none(), py::arg("tol") = 1e-6);

    m.def("constraint_residual",
          [](const Matrix& c, const Vector& sigma, const Vector& weights, double variance) {
              return constraint_residuals(CorrMatrix(c), market(sigma, weights, variance))[0];
          },
          py::arg("C"), py::arg("sigma"), py::arg("weights"), py::arg("variance"));

    m.def("equicorrelation",
          [](const Vector& sigma, const Vector& weights, double variance) {
              const EquicorrelationResult r = equicorrelation(market(sigma, weights, variance));
              py::dict d;
              d["c_bar"] = r.c_bar;
              d["C"] = Matrix(r.C.matrix());
              d["psd_range"] = r.psd_range;
              return d;
          },
          py::arg("sigma"), py::arg("weights"), py::arg("variance"));

    m.def("adjusted_ex_post",
          [](const Matrix& c_p, const Vector& sigma, const Vector& weights, double variance) {
              const AdjustedExPostResult r = adjusted_ex_post(CorrMatrix(c_p), market(sigma, weights, variance));
              py::dict d;
              d["alpha_hat"] = r.alpha_hat;
              d["C_Q"] = Matrix(r.C_Q.matrix());
              d["used_lower_bound"] = r.used_lower_bound;
              d["crp_sign"] = r.crp_sign;
              d["bounded"] = r.bounded;
              return d;
          },
          py::arg("C_P"), py::arg("sigma"), py::arg("weights"), py::arg("variance"));

    m.def("initial_loadings",
          [](const Matrix& a, int k) { return Matrix(initial_loadings(CorrMatrix(a), k).matrix()); },
          py::arg("A"), py::arg("k"));

    m.def("project_feasible",
          [](const Matrix& x, const Vector& sigma, const Vector& weights, double variance) {
              return Matrix(project_feasible(FactorLoadings(x), market(sigma, weights, variance), {}).matrix());
          },
          py::arg("X"), py::arg("sigma"), py::arg("weights"), py::arg("variance"));

    m.def("solve_nicm",
          [](const Matrix& a, const Vector& sigma, const Vector& weights, double variance, int k, double var_tol,
             double fn_tol, const std::string& stop_rule, int max_outer_iter) {
              SolverConfig cfg;
              cfg.k = k;
              cfg.var_tol = var_tol;
              cfg.fn_tol = fn_tol;
              cfg.max_outer_iter = max_outer_iter;
              if (stop_rule == "relative") cfg.stop_rule = StopRule::relative;
              else if (stop_rule != "absolute") throw ValidationError("stop_rule must be 'absolute' or 'relative'");
              SolverResult r;
              {
                  py::gil_scoped_release release;
                  r = solve_nicm(CorrMatrix(a), market(sigma, weights, variance), cfg);
              }
              py::dict d;
              d["X"] = Matrix(r.X_star.matrix());
              d["C"] = Matrix(r.C_star.matrix());
              d["fn"] = r.fn;
              d["fn_start"] = r.fn_start;
              d["fn_trace"] = r.fn_trace;
              d["constraint_residual"] = r.constraint_residual;
              d["outer_iterations"] = r.outer_iterations;
              d["converged"] = r.converged;
              d["message"] = r.message;
              d["wall_time"] = r.wall_time.count();
              return d;
          },
          py::arg("A"), py::arg("sigma"), py::arg("weights"), py::arg("variance"), py::arg("k") = 1,
          py::arg("var_tol") = 1e-6, py::arg("fn_tol") = 1e-3, py::arg("stop_rule") = "absolute",
          py::arg("max_outer_iter") = 200);

    m.def("economic_implied_corr",
          [](const Matrix& x_p, const Vector& sigma, const Vector& weights, double variance, bool orthogonalize) {
              const EconomicResult r =
                  economic_implied_corr(FactorLoadings(x_p), market(sigma, weights, variance), orthogonalize);
              py::dict d;
              d["alpha_tilde"] = r.alpha_tilde;
              d["upsilon"] = r.upsilon;
              d["X_P"] = Matrix(r.X_P.matrix());
              d["X_Q"] = Matrix(r.X_Q.matrix());
              d["C"] = Matrix(r.C.matrix());
              d["constraint_residual"] = r.constraint_residual;
              d["warnings"] = r.warnings;
              return d;
          },
          py::arg("X_P"), py::arg("sigma"), py::arg("weights"), py::arg("variance"),
          py::arg("orthogonalize") = true);

    m.def("direct_to_centered_corr",
          [](const Vector& omega, const Vector& theta, double nu, const Matrix& c_dir, std::optional<Vector> xi) {
              VGParams p;
              p.omega = omega;
              p.theta = theta;
              p.nu = nu;
              p.xi = xi ? *xi : Vector::Zero(omega.size()).eval();
              p.C_dir = CorrMatrix(c_dir);
              const CenteredCorrelation c = direct_to_centered_corr(p);
              py::dict d;
              d["sigma"] = c.sigma;
              d["C_cen"] = Matrix(c.C_cen.matrix());
              return d;
          },
          py::arg("omega"), py::arg("theta"), py::arg("nu"), py::arg("C_dir"), py::arg("xi") = py::none());

    m.def("vg_market_constraint",
          [](const Vector& omega, const Vector& theta, double nu, const Vector& weights, double variance) {
              VGParams p;
              p.omega = omega;
              p.theta = theta;
              p.nu = nu;
              p.xi = Vector::Zero(omega.size());
              const MarketSpec adjusted = vg_market_constraint(p, market(omega, weights, variance));
              py::dict d;
              d["sigma"] = adjusted.sigma();
              d["variance"] = adjusted.constraint(0).variance;
              return d;
          },
          py::arg("omega"), py::arg("theta"), py::arg("nu"), py::arg("weights"), py::arg("variance"));

    m.def("generate_synthetic_market",
          [](Index n, int k_true, double crp, std::uint64_t seed, Index returns_length) {
              const SyntheticMarket s = generate_synthetic_market({n, k_true, crp, seed, returns_length});
              const auto& c = s.snapshot.spec.constraint(0);
              py::dict d;
              d["sigma"] = s.snapshot.spec.sigma();
              d["weights"] = c.weights;
              d["variance"] = c.variance;
              d["target"] = *s.snapshot.target;
              d["truth"] = Matrix(s.ground_truth.matrix());
              d["true_loadings"] = Matrix(s.true_loadings.matrix());
              d["asset_returns"] = *s.snapshot.asset_returns;
              d["factor_returns"] = *s.snapshot.factor_returns;
              d["clipped"] = s.clipped;
              return d;
          },
          py::arg("n"), py::arg("k_true") = 3, py::arg("crp") = 0.0, py::arg("seed") = 0,
          py::arg("returns_length") = 252);
}
