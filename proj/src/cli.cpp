#include "impliedcorr/cli.hpp"

#include "impliedcorr/baselines.hpp"
#include "impliedcorr/corr_core.hpp"
#include "impliedcorr/factor_pricing.hpp"
#include "impliedcorr/harness.hpp"
#include "impliedcorr/io.hpp"
#include "impliedcorr/nicm_solver.hpp"
#include "impliedcorr/vg_copula.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <functional>
#include <optional>

namespace icorr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
    std::string config;
    std::uint64_t seed = 0;
    double tol_var = 1e-6;
    double tol_fn = 1e-3;
    std::string stop_rule;
    std::string out_dir;
    std::string format = "json";
    CLI::Option* seed_opt = nullptr;
    CLI::Option* tol_var_opt = nullptr;
    CLI::Option* tol_fn_opt = nullptr;
    CLI::Option* format_opt = nullptr;
};

/// Result of a subcommand: payload for stdout plus the exit code it implies.
struct Outcome {
    Outcome() = default;
    Outcome(json p) : payload(std::move(p)) {}

    json payload;
    int code = kExitOk;
    std::optional<std::string> text;  ///< printed instead of payload when set
};

std::optional<std::uint64_t> resolve_seed(const Globals& g) {
    if (g.seed_opt->count() > 0) return g.seed;
    const char* env = std::getenv("IMPLIEDCORR_SEED");
    if (!env || !*env) return std::nullopt;
    std::uint64_t value = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError("IMPLIEDCORR_SEED='" + std::string(s) + "' is not a non-negative integer");
    }
    return value;
}

SolverConfig solver_config(const Globals& g, std::optional<int> k) {
    SolverConfig c;
    if (!g.config.empty()) {
        const json j = io::read_json(g.config);
        c = io::config_from_json(j.is_object() && j.contains("solver") ? j.at("solver") : j);
    }
    if (g.tol_var_opt->count() > 0) c.var_tol = g.tol_var;
    if (g.tol_fn_opt->count() > 0) c.fn_tol = g.tol_fn;
    if (g.stop_rule == "relative") c.stop_rule = StopRule::relative;
    if (g.stop_rule == "absolute") c.stop_rule = StopRule::absolute;
    if (k) c.k = *k;
    c.validate();
    return c;
}

std::optional<fs::path> out_dir(const Globals& g) {
    if (g.out_dir.empty()) return std::nullopt;
    return fs::path(g.out_dir);
}

std::vector<std::string> factor_names(Index k) {
    std::vector<std::string> names;
    for (Index d = 0; d < k; ++d) names.push_back("factor" + std::to_string(d + 1));
    return names;
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return io::format_double(v.get<double>());
    return v.dump();
}

std::string to_csv(const json& payload) {
    std::string out = "key,value\n";
    for (const auto& [key, value] : payload.items()) {
        if (value.is_object()) {
            for (const auto& [sub, sv] : value.items()) {
                if (sv.is_structured()) continue;
                out += key + "." + sub + "," + scalar_text(sv) + "\n";
            }
        } else if (value.is_array()) {
            out += key;
            for (const auto& e : value) out += "," + scalar_text(e);
            out += "\n";
        } else {
            out += key + "," + scalar_text(value) + "\n";
        }
    }
    return out;
}

struct Inputs {
    MarketSpec spec;
    std::optional<MarketSnapshot> snapshot;
};

Inputs load_market(const std::string& market, const std::string& snapshot) {
    Inputs in;
    if (!snapshot.empty()) {
        in.snapshot = load_snapshot(snapshot);
        in.spec = in.snapshot->spec;
        if (!market.empty()) in.spec = io::read_market(market);
    } else if (!market.empty()) {
        in.spec = io::read_market(market);
    } else {
        throw ValidationError("either --market or --snapshot is required");
    }
    return in;
}

CorrMatrix square_matrix(const std::string& path, Index n) {
    const Matrix m = io::read_matrix_csv(path);
    if (m.rows() != m.cols()) throw ValidationError(path + " is not square");
    if (m.rows() != n) {
        throw ValidationError(path + " is " + std::to_string(m.rows()) + " x " + std::to_string(m.cols()) +
                              " but the market has " + std::to_string(n) + " assets");
    }
    return CorrMatrix(m);
}

json solve_and_report(const CorrMatrix& target, const MarketSpec& spec, const SolverConfig& cfg,
                      const std::optional<fs::path>& dir, int& code) {
    const SolverResult r = solve_nicm(target, spec, cfg);
    const FeasibilityReport rep = check_feasibility(r.C_star, &spec, cfg.var_tol);
    json j = io::to_json(r);
    j["report"] = io::to_json(rep);
    if (dir) {
        io::write_matrix_csv(*dir / "C_star.csv", r.C_star.matrix());
        io::write_labeled_csv(*dir / "X_star.csv", {factor_names(r.X_star.k()), r.X_star.matrix()});
        io::write_json(*dir / "result.json", j);
    }
    if (!r.converged) code = kExitConvergence;
    return j;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const ConvergenceError*>(&e)) return kExitConvergence;
    if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kExitIo;
    return kExitValidation;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Implied correlation matrices: feasibility checks, closed-form baselines, "
                 "nearest implied correlation solver, economic approach and benchmarks",
                 "impliedcorr"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "Solver configuration JSON");
    g.seed_opt = app.add_option("--seed", g.seed, "Random seed (falls back to IMPLIEDCORR_SEED)");
    g.tol_var_opt = app.add_option("--tol-var", g.tol_var, "Market constraint tolerance")->capture_default_str();
    g.tol_fn_opt = app.add_option("--tol-fn", g.tol_fn, "Objective improvement tolerance")->capture_default_str();
    app.add_option("--stop-rule", g.stop_rule, "Objective stop rule")
        ->check(CLI::IsMember({"absolute", "relative"}));
    app.add_option("--out-dir", g.out_dir, "Directory for output files");
    g.format_opt = app.add_option("--format", g.format, "Output format")
                       ->check(CLI::IsMember({"json", "csv"}))
                       ->capture_default_str();

    std::function<Outcome()> action;

    // check
    auto* check = app.add_subcommand("check", "Feasibility report for a correlation matrix");
    std::string check_matrix, check_market;
    check->add_option("--matrix", check_matrix, "Matrix CSV")->required();
    check->add_option("--market", check_market, "Market JSON");
    check->callback([&] {
        action = [&]() -> Outcome {
            const Matrix m = io::read_matrix_csv(check_matrix);
            std::optional<MarketSpec> spec;
            if (!check_market.empty()) spec = io::read_market(check_market);
            const FeasibilityReport rep = check_feasibility(m, spec ? &*spec : nullptr, g.tol_var);
            return {io::to_json(rep)};
        };
    });

    // equicorr
    auto* equi = app.add_subcommand("equicorr", "Equicorrelation matrix matching the index variance");
    std::string equi_market;
    equi->add_option("--market", equi_market, "Market JSON")->required();
    equi->callback([&] {
        action = [&]() -> Outcome {
            const MarketSpec spec = io::read_market(equi_market);
            const EquicorrelationResult r = equicorrelation(spec);
            if (auto dir = out_dir(g)) io::write_matrix_csv(*dir / "equicorr.csv", r.C.matrix());
            return {{{"c_bar", r.c_bar},
                     {"psd_range", r.psd_range},
                     {"constraint_residual", constraint_residuals(r.C, spec)[0]}}};
        };
    });

    // adjust
    auto* adjust = app.add_subcommand("adjust", "Adjusted ex-post blend of a prior matrix");
    std::string adj_market, adj_prior;
    adjust->add_option("--market", adj_market, "Market JSON")->required();
    adjust->add_option("--prior", adj_prior, "Prior (ex-post) correlation CSV")->required();
    adjust->callback([&] {
        action = [&]() -> Outcome {
            const MarketSpec spec = io::read_market(adj_market);
            const AdjustedExPostResult r = adjusted_ex_post(square_matrix(adj_prior, spec.n()), spec);
            if (auto dir = out_dir(g)) io::write_matrix_csv(*dir / "adjusted.csv", r.C_Q.matrix());
            return {{{"alpha_hat", r.alpha_hat},
                     {"crp_sign", r.crp_sign},
                     {"used_lower_bound", r.used_lower_bound},
                     {"bounded", r.bounded},
                     {"psd_weighted_average", is_psd_weighted_average(r.alpha_hat)},
                     {"min_eigenvalue", min_eigenvalue(r.C_Q.matrix())},
                     {"constraint_residual", constraint_residuals(r.C_Q, spec)[0]}}};
        };
    });

    // nearest
    auto* nearest = app.add_subcommand("nearest", "Nearest implied correlation matrix to a target");
    std::string near_market, near_snapshot, near_target;
    int near_k = 0;
    nearest->add_option("--market", near_market, "Market JSON");
    nearest->add_option("--snapshot", near_snapshot, "Snapshot manifest");
    nearest->add_option("--target", near_target, "Target matrix CSV (defaults to the snapshot target)");
    auto* near_k_opt = nearest->add_option("-k,--factors", near_k, "Number of factors");
    nearest->callback([&] {
        action = [&]() -> Outcome {
            const Inputs in = load_market(near_market, near_snapshot);
            CorrMatrix target;
            if (!near_target.empty()) {
                target = square_matrix(near_target, in.spec.n());
            } else if (in.snapshot && in.snapshot->target) {
                target = CorrMatrix(*in.snapshot->target);
            } else {
                throw ValidationError("nearest needs --target or a snapshot with a target matrix");
            }
            const SolverConfig cfg = solver_config(g, near_k_opt->count() ? std::optional<int>(near_k) : std::nullopt);
            Outcome o;
            o.payload = solve_and_report(target, in.spec, cfg, out_dir(g), o.code);
            return o;
        };
    });

    // repair
    auto* repair = app.add_subcommand("repair", "Nearest implied correlation matrix to a prior model's output");
    std::string rep_market, rep_snapshot, rep_prior, rep_target;
    int rep_k = 0;
    repair->add_option("--market", rep_market, "Market JSON");
    repair->add_option("--snapshot", rep_snapshot, "Snapshot manifest");
    auto* rep_prior_opt = repair->add_option("--prior", rep_prior, "Ex-post matrix; repaired through the adjusted ex-post model");
    repair->add_option("--target", rep_target, "A prior model's output matrix")->excludes(rep_prior_opt);
    auto* rep_k_opt = repair->add_option("-k,--factors", rep_k, "Number of factors");
    repair->callback([&] {
        action = [&]() -> Outcome {
            const Inputs in = load_market(rep_market, rep_snapshot);
            json prior_info;
            CorrMatrix target;
            if (!rep_target.empty()) {
                target = square_matrix(rep_target, in.spec.n());
                prior_info = {{"source", rep_target}};
            } else {
                CorrMatrix base;
                if (!rep_prior.empty()) base = square_matrix(rep_prior, in.spec.n());
                else if (in.snapshot && in.snapshot->target) base = CorrMatrix(*in.snapshot->target);
                else throw ValidationError("repair needs --target, --prior or a snapshot with a target matrix");
                const AdjustedExPostResult adj = adjusted_ex_post(base, in.spec);
                target = adj.C_Q;
                prior_info = {{"source", "adjusted"},
                              {"alpha_hat", adj.alpha_hat},
                              {"used_lower_bound", adj.used_lower_bound}};
            }
            const FeasibilityReport before = check_feasibility(target, &in.spec, g.tol_var);
            prior_info["report"] = io::to_json(before);
            const SolverConfig cfg = solver_config(g, rep_k_opt->count() ? std::optional<int>(rep_k) : std::nullopt);
            Outcome o;
            o.payload = solve_and_report(target, in.spec, cfg, out_dir(g), o.code);
            o.payload["prior"] = prior_info;
            return o;
        };
    });

    // economic
    auto* econ = app.add_subcommand("economic", "Economic approach from physical factor loadings");
    std::string econ_market, econ_snapshot, econ_loadings;
    int econ_factors = 0;
    Index econ_window = 0;
    bool econ_raw = false;
    econ->add_option("--market", econ_market, "Market JSON");
    econ->add_option("--snapshot", econ_snapshot, "Snapshot manifest with return series");
    econ->add_option("--loadings", econ_loadings, "X_P CSV with a factor-name header");
    econ->add_option("--factors", econ_factors, "Use the first k factor series of the snapshot");
    econ->add_option("--window", econ_window, "Trailing return window for X_P estimation");
    econ->add_flag("--no-orthogonalize", econ_raw, "Use X_P as given");
    econ->callback([&] {
        action = [&]() -> Outcome {
            const Inputs in = load_market(econ_market, econ_snapshot);
            FactorLoadings x_p;
            std::vector<std::string> names;
            if (!econ_loadings.empty()) {
                io::LabeledMatrix lm = io::read_labeled_csv(econ_loadings);
                if (lm.values.rows() != in.spec.n()) {
                    throw ValidationError(econ_loadings + " has " + std::to_string(lm.values.rows()) +
                                          " rows but the market has " + std::to_string(in.spec.n()) + " assets");
                }
                names = lm.columns;
                x_p = FactorLoadings(lm.values);
            } else if (in.snapshot && in.snapshot->asset_returns && in.snapshot->factor_returns) {
                const Matrix& f = *in.snapshot->factor_returns;
                const Index k = econ_factors > 0 ? econ_factors : f.cols();
                if (k > f.cols()) throw ValidationError("--factors exceeds the snapshot's factor series");
                x_p = estimate_factor_correlations(*in.snapshot->asset_returns, f.leftCols(k), econ_window);
                names.assign(in.snapshot->factor_names.begin(), in.snapshot->factor_names.begin() + k);
            } else {
                throw ValidationError("economic needs --loadings or a snapshot with return series");
            }
            const EconomicResult r = economic_implied_corr(x_p, in.spec, !econ_raw);
            json j = io::to_json(r);
            j["report"] = io::to_json(check_feasibility(r.C, &in.spec, g.tol_var));
            if (auto dir = out_dir(g)) {
                io::write_matrix_csv(*dir / "economic.csv", r.C.matrix());
                io::write_labeled_csv(*dir / "X_Q.csv", {names, r.X_Q.matrix()});
                io::write_json(*dir / "economic.json", j);
            }
            return {j};
        };
    });

    // vg-convert
    auto* vg = app.add_subcommand("vg-convert", "Variance-gamma direct to centered correlation");
    std::string vg_params, vg_market;
    vg->add_option("--params", vg_params, "VG parameter JSON")->required();
    vg->add_option("--market", vg_market, "Market JSON to rewrite for an unknown C_dir");
    vg->callback([&] {
        action = [&]() -> Outcome {
            const VGParams p = io::read_vg_params(vg_params);
            const auto dir = out_dir(g);
            json j = json::object();
            if (p.C_dir) {
                const CenteredCorrelation c = direct_to_centered_corr(p);
                j["sigma"] = io::vector_to_json(c.sigma);
                j["min_eigenvalue"] = min_eigenvalue(c.C_cen.matrix());
                if (dir) io::write_matrix_csv(*dir / "C_cen.csv", c.C_cen.matrix());
            }
            if (!vg_market.empty()) {
                const MarketSpec adjusted = vg_market_constraint(p, io::read_market(vg_market));
                j["market"] = io::to_json(adjusted);
                if (dir) io::write_market(*dir / "vg_market.json", adjusted);
            }
            if (j.empty()) throw ValidationError("vg-convert needs C_dir in the parameters or --market");
            return {j};
        };
    });

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic market snapshot");
    SyntheticOptions so;
    synth->add_option("--n", so.n, "Number of assets")->capture_default_str();
    synth->add_option("--k-true", so.k_true, "Number of simulated factors")->capture_default_str();
    synth->add_option("--crp", so.crp, "Correlation risk premium")->capture_default_str();
    synth->add_option("--length", so.returns_length, "Return periods")->capture_default_str();
    synth->callback([&] {
        action = [&]() -> Outcome {
            const auto dir = out_dir(g);
            if (!dir) throw ValidationError("synth needs --out-dir");
            so.seed = resolve_seed(g).value_or(0);
            const SyntheticMarket m = generate_synthetic_market(so);
            const fs::path manifest = save_snapshot(m.snapshot, *dir);
            io::write_matrix_csv(*dir / "truth.csv", m.ground_truth.matrix());
            io::write_labeled_csv(*dir / "true_loadings.csv",
                                  {factor_names(m.true_loadings.k()), m.true_loadings.matrix()});
            return {{{"manifest", manifest.string()},
                     {"seed", so.seed},
                     {"n", so.n},
                     {"index_variance", m.snapshot.spec.constraint(0).variance},
                     {"clipped", m.clipped},
                     {"warnings", m.warnings}}};
        };
    });

    // bench
    auto* bench = app.add_subcommand("bench", "Benchmark suite over synthetic markets");
    std::string bench_suite;
    int bench_jobs = 0;
    bool no_timings = false;
    bench->add_option("--suite", bench_suite, "Suite JSON (defaults to a built-in desk-scale suite)");
    bench->add_option("--jobs", bench_jobs, "Concurrent runs");
    bench->add_flag("--no-timings", no_timings, "Omit timing columns from the table");
    bench->callback([&] {
        action = [&]() -> Outcome {
            const SolverConfig cfg = solver_config(g, std::nullopt);
            BenchSuite suite;
            if (!bench_suite.empty()) {
                suite = suite_from_json(io::read_json(bench_suite), cfg);
                if (g.tol_var_opt->count()) suite.solver.var_tol = g.tol_var;
                if (g.tol_fn_opt->count()) suite.solver.fn_tol = g.tol_fn;
                if (!g.stop_rule.empty()) suite.solver.stop_rule = cfg.stop_rule;
            } else {
                suite = default_bench_suite();
                suite.solver = cfg;
            }
            if (auto s = resolve_seed(g)) suite.seed = *s;
            if (bench_jobs > 0) suite.jobs = bench_jobs;
            const auto dir = out_dir(g);
            fs::path artifacts;
            if (dir) artifacts = *dir;
            const BenchReport report = run_bench(suite, dir ? &artifacts : nullptr);
            const std::string table = render_table(report.rows, !no_timings);
            const std::string csv = render_csv(report.rows, !no_timings);
            if (dir) {
                io::write_text(*dir / "table.txt", table);
                io::write_text(*dir / "bench.csv", csv);
                io::write_json(*dir / "suite.json", to_json(suite));
            }
            Outcome o;
            if (g.format_opt->count() == 0) o.text = table;
            else if (g.format == "csv") o.text = csv;
            else {
                json rows = json::array();
                for (std::size_t i = 0; i < report.rows.size(); ++i) {
                    const auto& r = report.rows[i];
                    rows.push_back({{"model", r.model}, {"k", r.k}, {"target", r.target}, {"runs", r.runs},
                                    {"failures", r.failures}, {"unconverged", r.unconverged},
                                    {"fn_mean", r.fn_mean}, {"fn_sd", r.fn_sd}, {"vtol_mean", r.vtol_mean},
                                    {"vtol_max", r.vtol_max}, {"iter_mean", r.iter_mean},
                                    {"iter_sd", r.iter_sd}});
                    if (!no_timings) {
                        rows.back()["t_mean"] = r.t_mean;
                        rows.back()["t_sd"] = r.t_sd;
                    }
                    if (r.alpha_mean) {
                        rows.back()["alpha_mean"] = *r.alpha_mean;
                        rows.back()["alpha_sd"] = *r.alpha_sd;
                    }
                }
                o.payload = {{"rows", rows}};
            }
            return o;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    try {
        const Outcome o = action();
        if (o.text) out << *o.text;
        else if (g.format == "csv") out << to_csv(o.payload);
        else out << o.payload.dump(2) << "\n";
        if (o.code == kExitConvergence) err << "warning: solver did not converge\n";
        return o.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"impliedcorr"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace icorr
