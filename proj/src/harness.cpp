#include "impliedcorr/harness.hpp"

#include "impliedcorr/baselines.hpp"
#include "impliedcorr/corr_core.hpp"
#include "impliedcorr/factor_pricing.hpp"
#include "impliedcorr/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <thread>

namespace icorr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string manifest_file(const json& m, const char* key, const fs::path& base) {
    const json& v = m.at(key);
    if (!v.is_string()) throw ValidationError(std::string("manifest: '") + key + "' must be a file name");
    return (base / v.get<std::string>()).string();
}

void require_cols(const Matrix& m, Index n, const std::string& file, const std::string& market_file) {
    if (m.cols() != n) {
        throw ValidationError(file + " has " + std::to_string(m.cols()) + " columns but " + market_file +
                              " lists " + std::to_string(n) + " assets");
    }
}

Matrix trailing(const Matrix& returns, Index window, const char* who) {
    if (window < 0 || window > returns.rows()) {
        throw ValidationError(std::string(who) + ": insufficient data, window " + std::to_string(window) +
                              " exceeds " + std::to_string(returns.rows()) + " observations");
    }
    const Index rows = window == 0 ? returns.rows() : window;
    if (rows < 2) throw ValidationError(std::string(who) + ": insufficient data, need at least two observations");
    return returns.bottomRows(rows);
}

Matrix demeaned(const Matrix& r) {
    return r.rowwise() - r.colwise().mean();
}

double sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return kNaN;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double frob_sq(const Matrix& a, const Matrix& b) {
    return (a - b).squaredNorm();
}

std::uint64_t mix_seed(std::uint64_t s) {
    // splitmix64 finalizer
    s += 0x9E3779B97F4A7C15ULL;
    s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9ULL;
    s = (s ^ (s >> 27)) * 0x94D049BB133111EBULL;
    return s ^ (s >> 31);
}

const std::vector<std::string> kModels = {"nicm", "repair", "equicorrelation", "adjusted", "economic", "reference"};
const std::vector<std::string> kTargets = {"historical", "mean-reverting", "truth"};

void validate_cell(const BenchCell& c, int k_true) {
    if (std::find(kModels.begin(), kModels.end(), c.model) == kModels.end()) {
        throw ValidationError("bench: unknown model '" + c.model + "'");
    }
    if (std::find(kTargets.begin(), kTargets.end(), c.target) == kTargets.end()) {
        throw ValidationError("bench: unknown target '" + c.target + "'");
    }
    if (c.k < 1) throw ValidationError("bench: k must be at least 1");
    if (c.model == "economic" && c.k > k_true) {
        throw ValidationError("bench: economic cell uses " + std::to_string(c.k) + " factors but only " +
                              std::to_string(k_true) + " are simulated");
    }
}

struct Instance {
    std::uint64_t seed = 0;
    SyntheticMarket market;
    CorrMatrix historical;
    CorrMatrix mean_reverting;
};

Instance make_instance(const BenchSuite& s, int i) {
    Instance inst;
    inst.seed = s.seed + static_cast<std::uint64_t>(i);
    inst.market = generate_synthetic_market({s.n, s.k_true, s.crp, inst.seed, s.returns_length});
    const Matrix& r = *inst.market.snapshot.asset_returns;
    inst.historical = CorrMatrix(*inst.market.snapshot.target);
    inst.mean_reverting = estimate_target_matrix(
        r, {TargetMode::mean_reverting, s.short_window, 0.0, 0.4, mix_seed(inst.seed)});
    return inst;
}

const CorrMatrix& pick_target(const Instance& inst, const std::string& target) {
    if (target == "historical") return inst.historical;
    if (target == "mean-reverting") return inst.mean_reverting;
    return inst.market.ground_truth;
}

using Clock = std::chrono::steady_clock;

RunRecord run_one(const BenchSuite& s, std::size_t cell_index, const Instance& inst, int instance) {
    const BenchCell& cell = s.cells[cell_index];
    RunRecord rec;
    rec.cell = cell_index;
    rec.instance = instance;
    rec.seed = inst.seed;
    try {
        const MarketSpec& spec = inst.market.snapshot.spec;
        const CorrMatrix& a = pick_target(inst, cell.target);
        SolverConfig cfg = s.solver;
        cfg.k = cell.k;

        Matrix c;
        Matrix reference = a.matrix();
        rec.converged = true;
        if (cell.model == "nicm" || cell.model == "repair" || cell.model == "reference") {
            CorrMatrix goal = a;
            if (cell.model == "repair") {
                const AdjustedExPostResult prior = adjusted_ex_post(a, spec);
                rec.alpha = prior.alpha_hat;
                goal = prior.C_Q;
                reference = goal.matrix();
            }
            const auto t0 = Clock::now();
            const SolverResult r = cell.model == "reference" ? reference_solve(goal, spec, cell.k, cfg)
                                                             : solve_nicm(goal, spec, cfg);
            rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            rec.iterations = r.outer_iterations;
            rec.converged = r.converged;
            c = r.C_star.matrix();
        } else if (cell.model == "equicorrelation") {
            const auto t0 = Clock::now();
            const EquicorrelationResult r = equicorrelation(spec);
            rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            c = r.C.matrix();
        } else if (cell.model == "adjusted") {
            const auto t0 = Clock::now();
            const AdjustedExPostResult r = adjusted_ex_post(a, spec);
            rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            rec.alpha = r.alpha_hat;
            c = r.C_Q.matrix();
        } else {
            const auto& snap = inst.market.snapshot;
            const FactorLoadings x_p =
                estimate_factor_correlations(*snap.asset_returns, snap.factor_returns->leftCols(cell.k));
            const auto t0 = Clock::now();
            const EconomicResult r = economic_implied_corr(x_p, spec);
            rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            rec.alpha = r.alpha_tilde;
            c = r.C.matrix();
        }
        const CorrMatrix out(c);
        rec.fn = frob_sq(c, reference);
        rec.v_tol = std::abs(constraint_residuals(out, spec)[0]);
        rec.psd = min_eigenvalue(c) >= -kPsdEps;
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.converged = false;
        rec.error = e.what();
    }
    return rec;
}

fs::path artifact_path(const fs::path& dir, const RunRecord& r) {
    char name[64];
    std::snprintf(name, sizeof name, "cell%03zu_inst%04d.json", r.cell, r.instance);
    return dir / "runs" / name;
}

double json_number(const json& j) {
    return j.is_null() ? kNaN : j.get<double>();
}

std::string fmt(const char* spec, double x, bool precise = false) {
    if (!std::isfinite(x)) return "NA";
    if (precise) return io::format_double(x);
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::vector<std::vector<std::string>> row_cells(const std::vector<BenchRow>& rows, bool timings,
                                                bool precise, std::vector<std::string>& header) {
    auto num = [precise](const char* spec, double x) { return fmt(spec, x, precise); };
    header = {"model", "k", "target", "runs", "failed"};
    if (timings) header.insert(header.end(), {"t.mean", "t.sd"});
    header.insert(header.end(), {"fn.mean", "fn.sd", "|v.tol|.mean", "|v.tol|.max", "iter.mean", "iter.sd",
                                 "alpha.mean", "alpha.sd"});
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows) {
        std::vector<std::string> cells = {r.model, std::to_string(r.k), r.target, std::to_string(r.runs),
                                          std::to_string(r.failures)};
        if (timings) cells.insert(cells.end(), {num("%.4g", r.t_mean), num("%.4g", r.t_sd)});
        cells.insert(cells.end(), {num("%.6g", r.fn_mean), num("%.6g", r.fn_sd), num("%.3e", r.vtol_mean),
                                   num("%.3e", r.vtol_max), num("%.3f", r.iter_mean), num("%.3f", r.iter_sd),
                                   num("%.6f", r.alpha_mean.value_or(kNaN)),
                                   num("%.6f", r.alpha_sd.value_or(kNaN))});
        out.push_back(std::move(cells));
    }
    return out;
}

}  // namespace

// Snapshots -------------------------------------------------------------------

MarketSnapshot load_snapshot(const fs::path& manifest_path, int schema_version) {
    const json m = io::read_json(manifest_path);
    if (!m.is_object() || !m.contains("schema_version") || !m.at("schema_version").is_number_integer()) {
        throw ValidationError(manifest_path.string() + ": missing integer schema_version");
    }
    if (m.at("schema_version").get<int>() != schema_version) {
        throw ValidationError(manifest_path.string() + ": schema_version " +
                              std::to_string(m.at("schema_version").get<int>()) + " is not supported (expected " +
                              std::to_string(schema_version) + ")");
    }
    if (!m.contains("market")) throw ValidationError(manifest_path.string() + ": missing 'market'");
    const fs::path base = manifest_path.parent_path();

    MarketSnapshot s;
    s.date = m.value("date", std::string());
    const std::string market_file = manifest_file(m, "market", base);
    s.spec = io::read_market(market_file);
    const Index n = s.spec.n();

    if (m.contains("target") && !m.at("target").is_null()) {
        const std::string f = manifest_file(m, "target", base);
        Matrix t = io::read_matrix_csv(f);
        if (t.rows() != t.cols()) throw ValidationError(f + " is not square");
        require_cols(t, n, f, market_file);
        s.target = std::move(t);
    }
    if (m.contains("asset_returns") && !m.at("asset_returns").is_null()) {
        const std::string f = manifest_file(m, "asset_returns", base);
        Matrix r = io::read_matrix_csv(f);
        require_cols(r, n, f, market_file);
        s.asset_returns = std::move(r);
    }
    if (m.contains("factor_returns") && !m.at("factor_returns").is_null()) {
        const std::string f = manifest_file(m, "factor_returns", base);
        io::LabeledMatrix fr = io::read_labeled_csv(f);
        if (s.asset_returns && fr.values.rows() != s.asset_returns->rows()) {
            throw ValidationError(f + " has " + std::to_string(fr.values.rows()) + " rows but " +
                                  manifest_file(m, "asset_returns", base) + " has " +
                                  std::to_string(s.asset_returns->rows()));
        }
        s.factor_names = std::move(fr.columns);
        s.factor_returns = std::move(fr.values);
    }
    return s;
}

fs::path save_snapshot(const MarketSnapshot& s, const fs::path& dir) {
    fs::create_directories(dir);
    json m = {{"schema_version", kSnapshotSchemaVersion}, {"date", s.date}, {"market", "market.json"}};
    io::write_market(dir / "market.json", s.spec);
    if (s.target) {
        io::write_matrix_csv(dir / "target.csv", *s.target);
        m["target"] = "target.csv";
    }
    if (s.asset_returns) {
        io::write_matrix_csv(dir / "asset_returns.csv", *s.asset_returns);
        m["asset_returns"] = "asset_returns.csv";
    }
    if (s.factor_returns) {
        std::vector<std::string> names = s.factor_names;
        for (Index d = static_cast<Index>(names.size()); d < s.factor_returns->cols(); ++d) {
            names.push_back("factor" + std::to_string(d + 1));
        }
        io::write_labeled_csv(dir / "factor_returns.csv", {names, *s.factor_returns});
        m["factor_returns"] = "factor_returns.csv";
    }
    const fs::path manifest = dir / "manifest.json";
    io::write_json(manifest, m);
    return manifest;
}

// Estimation ------------------------------------------------------------------

Matrix pearson_correlation(const Matrix& returns) {
    if (returns.rows() < 2) throw ValidationError("pearson_correlation: insufficient data");
    const Matrix d = demeaned(returns);
    const Vector sd = d.colwise().norm();
    for (Index i = 0; i < sd.size(); ++i) {
        if (!(sd(i) > 0.0)) {
            const Index other = i == 0 ? 1 : 0;
            throw ValidationError("correlation of series " + std::to_string(i) + " and " + std::to_string(other) +
                                  " undefined: series " + std::to_string(i) + " has zero variance");
        }
    }
    const Vector inv = sd.cwiseInverse();
    Matrix c = inv.asDiagonal() * (d.transpose() * d) * inv.asDiagonal();
    c = (0.5 * (c + c.transpose())).eval();
    c = c.cwiseMax(-1.0).cwiseMin(1.0);
    c.diagonal().setOnes();
    return c;
}

CorrMatrix estimate_target_matrix(const Matrix& returns, const TargetOptions& o) {
    const Matrix window = trailing(returns, o.window, "estimate_target_matrix");
    Matrix c = pearson_correlation(window);
    if (o.mode == TargetMode::mean_reverting) {
        if (!(o.theta_lo <= o.theta_hi) || o.theta_lo < 0.0 || o.theta_hi > 1.0) {
            throw ValidationError("estimate_target_matrix: theta range must satisfy 0 <= lo <= hi <= 1");
        }
        const Matrix full = pearson_correlation(returns);
        std::mt19937_64 rng(o.seed);
        std::uniform_real_distribution<double> theta(o.theta_lo, o.theta_hi);
        for (Index i = 0; i < c.rows(); ++i) {
            for (Index j = i + 1; j < c.cols(); ++j) {
                const double t = theta(rng);
                c(i, j) = c(j, i) = t * c(i, j) + (1.0 - t) * full(i, j);
            }
        }
    }
    return CorrMatrix(c);
}

FactorLoadings estimate_factor_correlations(const Matrix& asset_returns, const Matrix& factor_returns,
                                            Index window) {
    if (asset_returns.rows() != factor_returns.rows()) {
        throw ValidationError("estimate_factor_correlations: asset and factor series have different lengths");
    }
    const Matrix a = demeaned(trailing(asset_returns, window, "estimate_factor_correlations"));
    const Matrix f = demeaned(trailing(factor_returns, window, "estimate_factor_correlations"));
    const Vector sa = a.colwise().norm();
    const Vector sf = f.colwise().norm();
    for (Index i = 0; i < sa.size(); ++i) {
        if (!(sa(i) > 0.0)) throw ValidationError("asset series " + std::to_string(i) + " has zero variance");
    }
    for (Index d = 0; d < sf.size(); ++d) {
        if (!(sf(d) > 0.0)) throw ValidationError("factor series " + std::to_string(d) + " has zero variance");
    }
    Matrix x = sa.cwiseInverse().asDiagonal() * (a.transpose() * f) * sf.cwiseInverse().asDiagonal();
    return FactorLoadings(x.cwiseMax(-1.0).cwiseMin(1.0));
}

// Synthetic markets -------------------------------------------------------------

SyntheticMarket generate_synthetic_market(const SyntheticOptions& o) {
    if (o.n < 2) throw ValidationError("generate_synthetic_market: n must be at least 2");
    if (o.k_true < 1) throw ValidationError("generate_synthetic_market: k_true must be at least 1");
    if (o.returns_length < 2) throw ValidationError("generate_synthetic_market: need at least two return periods");
    if (!(o.crp > -1.0)) throw ValidationError("generate_synthetic_market: crp must exceed -1");

    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index n = o.n;
    const Index k = o.k_true;

    // Each row: radius r, a dominant market share c on factor 1, the rest
    // spread over the other factors in a random direction.
    Matrix x = Matrix::Zero(n, k);
    for (Index i = 0; i < n; ++i) {
        const double radius = 0.3 + 0.65 * unit(rng);
        const double share = 0.6 + 0.35 * unit(rng);
        x(i, 0) = radius * share;
        if (k > 1) {
            Vector dir(k - 1);
            for (Index d = 0; d < k - 1; ++d) dir(d) = normal(rng);
            const double norm = dir.norm();
            if (norm > 0.0) {
                x.row(i).tail(k - 1) = (radius * std::sqrt(1.0 - share * share) / norm) * dir.transpose();
            }
        }
    }

    Vector sigma(n);
    for (Index i = 0; i < n; ++i) sigma(i) = 0.1 + 0.5 * unit(rng);

    // Pareto(1.5) market capitalizations
    Vector w(n);
    for (Index i = 0; i < n; ++i) w(i) = std::pow(1.0 - unit(rng), -1.0 / 1.5);
    w /= w.sum();

    SyntheticMarket out;
    out.true_loadings = FactorLoadings(x);
    out.ground_truth = assemble_correlation(out.true_loadings);

    const Vector v = sigma.cwiseProduct(w);
    const double base = v.dot(out.ground_truth.matrix() * v);
    double target = (1.0 + o.crp) * base;
    const double bound = v.sum() * v.sum();
    if (target > bound) {
        out.clipped = true;
        out.warnings.push_back("index variance clipped to the comonotonic bound");
        target = bound;
    }

    const Index t = o.returns_length;
    const Vector idio = residual_variances(out.true_loadings).cwiseSqrt();
    Matrix factors(t, k);
    Matrix assets(t, n);
    const Vector daily = sigma / std::sqrt(252.0);
    for (Index s = 0; s < t; ++s) {
        for (Index d = 0; d < k; ++d) factors(s, d) = normal(rng);
        for (Index i = 0; i < n; ++i) {
            const double z = x.row(i).dot(factors.row(s)) + idio(i) * normal(rng);
            assets(s, i) = daily(i) * z;
        }
    }

    MarketSnapshot& snap = out.snapshot;
    snap.date = "synthetic-" + std::to_string(o.seed);
    snap.spec = MarketSpec(sigma, {{"market", w, target}});
    snap.asset_returns = assets;
    snap.factor_returns = factors * 0.01;
    for (Index d = 0; d < k; ++d) snap.factor_names.push_back("factor" + std::to_string(d + 1));
    snap.target = pearson_correlation(assets);
    return out;
}

// Benchmark -------------------------------------------------------------------

std::string BenchCell::label() const {
    return model + " k=" + std::to_string(k) + " " + target;
}

BenchSuite suite_from_json(const json& j, SolverConfig base) {
    if (!j.is_object()) throw ValidationError("bench suite must be a JSON object");
    BenchSuite s;
    s.solver = base;
    for (const auto& [key, value] : j.items()) {
        const std::string what = "bench." + key;
        auto integer = [&]() -> long long {
            if (!value.is_number_integer()) throw ValidationError(what + " must be an integer");
            return value.get<long long>();
        };
        if (key == "n") s.n = static_cast<Index>(integer());
        else if (key == "k_true") s.k_true = static_cast<int>(integer());
        else if (key == "crp") {
            if (!value.is_number()) throw ValidationError(what + " must be a number");
            s.crp = value.get<double>();
        }
        else if (key == "seed") s.seed = static_cast<std::uint64_t>(integer());
        else if (key == "instances") s.instances = static_cast<int>(integer());
        else if (key == "returns_length") s.returns_length = static_cast<Index>(integer());
        else if (key == "short_window") s.short_window = static_cast<Index>(integer());
        else if (key == "jobs") s.jobs = static_cast<int>(integer());
        else if (key == "solver") s.solver = io::config_from_json(value, base);
        else if (key == "cells") {
            if (!value.is_array()) throw ValidationError("bench.cells must be an array");
            for (const auto& c : value) {
                BenchCell cell;
                cell.model = c.value("model", std::string());
                cell.k = c.value("k", 1);
                cell.target = c.value("target", std::string("historical"));
                s.cells.push_back(cell);
            }
        }
        else throw ValidationError("unknown bench option '" + key + "'");
    }
    if (s.instances < 1) throw ValidationError("bench.instances must be positive");
    if (s.jobs < 1) throw ValidationError("bench.jobs must be positive");
    if (s.cells.empty()) throw ValidationError("bench.cells is empty");
    for (const auto& c : s.cells) validate_cell(c, s.k_true);
    return s;
}

json to_json(const BenchSuite& s) {
    json cells = json::array();
    for (const auto& c : s.cells) cells.push_back({{"model", c.model}, {"k", c.k}, {"target", c.target}});
    return {{"n", s.n},
            {"k_true", s.k_true},
            {"crp", s.crp},
            {"seed", s.seed},
            {"instances", s.instances},
            {"returns_length", s.returns_length},
            {"short_window", s.short_window},
            {"jobs", s.jobs},
            {"solver", io::to_json(s.solver)},
            {"cells", cells}};
}

BenchSuite default_bench_suite() {
    BenchSuite s;
    s.n = 50;
    s.k_true = 5;
    s.instances = 5;
    s.cells = {{"equicorrelation", 1, "historical"}, {"adjusted", 1, "historical"},
               {"economic", 1, "historical"},        {"nicm", 1, "historical"},
               {"nicm", 3, "historical"},            {"nicm", 5, "historical"},
               {"nicm", 1, "mean-reverting"},        {"repair", 1, "historical"}};
    return s;
}

json to_json(const RunRecord& r, const BenchSuite& suite) {
    const BenchCell& c = suite.cells.at(r.cell);
    json j = {{"cell", r.cell},       {"model", c.model},       {"k", c.k},
              {"target", c.target},   {"instance", r.instance}, {"seed", r.seed},
              {"ok", r.ok},           {"converged", r.converged}, {"seconds", r.seconds},
              {"fn", r.fn},           {"v_tol", r.v_tol},       {"iterations", r.iterations},
              {"psd", r.psd}};
    j["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
    if (!r.ok) j["error"] = r.error;
    return j;
}

RunRecord run_from_json(const json& j) {
    RunRecord r;
    r.cell = j.at("cell").get<std::size_t>();
    r.instance = j.at("instance").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = j.at("ok").get<bool>();
    r.converged = j.at("converged").get<bool>();
    r.seconds = json_number(j.at("seconds"));
    r.fn = json_number(j.at("fn"));
    r.v_tol = json_number(j.at("v_tol"));
    r.iterations = j.at("iterations").get<int>();
    r.psd = j.at("psd").get<bool>();
    if (!j.at("alpha").is_null()) r.alpha = j.at("alpha").get<double>();
    r.error = j.value("error", std::string());
    return r;
}

BenchReport run_bench(const BenchSuite& suite, const fs::path* artifact_dir) {
    if (suite.cells.empty()) throw ValidationError("bench: no cells");
    for (const auto& c : suite.cells) validate_cell(c, suite.k_true);

    std::vector<Instance> instances;
    instances.reserve(static_cast<std::size_t>(suite.instances));
    for (int i = 0; i < suite.instances; ++i) instances.push_back(make_instance(suite, i));

    const std::size_t per_cell = instances.size();
    const std::size_t total = suite.cells.size() * per_cell;
    std::vector<RunRecord> runs(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t t = next++; t < total; t = next++) {
            const std::size_t cell = t / per_cell;
            const int inst = static_cast<int>(t % per_cell);
            runs[t] = run_one(suite, cell, instances[static_cast<std::size_t>(inst)], inst);
        }
    };
    const std::size_t jobs = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, suite.jobs)), total);
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (artifact_dir) {
        for (const auto& r : runs) io::write_json(artifact_path(*artifact_dir, r), to_json(r, suite));
    }
    return {aggregate_runs(suite, runs), std::move(runs)};
}

std::vector<BenchRow> aggregate_runs(const BenchSuite& suite, const std::vector<RunRecord>& all) {
    std::vector<RunRecord> runs = all;
    std::stable_sort(runs.begin(), runs.end(), [](const RunRecord& a, const RunRecord& b) {
        return a.cell != b.cell ? a.cell < b.cell : a.instance < b.instance;
    });
    std::vector<BenchRow> rows;
    for (std::size_t c = 0; c < suite.cells.size(); ++c) {
        BenchRow row;
        row.model = suite.cells[c].model;
        row.k = suite.cells[c].k;
        row.target = suite.cells[c].target;
        std::vector<double> t, fn, vt, it, al;
        for (const auto& r : runs) {
            if (r.cell != c) continue;
            ++row.runs;
            if (!r.ok) {
                ++row.failures;
                continue;
            }
            if (!r.converged) ++row.unconverged;
            t.push_back(r.seconds);
            fn.push_back(r.fn);
            vt.push_back(r.v_tol);
            it.push_back(static_cast<double>(r.iterations));
            if (r.alpha) al.push_back(*r.alpha);
        }
        row.t_mean = mean_of(t);
        row.t_sd = sample_sd(t, row.t_mean);
        row.fn_mean = mean_of(fn);
        row.fn_sd = sample_sd(fn, row.fn_mean);
        row.vtol_mean = mean_of(vt);
        row.vtol_max = vt.empty() ? kNaN : *std::max_element(vt.begin(), vt.end());
        row.iter_mean = mean_of(it);
        row.iter_sd = sample_sd(it, row.iter_mean);
        if (!al.empty()) {
            row.alpha_mean = mean_of(al);
            row.alpha_sd = sample_sd(al, *row.alpha_mean);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<BenchRow> aggregate_artifacts(const BenchSuite& suite, const fs::path& artifact_dir) {
    const fs::path dir = artifact_dir / "runs";
    if (!fs::is_directory(dir)) throw IoError("no run artifacts under '" + dir.string() + "'");
    std::vector<RunRecord> runs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        try {
            runs.push_back(run_from_json(io::read_json(entry.path())));
        } catch (const json::exception& e) {
            throw IoError(entry.path().string() + ": malformed run artifact (" + e.what() + ")");
        }
    }
    return aggregate_runs(suite, runs);
}

std::string render_table(const std::vector<BenchRow>& rows, bool include_timings) {
    std::vector<std::string> header;
    const auto body = row_cells(rows, include_timings, false, header);
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& r : body) width[c] = std::max(width[c], r[c].size());
    }
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out += "  ";
            // text columns left, numbers right
            const std::string pad(width[c] - cells[c].size(), ' ');
            out += (c == 0 || c == 2) ? cells[c] + pad : pad + cells[c];
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    line(header);
    for (const auto& r : body) line(r);
    return out;
}

std::string render_csv(const std::vector<BenchRow>& rows, bool include_timings) {
    std::vector<std::string> header;
    const auto body = row_cells(rows, include_timings, true, header);
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out += ',';
            out += cells[c];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : body) line(r);
    return out;
}

}  // namespace icorr
