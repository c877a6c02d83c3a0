/**
 * @file harness.hpp
 * @brief Data plumbing around the solvers: market snapshots on disk, target
 *        and factor-correlation estimation from return series, a seeded
 *        synthetic market generator and the benchmark runner.
 */

#pragma once

#include "impliedcorr/nicm_solver.hpp"
#include "impliedcorr/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace icorr {

inline constexpr int kSnapshotSchemaVersion = 1;

struct MarketSnapshot {
    std::string date;
    MarketSpec spec;
    std::optional<Matrix> target;          ///< raw n x n target, possibly not PSD
    std::optional<Matrix> asset_returns;   ///< T x n
    std::optional<Matrix> factor_returns;  ///< T x k
    std::vector<std::string> factor_names;
};

/**
 * Loads a snapshot from its manifest (JSON with schema_version, date and
 * file names relative to the manifest). Dimension mismatches name the files.
 */
MarketSnapshot load_snapshot(const std::filesystem::path& manifest, int schema_version = kSnapshotSchemaVersion);

/// Writes manifest.json plus market.json and the CSV files into dir; returns the manifest path.
std::filesystem::path save_snapshot(const MarketSnapshot& snap, const std::filesystem::path& dir);

// Estimation ----------------------------------------------------------------

enum class TargetMode { historical, mean_reverting };

struct TargetOptions {
    TargetMode mode = TargetMode::historical;
    Index window = 0;            ///< trailing rows used; 0 means all
    double theta_lo = 0.0;       ///< blend weight range for mean reversion
    double theta_hi = 0.4;
    std::uint64_t seed = 0;
};

/// Pearson correlations of the columns of a T x n return matrix.
Matrix pearson_correlation(const Matrix& returns);

/**
 * Historical: Pearson correlation over the trailing window. Mean-reverting:
 * theta_ij rho_window + (1 - theta_ij) rho_full per pair, theta_ij uniform on
 * [theta_lo, theta_hi] drawn in (i, j), i < j order. Not necessarily PSD.
 */
CorrMatrix estimate_target_matrix(const Matrix& returns, const TargetOptions& options);

/// Pearson correlation of each asset with each factor over the trailing window.
FactorLoadings estimate_factor_correlations(const Matrix& asset_returns, const Matrix& factor_returns,
                                            Index window = 0);

// Synthetic markets ---------------------------------------------------------

struct SyntheticOptions {
    Index n = 10;
    int k_true = 3;
    double crp = 0.0;           ///< sigma_m^2 = (1 + crp) w'sigma C_true sigma w
    std::uint64_t seed = 0;
    Index returns_length = 252;
};

struct SyntheticMarket {
    MarketSnapshot snapshot;    ///< target holds the historical estimate
    CorrMatrix ground_truth;
    FactorLoadings true_loadings;
    bool clipped = false;       ///< sigma_m^2 hit the comonotonic bound
    std::vector<std::string> warnings;
};

SyntheticMarket generate_synthetic_market(const SyntheticOptions& options);

// Benchmark -----------------------------------------------------------------

struct BenchCell {
    std::string model;   ///< nicm, repair, equicorrelation, adjusted, economic, reference
    int k = 1;
    std::string target;  ///< historical, mean-reverting, truth

    std::string label() const;
};

struct BenchSuite {
    Index n = 10;
    int k_true = 3;
    double crp = 0.1;
    std::uint64_t seed = 1;
    int instances = 2;
    Index returns_length = 252;
    Index short_window = 63;  ///< window blended toward the full sample in mean-reverting targets
    SolverConfig solver;
    std::vector<BenchCell> cells;
    int jobs = 1;
};

BenchSuite suite_from_json(const nlohmann::json& j, SolverConfig base = {});
nlohmann::json to_json(const BenchSuite& suite);
/// A small desk-scale suite covering every model.
BenchSuite default_bench_suite();

struct RunRecord {
    std::size_t cell = 0;
    int instance = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    bool converged = false;
    std::string error;
    double seconds = 0.0;
    double fn = 0.0;
    double v_tol = 0.0;       ///< |g| of the returned matrix
    int iterations = 0;
    std::optional<double> alpha;
    bool psd = false;
};

nlohmann::json to_json(const RunRecord& r, const BenchSuite& suite);
RunRecord run_from_json(const nlohmann::json& j);

struct BenchRow {
    std::string model;
    int k = 0;
    std::string target;
    int runs = 0;
    int failures = 0;         ///< runs that threw
    int unconverged = 0;
    double t_mean = 0, t_sd = 0;
    double fn_mean = 0, fn_sd = 0;
    double vtol_mean = 0, vtol_max = 0;
    double iter_mean = 0, iter_sd = 0;
    std::optional<double> alpha_mean, alpha_sd;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<RunRecord> runs;
};

/// Runs every (cell, instance) pair, optionally writing one JSON artifact per run.
BenchReport run_bench(const BenchSuite& suite, const std::filesystem::path* artifact_dir = nullptr);

/// Rows in suite order; statistics over runs that completed. Sample sd, zero for one run.
std::vector<BenchRow> aggregate_runs(const BenchSuite& suite, const std::vector<RunRecord>& runs);

/// Reads every artifact in dir/runs and aggregates them.
std::vector<BenchRow> aggregate_artifacts(const BenchSuite& suite, const std::filesystem::path& artifact_dir);

std::string render_table(const std::vector<BenchRow>& rows, bool include_timings = true);
std::string render_csv(const std::vector<BenchRow>& rows, bool include_timings = true);

}  // namespace icorr
