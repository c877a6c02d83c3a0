#include "impliedcorr/harness.hpp"

#include "impliedcorr/baselines.hpp"
#include "impliedcorr/corr_core.hpp"
#include "impliedcorr/io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

namespace icorr {
namespace {

using testing::data_path;
using testing::ScratchDir;

TEST(LoadSnapshot, TwoAssetFixture) {
    const MarketSnapshot s = load_snapshot(data_path("two_asset/manifest.json"));
    EXPECT_EQ(s.spec.n(), 2);
    EXPECT_EQ(s.date, "2024-01-31");
    ASSERT_TRUE(s.target.has_value());
    EXPECT_EQ(*s.target, Matrix::Identity(2, 2));
    EXPECT_FALSE(s.asset_returns.has_value());
}

TEST(LoadSnapshot, WeightsNotSummingToOne) {
    EXPECT_THROW(load_snapshot(data_path("bad_weights/manifest.json")), ValidationError);
}

TEST(LoadSnapshot, SchemaVersionMismatch) {
    EXPECT_THROW(load_snapshot(data_path("two_asset/manifest.json"), 2), ValidationError);
}

TEST(LoadSnapshot, DimensionMismatchNamesFiles) {
    ScratchDir dir("snapshot_dims");
    std::filesystem::copy(data_path("two_asset"), dir.path(), std::filesystem::copy_options::recursive);
    io::write_matrix_csv(dir.path() / "target.csv", Matrix::Identity(3, 3));
    try {
        load_snapshot(dir.path() / "manifest.json");
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("target.csv"), std::string::npos) << msg;
        EXPECT_NE(msg.find("market.json"), std::string::npos) << msg;
    }
}

TEST(SaveSnapshot, RoundTripsSyntheticMarket) {
    const SyntheticMarket m = generate_synthetic_market({100, 3, 0.05, 11, 120});
    ScratchDir dir("snapshot_rt");
    const auto manifest = save_snapshot(m.snapshot, dir.path());
    const MarketSnapshot back = load_snapshot(manifest);
    EXPECT_EQ(back.spec.sigma(), m.snapshot.spec.sigma());
    EXPECT_EQ(back.spec.constraint(0).weights, m.snapshot.spec.constraint(0).weights);
    EXPECT_EQ(back.spec.constraint(0).variance, m.snapshot.spec.constraint(0).variance);
    EXPECT_EQ(*back.target, *m.snapshot.target);
    EXPECT_EQ(*back.asset_returns, *m.snapshot.asset_returns);
    EXPECT_EQ(*back.factor_returns, *m.snapshot.factor_returns);
    EXPECT_EQ(back.factor_names, m.snapshot.factor_names);
}

TEST(PearsonCorrelation, HandComputed) {
    Matrix r(4, 2);
    r << 1, 2, 2, 1, 3, 4, 4, 3;
    // Deviations (-1.5,-0.5,0.5,1.5) and (-0.5,-1.5,1.5,0.5): cross 3, squares 5 each.
    const Matrix c = pearson_correlation(r);
    EXPECT_NEAR(c(0, 1), 0.6, 1e-15);
    EXPECT_EQ(c(0, 0), 1.0);
}

TEST(PearsonCorrelation, PerfectlyCorrelatedSeries) {
    Matrix r(5, 2);
    r.col(0) << 0.01, -0.02, 0.03, 0.0, 0.015;
    r.col(1) = 3.0 * r.col(0).array() + 0.5;
    EXPECT_NEAR(pearson_correlation(r)(0, 1), 1.0, 1e-15);
    r.col(1) = -r.col(0);
    EXPECT_NEAR(pearson_correlation(r)(0, 1), -1.0, 1e-15);
}

TEST(PearsonCorrelation, ZeroVarianceNamesPair) {
    Matrix r(4, 3);
    r << 1, 5, 2, 2, 5, 1, 3, 5, 3, 4, 5, 2;
    try {
        pearson_correlation(r);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("series 1"), std::string::npos) << msg;
    }
}

TEST(EstimateTarget, DeterministicAndValid) {
    const SyntheticMarket m = generate_synthetic_market({12, 3, 0.0, 5, 200});
    TargetOptions o;
    o.mode = TargetMode::mean_reverting;
    o.window = 40;
    o.seed = 9;
    const CorrMatrix a = estimate_target_matrix(*m.snapshot.asset_returns, o);
    const CorrMatrix b = estimate_target_matrix(*m.snapshot.asset_returns, o);
    EXPECT_EQ(a.matrix(), b.matrix());
    EXPECT_EQ(a.matrix().diagonal(), Vector::Ones(12));
    EXPECT_LE(a.matrix().cwiseAbs().maxCoeff(), 1.0);
    o.mode = TargetMode::historical;
    o.window = 0;
    EXPECT_LE((estimate_target_matrix(*m.snapshot.asset_returns, o).matrix() - *m.snapshot.target)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
}

TEST(EstimateFactorCorrelations, IndependentSeriesAreSmall) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    const Index t = 2000;
    Matrix assets(t, 4), factors(t, 2);
    for (Index i = 0; i < t; ++i) {
        for (Index j = 0; j < 4; ++j) assets(i, j) = z(rng);
        for (Index j = 0; j < 2; ++j) factors(i, j) = z(rng);
    }
    const FactorLoadings x = estimate_factor_correlations(assets, factors);
    EXPECT_EQ(x.n(), 4);
    EXPECT_EQ(x.k(), 2);
    EXPECT_LE(x.matrix().cwiseAbs().maxCoeff(), 3.0 / std::sqrt(static_cast<double>(t)) * 1.5);
}

TEST(EstimateFactorCorrelations, HandComputedWindow) {
    Matrix assets(5, 1), factors(5, 1);
    assets << 100, 1, 2, 3, 4;
    factors << -7, 2, 1, 4, 3;
    // Trailing four rows: deviations (-1.5,-0.5,0.5,1.5) and (-0.5,-1.5,1.5,0.5) -> 3 / 5.
    EXPECT_NEAR(estimate_factor_correlations(assets, factors, 4)(0, 0), 0.6, 1e-15);
}

TEST(Synthetic, DeterministicForSeed) {
    const SyntheticMarket a = generate_synthetic_market({20, 3, 0.1, 42, 100});
    const SyntheticMarket b = generate_synthetic_market({20, 3, 0.1, 42, 100});
    const SyntheticMarket c = generate_synthetic_market({20, 3, 0.1, 43, 100});
    EXPECT_EQ(*a.snapshot.asset_returns, *b.snapshot.asset_returns);
    EXPECT_EQ(a.ground_truth.matrix(), b.ground_truth.matrix());
    EXPECT_NE(a.ground_truth.matrix(), c.ground_truth.matrix());
}

TEST(Synthetic, ZeroPremiumTruthSatisfiesConstraint) {
    const SyntheticMarket m = generate_synthetic_market({30, 3, 0.0, 7, 100});
    EXPECT_LE(std::abs(constraint_residuals(m.ground_truth, m.snapshot.spec)(0)), 1e-15);
    EXPECT_TRUE(m.true_loadings.in_omega());
    EXPECT_FALSE(m.clipped);
}

TEST(Synthetic, PositivePremiumRaisesAverageCorrelation) {
    const SyntheticMarket m = generate_synthetic_market({10, 3, 0.1, 3, 100});
    const Matrix& c = m.ground_truth.matrix();
    const double avg_offdiag = (c.sum() - 10.0) / 90.0;
    EXPECT_GT(equicorrelation(m.snapshot.spec).c_bar, avg_offdiag);
}

TEST(Synthetic, ExcessivePremiumIsClipped) {
    const SyntheticMarket m = generate_synthetic_market({10, 2, 50.0, 3, 100});
    EXPECT_TRUE(m.clipped);
    EXPECT_FALSE(m.warnings.empty());
}

BenchSuite tiny_suite() {
    BenchSuite s;
    s.n = 8;
    s.k_true = 2;
    s.instances = 2;
    s.returns_length = 80;
    s.short_window = 20;
    s.cells = {{"equicorrelation", 1, "historical"}, {"nicm", 2, "historical"}};
    return s;
}

TEST(Bench, RowsAndArtifacts) {
    ScratchDir dir("bench");
    const BenchSuite s = tiny_suite();
    const BenchReport r = run_bench(s, &dir.path());
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.runs.size(), 4u);
    std::size_t artifacts = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path() / "runs")) ++artifacts;
    EXPECT_EQ(artifacts, 4u);
    EXPECT_EQ(r.rows[0].model, "equicorrelation");
    EXPECT_EQ(r.rows[0].runs, 2);
    EXPECT_LE(r.rows[0].vtol_max, 1e-12);
    EXPECT_LE(r.rows[1].vtol_max, s.solver.var_tol);
}

TEST(Bench, AggregatesRecomputeFromArtifacts) {
    ScratchDir dir("bench_agg");
    const BenchSuite s = tiny_suite();
    const BenchReport r = run_bench(s, &dir.path());
    const std::vector<BenchRow> again = aggregate_artifacts(s, dir.path());
    ASSERT_EQ(again.size(), r.rows.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        EXPECT_EQ(again[i].fn_mean, r.rows[i].fn_mean);
        EXPECT_EQ(again[i].fn_sd, r.rows[i].fn_sd);
        EXPECT_EQ(again[i].vtol_max, r.rows[i].vtol_max);
        EXPECT_EQ(again[i].iter_mean, r.rows[i].iter_mean);
    }
}

TEST(Bench, ParallelMatchesSerial) {
    BenchSuite s = tiny_suite();
    const std::string serial = render_table(run_bench(s).rows, false);
    s.jobs = 4;
    EXPECT_EQ(render_table(run_bench(s).rows, false), serial);
}

TEST(Bench, SuiteJsonRoundTrip) {
    const BenchSuite s = default_bench_suite();
    const BenchSuite back = suite_from_json(to_json(s));
    EXPECT_EQ(back.n, s.n);
    EXPECT_EQ(back.cells.size(), s.cells.size());
    EXPECT_EQ(back.cells.back().label(), s.cells.back().label());
    EXPECT_THROW(suite_from_json(nlohmann::json{{"n", 10}, {"colour", "red"}}), ValidationError);
    EXPECT_THROW(suite_from_json(nlohmann::json{{"cells", {{{"model", "magic"}}}}}), ValidationError);
}

TEST(Bench, SampleStatistics) {
    BenchSuite s;
    s.cells = {{"nicm", 1, "historical"}};
    std::vector<RunRecord> runs(3);
    const double fns[] = {1.0, 2.0, 4.0};
    for (int i = 0; i < 3; ++i) {
        runs[i].ok = runs[i].converged = true;
        runs[i].instance = i;
        runs[i].fn = fns[i];
        runs[i].iterations = 10;
    }
    const BenchRow row = aggregate_runs(s, runs).at(0);
    EXPECT_NEAR(row.fn_mean, 7.0 / 3.0, 1e-15);
    EXPECT_NEAR(row.fn_sd, std::sqrt(7.0 / 3.0), 1e-15);
    EXPECT_EQ(row.iter_sd, 0.0);
    runs.resize(1);
    EXPECT_EQ(aggregate_runs(s, runs).at(0).fn_sd, 0.0);
}

}  // namespace
}  // namespace icorr
