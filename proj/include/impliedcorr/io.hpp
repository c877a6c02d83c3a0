/**
 * @file io.hpp
 * @brief File formats: headerless numeric CSV for matrices, single-column CSV
 *        with a one-line header for vectors, CSV with a header row for named
 *        columns (factor loadings), and JSON for market specs, solver
 *        configuration, results and VG parameters.
 *
 * Doubles are written in shortest round-trip form, so re-reading a written
 * file reproduces the values bit for bit.
 */

#pragma once

#include "impliedcorr/corr_core.hpp"
#include "impliedcorr/factor_pricing.hpp"
#include "impliedcorr/nicm_solver.hpp"
#include "impliedcorr/types.hpp"
#include "impliedcorr/vg_copula.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace icorr::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);

// Matrices ------------------------------------------------------------------

/// Parses headerless CSV; `source` names the input in error messages.
Matrix parse_matrix_csv(std::string_view text, const std::string& source);
std::string matrix_to_csv(const Matrix& m);
Matrix read_matrix_csv(const fs::path& path);
void write_matrix_csv(const fs::path& path, const Matrix& m);

struct NamedVector {
    std::string name;
    Vector values;
};
NamedVector read_vector_csv(const fs::path& path);
void write_vector_csv(const fs::path& path, const std::string& name, const Vector& values);

struct LabeledMatrix {
    std::vector<std::string> columns;
    Matrix values;
};
LabeledMatrix parse_labeled_csv(std::string_view text, const std::string& source);
LabeledMatrix read_labeled_csv(const fs::path& path);
void write_labeled_csv(const fs::path& path, const LabeledMatrix& m);

// JSON ----------------------------------------------------------------------

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j, const std::string& what);

json to_json(const MarketSpec& spec);
MarketSpec market_from_json(const json& j);
MarketSpec read_market(const fs::path& path);
void write_market(const fs::path& path, const MarketSpec& spec);

json to_json(const SolverConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
SolverConfig config_from_json(const json& j, SolverConfig base = {});

json to_json(const SolverResult& result);
json to_json(const FeasibilityReport& report);
json to_json(const EconomicResult& result);

/// VG parameters; a string "C_dir" is resolved relative to the JSON file.
VGParams read_vg_params(const fs::path& path);
VGParams vg_params_from_json(const json& j, const fs::path& base_dir);

json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);

}  // namespace icorr::io
