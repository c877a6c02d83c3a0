#include "impliedcorr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace icorr::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto end = line.find(',', pos);
        fields.push_back(trim(line.substr(pos, end == std::string_view::npos ? end : end - pos)));
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return fields;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& msg) {
    throw IoError(source + ":" + std::to_string(line) + ": " + msg);
}

double parse_number(std::string_view field, const std::string& source, std::size_t line, std::size_t col) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        parse_fail(source, line, "column " + std::to_string(col + 1) + ": cannot parse '" +
                                     std::string(field) + "' as a number");
    }
    if (!std::isfinite(value)) {
        parse_fail(source, line, "column " + std::to_string(col + 1) + ": non-finite value");
    }
    return value;
}

Matrix parse_rows(const std::vector<std::string_view>& lines, std::size_t first, const std::string& source,
                  std::size_t expected_cols) {
    const std::size_t rows = lines.size() - first;
    Matrix m(static_cast<Index>(rows), static_cast<Index>(expected_cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t lineno = first + r + 1;
        const auto fields = split_fields(lines[first + r]);
        if (fields.size() != expected_cols) {
            parse_fail(source, lineno, "expected " + std::to_string(expected_cols) + " fields, found " +
                                           std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) = parse_number(fields[c], source, lineno, c);
        }
    }
    return m;
}

void append_row(std::string& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    for (Index j = 0; j < row.size(); ++j) {
        if (j) out += ',';
        out += format_double(row(j));
    }
    out += '\n';
}

const json& require_key(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(where + ": missing key '" + key + "'");
    }
    return j.at(key);
}

double number_from_json(const json& j, const std::string& what) {
    if (!j.is_number()) throw ValidationError(what + " must be a number");
    return j.get<double>();
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw IoError("format_double: buffer too small");
    return std::string(buf, ptr);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Matrix parse_matrix_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw IoError(source + ": empty matrix file");
    return parse_rows(lines, 0, source, split_fields(lines[0]).size());
}

std::string matrix_to_csv(const Matrix& m) {
    std::string out;
    for (Index i = 0; i < m.rows(); ++i) append_row(out, m.row(i));
    return out;
}

Matrix read_matrix_csv(const fs::path& path) {
    return parse_matrix_csv(read_text(path), path.string());
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
    write_text(path, matrix_to_csv(m));
}

NamedVector read_vector_csv(const fs::path& path) {
    const LabeledMatrix m = read_labeled_csv(path);
    if (m.columns.size() != 1) {
        throw IoError(path.string() + ":1: expected a single-column vector, found " +
                      std::to_string(m.columns.size()) + " columns");
    }
    return {m.columns[0], m.values.col(0)};
}

void write_vector_csv(const fs::path& path, const std::string& name, const Vector& values) {
    write_labeled_csv(path, {{name}, values});
}

LabeledMatrix parse_labeled_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw IoError(source + ": missing header line");
    LabeledMatrix out;
    for (auto f : split_fields(lines[0])) {
        if (f.empty()) parse_fail(source, 1, "empty column name");
        out.columns.emplace_back(f);
    }
    out.values = parse_rows(lines, 1, source, out.columns.size());
    return out;
}

LabeledMatrix read_labeled_csv(const fs::path& path) {
    return parse_labeled_csv(read_text(path), path.string());
}

void write_labeled_csv(const fs::path& path, const LabeledMatrix& m) {
    if (static_cast<Index>(m.columns.size()) != m.values.cols()) {
        throw ValidationError("write_labeled_csv: header and matrix column counts differ");
    }
    std::string out;
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        if (c) out += ',';
        out += m.columns[c];
    }
    out += '\n';
    out += matrix_to_csv(m.values);
    write_text(path, out);
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + " must be an array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Index>(i)) = number_from_json(j[i], what + "[" + std::to_string(i) + "]");
    }
    return v;
}

json to_json(const MarketSpec& spec) {
    json cs = json::array();
    for (const auto& c : spec.constraints()) {
        cs.push_back({{"name", c.name}, {"weights", vector_to_json(c.weights)}, {"variance", c.variance}});
    }
    return {{"sigma", vector_to_json(spec.sigma())}, {"constraints", cs}};
}

MarketSpec market_from_json(const json& j) {
    const Vector sigma = vector_from_json(require_key(j, "sigma", "market"), "market.sigma");
    const json& cs = require_key(j, "constraints", "market");
    if (!cs.is_array()) throw ValidationError("market.constraints must be an array");
    std::vector<PortfolioConstraint> constraints;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string where = "market.constraints[" + std::to_string(i) + "]";
        PortfolioConstraint c;
        c.name = cs[i].value("name", i == 0 ? std::string("market") : "constraint" + std::to_string(i));
        c.weights = vector_from_json(require_key(cs[i], "weights", where), where + ".weights");
        c.variance = number_from_json(require_key(cs[i], "variance", where), where + ".variance");
        constraints.push_back(std::move(c));
    }
    return MarketSpec(sigma, std::move(constraints));
}

json read_json(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte offset -> line number
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw IoError(path.string() + ":" + std::to_string(line) + ": invalid JSON");
    }
}

void write_json(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

MarketSpec read_market(const fs::path& path) {
    try {
        return market_from_json(read_json(path));
    } catch (const IoError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_market(const fs::path& path, const MarketSpec& spec) {
    write_json(path, to_json(spec));
}

json to_json(const SolverConfig& c) {
    return {{"k", c.k},
            {"var_tol", c.var_tol},
            {"fn_tol", c.fn_tol},
            {"stop_rule", c.stop_rule == StopRule::absolute ? "absolute" : "relative"},
            {"max_outer_iter", c.max_outer_iter},
            {"max_restoration_iter", c.max_restoration_iter},
            {"restoration_tol", c.restoration_tol},
            {"armijo_c", c.armijo_c},
            {"backtrack", c.backtrack},
            {"max_backtracks", c.max_backtracks},
            {"step_min", c.step_min},
            {"step_max", c.step_max}};
}

SolverConfig config_from_json(const json& j, SolverConfig c) {
    if (!j.is_object()) throw ValidationError("solver config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        const std::string what = "solver." + key;
        auto as_int = [&]() {
            if (!value.is_number_integer()) throw ValidationError(what + " must be an integer");
            return value.get<int>();
        };
        if (key == "k") c.k = as_int();
        else if (key == "var_tol") c.var_tol = number_from_json(value, what);
        else if (key == "fn_tol") c.fn_tol = number_from_json(value, what);
        else if (key == "stop_rule") {
            const std::string s = value.is_string() ? value.get<std::string>() : "";
            if (s == "absolute") c.stop_rule = StopRule::absolute;
            else if (s == "relative") c.stop_rule = StopRule::relative;
            else throw ValidationError(what + " must be \"absolute\" or \"relative\"");
        }
        else if (key == "max_outer_iter") c.max_outer_iter = as_int();
        else if (key == "max_restoration_iter") c.max_restoration_iter = as_int();
        else if (key == "restoration_tol") c.restoration_tol = number_from_json(value, what);
        else if (key == "armijo_c") c.armijo_c = number_from_json(value, what);
        else if (key == "backtrack") c.backtrack = number_from_json(value, what);
        else if (key == "max_backtracks") c.max_backtracks = as_int();
        else if (key == "step_min") c.step_min = number_from_json(value, what);
        else if (key == "step_max") c.step_max = number_from_json(value, what);
        else throw ValidationError("unknown solver option '" + key + "'");
    }
    c.validate();
    return c;
}

json to_json(const SolverResult& r) {
    return {{"fn", r.fn},
            {"fn_start", r.fn_start},
            {"fn_trace", r.fn_trace},
            {"constraint_residual", r.constraint_residual},
            {"outer_iterations", r.outer_iterations},
            {"restorations", r.restorations},
            {"wall_time", r.wall_time.count()},
            {"converged", r.converged},
            {"message", r.message},
            {"vol_scale", r.vol_scale},
            {"k", r.X_star.k()}};
}

json to_json(const FeasibilityReport& f) {
    json j = {{"symmetric", f.symmetric},
              {"max_asymmetry", f.max_asymmetry},
              {"unit_diagonal", f.unit_diagonal},
              {"bounded", f.bounded},
              {"min_eigenvalue", f.min_eigenvalue},
              {"psd", f.psd},
              {"mathematically_feasible", f.mathematically_feasible()},
              {"economically_matched", f.economically_matched}};
    if (f.constraint_residuals.size() > 0) j["constraint_residuals"] = vector_to_json(f.constraint_residuals);
    return j;
}

json to_json(const EconomicResult& r) {
    return {{"alpha_tilde", r.alpha_tilde},
            {"upsilon", r.upsilon},
            {"sigma_P_sq", r.sigma_P_sq},
            {"sigma_Delta_sq", r.sigma_Delta_sq},
            {"sigma_PDelta_sq", r.sigma_PDelta_sq},
            {"constraint_residual", r.constraint_residual},
            {"x_q_in_omega", r.x_q_in_omega},
            {"warnings", r.warnings}};
}

VGParams vg_params_from_json(const json& j, const fs::path& base_dir) {
    VGParams p;
    p.xi = vector_from_json(require_key(j, "xi", "vg"), "vg.xi");
    p.omega = vector_from_json(require_key(j, "omega", "vg"), "vg.omega");
    p.theta = vector_from_json(require_key(j, "theta", "vg"), "vg.theta");
    p.nu = number_from_json(require_key(j, "nu", "vg"), "vg.nu");
    if (j.contains("C_dir")) {
        const json& c = j.at("C_dir");
        if (c.is_string()) {
            fs::path path = c.get<std::string>();
            if (path.is_relative()) path = base_dir / path;
            p.C_dir = CorrMatrix(read_matrix_csv(path));
        } else if (c.is_array()) {
            Matrix m(static_cast<Index>(c.size()), static_cast<Index>(c.size()));
            for (std::size_t i = 0; i < c.size(); ++i) {
                const Vector row = vector_from_json(c[i], "vg.C_dir[" + std::to_string(i) + "]");
                if (row.size() != m.cols()) throw ValidationError("vg.C_dir must be square");
                m.row(static_cast<Index>(i)) = row.transpose();
            }
            p.C_dir = CorrMatrix(m);
        } else if (!c.is_null()) {
            throw ValidationError("vg.C_dir must be a CSV path or a nested array");
        }
    }
    p.validate(false);
    return p;
}

VGParams read_vg_params(const fs::path& path) {
    return vg_params_from_json(read_json(path), path.parent_path());
}

}  // namespace icorr::io
