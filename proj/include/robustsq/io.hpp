// Dataset ingestion, run configuration, and result serialization.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustsq/dataset.hpp"
#include "robustsq/harness.hpp"

namespace robustsq {

// Error taxonomy for CLI exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Recognized NA tokens: empty cell, "NA", "NaN" (case-insensitive).
inline bool is_na_token(const std::string& cell) {
    const std::string t = lower(trim(cell));
    return t.empty() || t == "na" || t == "nan";
}

inline std::optional<double> parse_number(const std::string& cell) {
    const std::string t = trim(cell);
    if (t.empty()) return std::nullopt;
    std::size_t pos = 0;
    try {
        const double v = std::stod(t, &pos);
        if (pos != t.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

// 6 significant digits, locale-independent.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

// --- dataset loading ------------------------------------------------------

struct CategoricalMapping {
    std::string column;
    std::string reference_level;          // absorbed into the intercept
    std::vector<std::string> indicator_levels;  // one indicator column each
};

struct LoadedDataset {
    Dataset data;
    std::vector<std::string> covariate_names;
    std::vector<CategoricalMapping> categorical_mappings;
};

// Load a delimited dataset.  The response indicator is either read from a
// named 0/1 column or derived from NA outcome cells.  Categorical covariates
// are one-hot expanded to k-1 indicators with the mapping recorded.
inline LoadedDataset load_dataset(const std::string& path, const std::string& outcome_column,
                                  const std::string& response_column = "") {
    std::ifstream in(path);
    if (!in) throw DataError("load_dataset: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("load_dataset: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = detail::split_csv_line(line);
    std::vector<std::string> names;
    for (const auto& h : header) names.push_back(detail::trim(h));

    const auto column_index = [&](const std::string& name) -> int {
        const auto it = std::find(names.begin(), names.end(), name);
        return it == names.end() ? -1 : static_cast<int>(it - names.begin());
    };
    const int y_col = column_index(outcome_column);
    if (y_col < 0) throw DataError("load_dataset: outcome column '" + outcome_column + "' not found");
    int r_col = -1;
    if (!response_column.empty()) {
        r_col = column_index(response_column);
        if (r_col < 0)
            throw DataError("load_dataset: response column '" + response_column + "' not found");
    }

    std::vector<std::vector<std::string>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != names.size())
            throw DataError("load_dataset: line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(names.size()));
        rows.push_back(std::move(cells));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw DataError("load_dataset: no data rows in " + path);

    LoadedDataset out;
    out.data.y.resize(n);
    out.data.r.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::string& cell = rows[i][y_col];
        if (detail::is_na_token(cell)) {
            out.data.y[i] = 0.0;
            out.data.r[i] = 0.0;
        } else {
            const auto v = detail::parse_number(cell);
            if (!v)
                throw DataError("load_dataset: non-numeric outcome '" + cell + "' on line " +
                                std::to_string(i + 2));
            out.data.y[i] = *v;
            out.data.r[i] = 1.0;
        }
    }
    if (r_col >= 0) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto v = detail::parse_number(rows[i][r_col]);
            if (!v || (*v != 0.0 && *v != 1.0))
                throw DataError("load_dataset: response column must be 0/1; line " +
                                std::to_string(i + 2));
            if (*v == 1.0 && detail::is_na_token(rows[i][y_col]))
                throw DataError("load_dataset: response=1 but outcome missing on line " +
                                std::to_string(i + 2));
            out.data.r[i] = *v;
            if (*v == 0.0) out.data.y[i] = 0.0;
        }
    }

    // Covariates: every remaining column.  Numeric if every cell parses,
    // otherwise categorical.  Missing covariate cells are an error.
    std::vector<Eigen::VectorXd> columns;
    for (int j = 0; j < static_cast<int>(names.size()); ++j) {
        if (j == y_col || j == r_col) continue;
        bool numeric = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (detail::is_na_token(rows[i][j]))
                throw DataError("load_dataset: missing covariate cell in column '" + names[j] +
                                "' on line " + std::to_string(i + 2));
            if (!detail::parse_number(rows[i][j])) numeric = false;
        }
        if (numeric) {
            Eigen::VectorXd col(n);
            for (Eigen::Index i = 0; i < n; ++i) col[i] = *detail::parse_number(rows[i][j]);
            columns.push_back(std::move(col));
            out.covariate_names.push_back(names[j]);
        } else {
            std::vector<std::string> levels;
            for (Eigen::Index i = 0; i < n; ++i) {
                const std::string v = detail::trim(rows[i][j]);
                if (std::find(levels.begin(), levels.end(), v) == levels.end()) levels.push_back(v);
            }
            std::sort(levels.begin(), levels.end());
            if (levels.size() < 2)
                throw DataError("load_dataset: categorical column '" + names[j] +
                                "' has a single level");
            CategoricalMapping map;
            map.column = names[j];
            map.reference_level = levels.front();
            for (std::size_t k = 1; k < levels.size(); ++k) {
                Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
                for (Eigen::Index i = 0; i < n; ++i)
                    if (detail::trim(rows[i][j]) == levels[k]) col[i] = 1.0;
                columns.push_back(std::move(col));
                out.covariate_names.push_back(names[j] + "=" + levels[k]);
                map.indicator_levels.push_back(levels[k]);
            }
            out.categorical_mappings.push_back(std::move(map));
        }
    }
    out.data.x.resize(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) out.data.x.col(j) = columns[j];
    out.data.validate();
    return out;
}

inline void write_dataset(const std::string& path, const Dataset& data,
                          const std::vector<std::string>& covariate_names,
                          const std::string& outcome_column = "y") {
    std::ofstream outf(path);
    if (!outf) throw DataError("write_dataset: cannot write " + path);
    outf << outcome_column;
    for (const auto& name : covariate_names) outf << "," << name;
    outf << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.r[i] == 1.0) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.y[i]);
            outf << buf;
        }
        for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.x(i, j));
            outf << "," << buf;
        }
        outf << "\n";
    }
}

// --- result serialization -------------------------------------------------

inline const char* metrics_header() {
    return "scenario,regime,method,n,replicates,bias,rmse,coverage,ail,failures";
}

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = metrics_header();
    out += "\n";
    for (const MetricsRow& row : rows) {
        out += row.scenario + "," + row.regime + "," + row.method + "," +
               std::to_string(row.n) + "," + std::to_string(row.replicates) + "," +
               detail::format_number(row.bias) + "," + detail::format_number(row.rmse) + "," +
               detail::format_number(row.coverage) + "," + detail::format_number(row.ail) + "," +
               std::to_string(row.failures) + "\n";
    }
    return out;
}

inline std::string metrics_json(const std::vector<MetricsRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const MetricsRow& row : rows) {
        nlohmann::ordered_json obj;
        obj["scenario"] = row.scenario;
        obj["regime"] = row.regime;
        obj["method"] = row.method;
        obj["n"] = row.n;
        obj["replicates"] = row.replicates;
        // Serialized via the same 6-significant-digit text as the CSV so the
        // two formats stay numerically identical.
        obj["bias"] = std::stod(detail::format_number(row.bias));
        obj["rmse"] = std::stod(detail::format_number(row.rmse));
        obj["coverage"] = std::stod(detail::format_number(row.coverage));
        obj["ail"] = std::stod(detail::format_number(row.ail));
        obj["failures"] = row.failures;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

inline void emit_results(const std::vector<MetricsRow>& rows, const std::string& format,
                         const std::string& path) {
    std::string body;
    if (format == "csv") {
        body = metrics_csv(rows);
    } else if (format == "json") {
        body = metrics_json(rows);
    } else {
        throw ConfigError("emit_results: unknown format '" + format + "'");
    }
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw DataError("emit_results: cannot write " + path);
    outf << body;
    if (!outf) throw DataError("emit_results: write failed for " + path);
}

// --- run configuration ----------------------------------------------------

struct RunConfig {
    ExperimentSpec experiment;
    std::string out_path = "results.csv";
    std::string format = "csv";
};

inline Scenario parse_scenario(const std::string& name) {
    const std::string s = detail::lower(name);
    if (s == "linear") return Scenario::linear;
    if (s == "quadratic") return Scenario::quadratic;
    if (s == "ks" || s == "kang-schafer") return Scenario::ks;
    throw ConfigError("unknown scenario '" + name + "'");
}

inline Method parse_method(const std::string& name) {
    const std::string s = detail::lower(name);
    for (Method m : all_methods())
        if (detail::lower(to_string(m)) == s) return m;
    throw ConfigError("unknown method '" + name + "'");
}

inline RegimeTag parse_regime(const std::string& name) {
    const std::string s = detail::lower(name);
    if (s == "both-correct") return RegimeTag::both_correct;
    if (s == "prop-correct") return RegimeTag::prop_correct;
    if (s == "mean-correct") return RegimeTag::mean_correct;
    if (s == "both-wrong") return RegimeTag::both_wrong;
    throw ConfigError("unknown regime '" + name + "'");
}

inline UncertaintyMode parse_uncertainty(const std::string& name) {
    const std::string s = detail::lower(name);
    if (s == "none") return UncertaintyMode::none;
    if (s == "bootstrap") return UncertaintyMode::bootstrap;
    if (s == "mi-mean") return UncertaintyMode::mi_mean;
    if (s == "mi-draw") return UncertaintyMode::mi_draw;
    throw ConfigError("unknown uncertainty mode '" + name + "'");
}

// Apply a JSON config file to a RunConfig.  Unknown keys are rejected.
inline void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not readable: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    ExperimentSpec& ex = cfg.experiment;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "scenario") ex.scenario = parse_scenario(value.get<std::string>());
            else if (key == "n") ex.n = value.get<Eigen::Index>();
            else if (key == "replicates") ex.replicates = value.get<int>();
            else if (key == "methods") {
                ex.methods.clear();
                for (const auto& name : value) ex.methods.push_back(parse_method(name.get<std::string>()));
            } else if (key == "regimes") {
                ex.regimes.clear();
                for (const auto& name : value) ex.regimes.push_back(parse_regime(name.get<std::string>()));
            } else if (key == "uncertainty") ex.uncertainty = parse_uncertainty(value.get<std::string>());
            else if (key == "resamples") ex.resamples = value.get<int>();
            else if (key == "trees") ex.bart.num_trees = value.get<int>();
            else if (key == "burn") ex.bart.burn_in = value.get<int>();
            else if (key == "draws") ex.bart.num_draws = value.get<int>();
            else if (key == "knots") ex.knot_count = value.get<int>();
            else if (key == "degree") ex.degree = value.get<int>();
            else if (key == "seed") ex.seed = value.get<std::uint64_t>();
            else if (key == "jobs") ex.jobs = value.get<int>();
            else if (key == "out") cfg.out_path = value.get<std::string>();
            else if (key == "format") cfg.format = value.get<std::string>();
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

// Fully-resolved config echo, logged before compute for reproducibility.
inline std::string config_echo(const RunConfig& cfg) {
    const ExperimentSpec& ex = cfg.experiment;
    std::string methods, regimes;
    for (Method m : ex.methods) methods += (methods.empty() ? "" : ",") + to_string(m);
    for (RegimeTag t : ex.regimes) regimes += (regimes.empty() ? "" : ",") + to_string(t);
    std::string s = "config: scenario=" + to_string(ex.scenario) + " n=" + std::to_string(ex.n) +
                    " replicates=" + std::to_string(ex.replicates) + " methods=" + methods +
                    " regimes=" + regimes + " uncertainty=" + to_string(ex.uncertainty) +
                    " resamples=" + std::to_string(ex.resamples) +
                    " trees=" + std::to_string(ex.bart.num_trees) +
                    " burn=" + std::to_string(ex.bart.burn_in) +
                    " draws=" + std::to_string(ex.bart.num_draws) +
                    " knots=" + std::to_string(ex.knot_count) +
                    " degree=" + std::to_string(ex.degree) + " seed=" + std::to_string(ex.seed) +
                    " jobs=" + std::to_string(ex.jobs) + " out=" + cfg.out_path +
                    " format=" + cfg.format;
    return s;
}

}  // namespace robustsq
