#pragma once

// JSON experiment configuration. See scenarios/table1.json for the schema;
// every field error names the offending key, parse errors carry line/column
// context.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "irsnoma/model.hpp"

namespace irsnoma {

enum class SweepKind { alpha_sweep, robust_vs_threshold };

struct ExperimentSpec {
    Scenario scenario;
    SweepKind sweep_kind = SweepKind::alpha_sweep;
    std::vector<double> epsilon_db;
    std::vector<double> pathloss_gap_db; // empty: use the scenario's own pathlosses
    double lambda = 0.1;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    bool use_analytic = true;
    bool use_montecarlo = true;

    void validate() const {
        scenario.validate();
        if (epsilon_db.empty()) {
            throw std::invalid_argument("ExperimentSpec: epsilon_db must be non-empty");
        }
        if (!(lambda >= 0.0 && lambda <= 1.0)) {
            throw std::invalid_argument("ExperimentSpec: lambda must lie in [0,1]");
        }
        if (use_montecarlo && trials < 1) {
            throw std::invalid_argument("ExperimentSpec: trials must be >= 1 when montecarlo is requested");
        }
        if (!use_analytic && !use_montecarlo) {
            throw std::invalid_argument("ExperimentSpec: at least one source must be enabled");
        }
    }
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& obj, const std::string& key,
                                         const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError("config: missing field '" + where + key + "'");
    }
    return obj.at(key);
}

inline double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
    const auto& v = require_key(obj, key, where);
    if (!v.is_number()) {
        throw ConfigError("config: field '" + where + key + "' must be a number");
    }
    return v.get<double>();
}

inline Scenario parse_scenario(const nlohmann::json& j) {
    Scenario s;
    const auto& n = require_key(j, "n_elements", "scenario.");
    if (!n.is_number_integer() || n.get<long long>() < 1) {
        throw ConfigError("config: field 'scenario.n_elements' must be a positive integer");
    }
    s.n_elements = n.get<int>();

    const auto& bs = require_key(j, "bs_link", "scenario.");
    s.bs_link.pathloss_db = require_number(bs, "pathloss_db", "scenario.bs_link.");
    s.bs_link.fading.m = require_number(bs, "m", "scenario.bs_link.");

    const auto& ues = require_key(j, "ues", "scenario.");
    if (!ues.is_array() || ues.size() != 2) {
        throw ConfigError("config: field 'scenario.ues' must be an array of exactly 2 entries");
    }
    for (std::size_t i = 0; i < 2; ++i) {
        const std::string where = "scenario.ues[" + std::to_string(i) + "].";
        s.ue[i].fading.m = require_number(ues[i], "m", where);
        s.ue[i].pathloss_db = require_number(ues[i], "pathloss_db", where);
        s.ue[i].tx_power_dbm = require_number(ues[i], "tx_power_dbm", where);
    }
    s.noise_power_dbm = require_number(j, "noise_power_dbm", "scenario.");
    try {
        s.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return s;
}

inline void byte_to_line_col(const std::string& text, std::size_t byte, std::size_t& line,
                             std::size_t& col) {
    line = 1;
    col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

} // namespace detail

/// Load and fully validate an experiment configuration.
inline ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 0, col = 0;
        detail::byte_to_line_col(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
        throw ConfigError("config: parse error in '" + path + "' at line " + std::to_string(line) +
                          ", column " + std::to_string(col) + ": " + e.what());
    }

    ExperimentSpec spec;
    spec.scenario = detail::parse_scenario(detail::require_key(j, "scenario", ""));

    if (j.contains("sweep")) {
        const std::string kind = j.at("sweep").get<std::string>();
        if (kind == "alpha_sweep") {
            spec.sweep_kind = SweepKind::alpha_sweep;
        } else if (kind == "robust_vs_threshold") {
            spec.sweep_kind = SweepKind::robust_vs_threshold;
        } else {
            throw ConfigError("config: field 'sweep' must be 'alpha_sweep' or 'robust_vs_threshold'");
        }
    }

    const auto& eps = detail::require_key(j, "epsilon_db", "");
    if (!eps.is_array() || eps.empty()) {
        throw ConfigError("config: field 'epsilon_db' must be a non-empty array of numbers");
    }
    for (const auto& v : eps) {
        if (!v.is_number()) {
            throw ConfigError("config: field 'epsilon_db' must contain numbers only");
        }
        spec.epsilon_db.push_back(v.get<double>());
    }

    if (j.contains("pathloss_gap_db")) {
        const auto& gaps = j.at("pathloss_gap_db");
        if (!gaps.is_array()) {
            throw ConfigError("config: field 'pathloss_gap_db' must be an array of numbers");
        }
        for (const auto& v : gaps) {
            if (!v.is_number()) {
                throw ConfigError("config: field 'pathloss_gap_db' must contain numbers only");
            }
            spec.pathloss_gap_db.push_back(v.get<double>());
        }
    }

    if (j.contains("lambda")) spec.lambda = j.at("lambda").get<double>();
    if (j.contains("trials")) {
        if (!j.at("trials").is_number_integer() || j.at("trials").get<long long>() < 1) {
            throw ConfigError("config: field 'trials' must be a positive integer");
        }
        spec.trials = j.at("trials").get<std::uint64_t>();
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("sources")) {
        const auto& sources = j.at("sources");
        if (!sources.is_array() || sources.empty()) {
            throw ConfigError("config: field 'sources' must be a non-empty array");
        }
        spec.use_analytic = false;
        spec.use_montecarlo = false;
        for (const auto& v : sources) {
            const std::string s = v.get<std::string>();
            if (s == "analytic") {
                spec.use_analytic = true;
            } else if (s == "montecarlo") {
                spec.use_montecarlo = true;
            } else {
                throw ConfigError("config: field 'sources' entries must be 'analytic' or 'montecarlo'");
            }
        }
    }

    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return spec;
}

} // namespace irsnoma
