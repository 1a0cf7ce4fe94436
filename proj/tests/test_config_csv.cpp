#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "irsnoma/config.hpp"
#include "irsnoma/experiments.hpp"

using namespace irsnoma;

namespace {

std::string scratch_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("irsnoma_test_" + name)).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = scratch_path(name);
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

const char* kSmallScenario = R"({
  "scenario": {
    "n_elements": 4,
    "bs_link": { "m": 4.0, "pathloss_db": -60.0 },
    "ues": [
      { "m": 2.0, "pathloss_db": -68.0, "tx_power_dbm": 20.0 },
      { "m": 1.0, "pathloss_db": -70.0, "tx_power_dbm": 20.0 }
    ],
    "noise_power_dbm": -100.0
  },
  "epsilon_db": [0.0, 5.0],
  "pathloss_gap_db": [0.0],
  "trials": 500,
  "seed": 7
})";

ExperimentSpec small_spec() {
    write_temp("cfg_small.json", kSmallScenario);
    return load_config(scratch_path("cfg_small.json"));
}

} // namespace

TEST_CASE("load_config reads the reference file", "[config]") {
    const ExperimentSpec spec = load_config(std::string(IRSNOMA_SOURCE_DIR) + "/scenarios/table1.json");
    CHECK(spec.scenario.n_elements == 32);
    CHECK(spec.scenario.bs_link.fading.m == 6.0);
    CHECK(spec.scenario.bs_link.pathloss_db == -65.0);
    CHECK(spec.scenario.ue[0].fading.m == 3.0);
    CHECK(spec.scenario.ue[0].pathloss_db == -70.0);
    CHECK(spec.scenario.ue[1].fading.m == 1.5);
    CHECK(spec.scenario.ue[0].tx_power_dbm == 30.0);
    CHECK(spec.scenario.ue[1].tx_power_dbm == 30.0);
    CHECK(spec.scenario.noise_power_dbm == -110.0);
    CHECK(spec.sweep_kind == SweepKind::alpha_sweep);
    CHECK(spec.epsilon_db == std::vector<double>{1.0, 5.0, 10.0});
    CHECK(spec.pathloss_gap_db == std::vector<double>{0.0, 5.0, 10.0});
    CHECK(spec.lambda == 0.1);
    CHECK(spec.trials == 1000000);
    CHECK(spec.seed == 1);
    CHECK(spec.use_analytic);
    CHECK(spec.use_montecarlo);
}

TEST_CASE("load_config applies defaults", "[config]") {
    write_temp("cfg_defaults.json", R"({
      "scenario": {
        "n_elements": 2,
        "bs_link": { "m": 1.0, "pathloss_db": -50.0 },
        "ues": [
          { "m": 1.0, "pathloss_db": -60.0, "tx_power_dbm": 10.0 },
          { "m": 1.0, "pathloss_db": -60.0, "tx_power_dbm": 10.0 }
        ],
        "noise_power_dbm": -90.0
      },
      "epsilon_db": [1.0]
    })");
    const ExperimentSpec spec = load_config(scratch_path("cfg_defaults.json"));
    CHECK(spec.lambda == 0.1);
    CHECK(spec.trials == 1000000);
    CHECK(spec.seed == 1);
    CHECK(spec.use_analytic);
    CHECK(spec.use_montecarlo);
    CHECK(spec.pathloss_gap_db.empty());
}

TEST_CASE("load_config names missing and invalid fields", "[config]") {
    write_temp("cfg_missing.json", R"({
      "scenario": {
        "n_elements": 2,
        "bs_link": { "m": 1.0, "pathloss_db": -50.0 },
        "ues": [
          { "m": 1.0, "pathloss_db": -60.0, "tx_power_dbm": 10.0 },
          { "m": 1.0, "pathloss_db": -60.0, "tx_power_dbm": 10.0 }
        ]
      },
      "epsilon_db": [1.0]
    })");
    try {
        load_config(scratch_path("cfg_missing.json"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("noise_power_dbm") != std::string::npos);
    }

    write_temp("cfg_badm.json", R"({
      "scenario": {
        "n_elements": 2,
        "bs_link": { "m": 1.0, "pathloss_db": -50.0 },
        "ues": [
          { "m": 0.3, "pathloss_db": -60.0, "tx_power_dbm": 10.0 },
          { "m": 1.0, "pathloss_db": -60.0, "tx_power_dbm": 10.0 }
        ],
        "noise_power_dbm": -90.0
      },
      "epsilon_db": [1.0]
    })");
    try {
        load_config(scratch_path("cfg_badm.json"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("m must be >= 0.5") != std::string::npos);
    }

    CHECK_THROWS_AS(load_config("does_not_exist.json"), ConfigError);
}

TEST_CASE("load_config reports parse errors with line context", "[config]") {
    write_temp("cfg_parse.json", "{\n  \"scenario\": {\n  oops\n}\n");
    try {
        load_config(scratch_path("cfg_parse.json"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
    }
}

TEST_CASE("alpha sweep CSV shape and determinism", "[csv]") {
    const ExperimentSpec spec = small_spec();

    std::ostringstream out1;
    run_alpha_sweep(spec, out1);
    std::ostringstream out2;
    run_alpha_sweep(spec, out2);
    CHECK(out1.str() == out2.str());

    const auto lines = lines_of(out1.str());
    REQUIRE(!lines.empty());
    CHECK(lines[0] ==
          "gap_db,epsilon_db,alpha,n1,ue,p_sinr_analytic,p_snr_analytic,p_ic_analytic,"
          "p_ic_mc,ci_low,ci_high,trials,seed");
    // gaps x thresholds x (N+1) splits x 2 users
    CHECK(lines.size() == 1 + 1 * 2 * 5 * 2);

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        REQUIRE(fields.size() == 13);
        for (int col : {5, 6, 7, 8, 9, 10}) {
            const double v = std::stod(fields[static_cast<std::size_t>(col)]);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        const double p = std::stod(fields[8]);
        CHECK(std::stod(fields[9]) <= p);
        CHECK(std::stod(fields[10]) >= p);
    }
}

TEST_CASE("reference configuration yields the full row grid", "[csv]") {
    ExperimentSpec spec = load_config(std::string(IRSNOMA_SOURCE_DIR) + "/scenarios/table1.json");
    spec.use_montecarlo = false;
    std::ostringstream out;
    run_alpha_sweep(spec, out);
    // 3 gaps x 3 thresholds x 33 splits x 2 users
    CHECK(lines_of(out.str()).size() == 1 + 594);
}

TEST_CASE("alpha sweep respects source selection", "[csv]") {
    ExperimentSpec spec = small_spec();
    spec.use_montecarlo = false;
    std::ostringstream analytic_only;
    run_alpha_sweep(spec, analytic_only);
    auto lines = lines_of(analytic_only.str());
    auto fields = split_csv_line(lines[1]);
    REQUIRE(fields.size() == 13);
    CHECK(fields[8].empty());
    CHECK(fields[9].empty());
    CHECK(fields[10].empty());
    CHECK_FALSE(fields[5].empty());

    spec.use_montecarlo = true;
    spec.use_analytic = false;
    std::ostringstream mc_only;
    run_alpha_sweep(spec, mc_only);
    lines = lines_of(mc_only.str());
    fields = split_csv_line(lines[1]);
    REQUIRE(fields.size() == 13);
    CHECK(fields[5].empty());
    CHECK(fields[6].empty());
    CHECK(fields[7].empty());
    CHECK_FALSE(fields[8].empty());
}

TEST_CASE("alpha sweep bytes do not depend on the worker count", "[csv]") {
    const ExperimentSpec spec = small_spec();
    setenv("IRSNOMA_WORKERS", "1", 1);
    std::ostringstream w1;
    run_alpha_sweep(spec, w1);
    setenv("IRSNOMA_WORKERS", "5", 1);
    std::ostringstream w5;
    run_alpha_sweep(spec, w5);
    unsetenv("IRSNOMA_WORKERS");
    CHECK(w1.str() == w5.str());
}

TEST_CASE("robust sweep CSV shape", "[csv]") {
    ExperimentSpec spec = small_spec();
    spec.sweep_kind = SweepKind::robust_vs_threshold;
    spec.pathloss_gap_db = {0.0, 10.0};
    spec.epsilon_db = {0.0, 5.0, 10.0};

    std::ostringstream out;
    run_robust_sweep(spec, out);
    const auto lines = lines_of(out.str());
    REQUIRE(!lines.empty());
    CHECK(lines[0] ==
          "gap_db,epsilon_db,alpha_robust_analytic,alpha_robust_mc,fallback_analytic,"
          "fallback_mc,max_ic_outage");
    CHECK(lines.size() == 1 + 2 * 3);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        REQUIRE(fields.size() == 7);
        CHECK_FALSE(fields[2].empty());
        CHECK_FALSE(fields[3].empty());
    }
}

TEST_CASE("robust sweep with lambda 0 falls back everywhere", "[csv]") {
    ExperimentSpec spec = small_spec();
    spec.sweep_kind = SweepKind::robust_vs_threshold;
    spec.lambda = 0.0;
    spec.epsilon_db = {0.0, 5.0};

    std::ostringstream out;
    run_robust_sweep(spec, out);
    const auto lines = lines_of(out.str());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        REQUIRE(fields.size() == 7);
        CHECK(std::stod(fields[2]) == 1.0);
        CHECK(std::stod(fields[3]) == 1.0);
        CHECK(fields[4] == "1");
        CHECK(fields[5] == "1");
    }
}

TEST_CASE("file overloads create byte-identical reruns", "[csv]") {
    const ExperimentSpec spec = small_spec();
    run_alpha_sweep(spec, scratch_path("sweep_run1.csv"));
    run_alpha_sweep(spec, scratch_path("sweep_run2.csv"));
    std::ifstream a(scratch_path("sweep_run1.csv"), std::ios::binary);
    std::ifstream b(scratch_path("sweep_run2.csv"), std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
}
