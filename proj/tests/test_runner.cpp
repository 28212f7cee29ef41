// Copyright 2026 The pigates Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pigates/runner.hpp"

using namespace pigates;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("pigates_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const nlohmann::json& config) {
    const fs::path path = dir / "config.json";
    std::ofstream out(path);
    out << config.dump(2);
    return path.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_SUITE_BEGIN("runner");

TEST_CASE("check-pi on the matched three-level preset reports the golden order") {
    const fs::path dir = temp_dir("checkpi");
    nlohmann::json config;
    config["scenario"] = "snap3_ideal";
    config["params"]["fock_dim"] = 5;
    RunOptions options;
    options.task = "check-pi";
    options.config_path = write_config(dir, config);
    options.out_dir = (dir / "out").string();
    options.max_order = 2;
    std::ostringstream log;
    CHECK(run_scenario(options, log) == 0);

    const auto report = nlohmann::json::parse(slurp(dir / "out" / "pi_report.json"));
    bool found = false;
    for (const auto& item : report["pairs"]) {
        if (item["pair"] == nlohmann::json::array({2, 1})) {
            found = true;
            CHECK(item["order"].get<int>() == 2);
        }
    }
    CHECK(found);
}

TEST_CASE("simulate with zero rates reports unit purity") {
    const fs::path dir = temp_dir("simulate");
    nlohmann::json config;
    config["scenario"] = "snap2_ideal";
    config["params"]["fock_dim"] = 9;
    config["params"]["t_phi_us"] = 0.0;
    RunOptions options;
    options.task = "simulate";
    options.config_path = write_config(dir, config);
    options.out_dir = (dir / "out").string();
    std::ostringstream log;
    CHECK(run_scenario(options, log) == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "simulate.json"));
    CHECK(std::abs(report["purity"].get<double>() - 1.0) < 1e-9);
    CHECK(std::abs(report["trace"].get<double>() - 1.0) < 1e-9);
}

TEST_CASE("metrics on the dephasing-only preset stay numerics-limited") {
    const fs::path dir = temp_dir("metrics");
    nlohmann::json config;
    config["scenario"] = "snap2_ideal";
    config["params"]["t_phi_us"] = 70.0;
    config["routes"] = {"lindblad"};
    RunOptions options;
    options.task = "metrics";
    options.config_path = write_config(dir, config);
    options.out_dir = (dir / "out").string();
    std::ostringstream log;
    CHECK(run_scenario(options, log) == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "metrics.json"));
    bool found = false;
    for (const auto& row : report) {
        if (row["outcome"] == "e") {
            found = true;
            CHECK(row["weighted_infidelity"].get<double>() <= 1e-6);
        }
    }
    CHECK(found);
}

TEST_CASE("sweeps emit the fixed CSV header and are byte-stable") {
    const fs::path dir = temp_dir("sweep");
    nlohmann::json config;
    config["scenario"] = "snap2_ideal";
    config["params"]["fock_dim"] = 9;
    config["routes"] = {"lindblad"};
    config["sweep"]["axis"] = "t_phi_us";
    config["sweep"]["values"] = {20.0, 70.0};
    std::ostringstream log;
    const std::string csv_a = sweep_csv(config, log);
    const std::string csv_b = sweep_csv(config, log);
    CHECK(csv_a == csv_b);
    CHECK(csv_a.rfind("value,outcome,population,f_avg,weighted_infidelity,converged\n", 0) == 0);
    // one row per (value, outcome)
    int rows = 0;
    for (char c : csv_a) rows += (c == '\n');
    CHECK(rows == 1 + 2 * 2);
}

TEST_CASE("single-point sweeps are rejected") {
    nlohmann::json config;
    config["scenario"] = "snap2_ideal";
    config["sweep"]["axis"] = "t_phi_us";
    config["sweep"]["values"] = {70.0};
    std::ostringstream log;
    CHECK_THROWS_AS(sweep_csv(config, log), std::invalid_argument);
}

TEST_CASE("malformed configs and unknown scenarios fail with a diagnostic") {
    const fs::path dir = temp_dir("bad");
    {
        std::ofstream out(dir / "broken.json");
        out << "{ not json";
    }
    RunOptions options;
    options.task = "simulate";
    options.config_path = (dir / "broken.json").string();
    options.out_dir = (dir / "out").string();
    std::ostringstream log;
    CHECK(run_scenario(options, log) == 2);

    nlohmann::json config;
    config["scenario"] = "snap9_bogus";
    options.config_path = write_config(dir, config);
    std::ostringstream log2;
    CHECK(run_scenario(options, log2) == 1);
    CHECK(log2.str().find("unknown scenario") != std::string::npos);
}

TEST_CASE("inline models build through the JSON schema") {
    nlohmann::json model;
    model["ancilla_dim"] = 2;
    model["fock_dim"] = 3;
    model["chi_mhz"] = 0.9;
    model["levels"] = {"g", "e"};
    model["frame"] = "dispersive";
    model["controls"] = nlohmann::json::array(
        {{{"type", "pi_pairs"},
          {"pairs", nlohmann::json::array({{{"levels", {"g", "e"}},
                                            {"omega_mhz", 0.1},
                                            {"phases", {0.0, 0.3}}}})}}});
    model["jumps"] = nlohmann::json::array(
        {{{"type", "dephasing"}, {"weights", {1.0, -1.0}}, {"t_coherence_us", 70.0}},
         {{"type", "relaxation"}, {"levels", {"e", "g"}}, {"rate_per_us", 0.01}}});
    const SystemModel built = model_from_json(model);
    CHECK(built.ancilla_dim() == 2);
    CHECK(built.central_dim() == 3);
    CHECK(built.jumps().size() == 2);
    CHECK(built.jumps()[1].kind == JumpKind::relaxation);
    CHECK(built.duration() == doctest::Approx(M_PI / (2 * 2 * M_PI * 0.1)));
}

TEST_SUITE_END();
