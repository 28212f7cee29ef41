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

#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "pigates/model.hpp"
#include "pigates/snap.hpp"

namespace pigates {

/// Scenario description shared by the CLI tasks: either a named preset
/// ("snap2_ideal", "snap2_approx", "snap3_ideal") with parameter overrides,
/// or an inline model object. All config frequencies are ordinary (MHz) and
/// are multiplied by 2*pi on ingestion; times are in us.
struct Scenario {
    SystemModel model;
    SnapConfig snap;           // populated for preset scenarios
    bool has_snap = false;     // false for inline models
    std::vector<std::string> level_names;

    int level_index(const std::string& name) const;
};

SnapConfig snap_config_from_json(const nlohmann::json& params, int levels);
Scenario scenario_from_config(const nlohmann::json& config);
SystemModel model_from_json(const nlohmann::json& model_spec);

struct RunOptions {
    std::string task;
    std::string config_path;
    std::string out_dir = ".";
    int max_order = -1;    // override config when >= 0
    int dyson_order = -1;
};

/// Executes one task (check-pi, simulate, metrics, sweep, qec-check) and
/// writes its report files under out_dir. Returns a process exit status;
/// validation and certification failures are diagnosed on the log stream.
int run_scenario(const RunOptions& options, std::ostream& log);

/// Sweep one numeric scenario parameter and render the per-outcome metric rows
/// as CSV with the header value,outcome,population,f_avg,weighted_infidelity,converged.
std::string sweep_csv(const nlohmann::json& config, std::ostream& log);

}  // namespace pigates
