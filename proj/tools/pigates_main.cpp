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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pigates/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pigates: simulation and path-independence certification of "
                 "ancilla-assisted gates under Markovian ancilla noise"};
    app.require_subcommand(1);

    pigates::RunOptions options;
    long long seed = 0;  // reserved; the pipeline is deterministic

    for (const std::string task : {"check-pi", "simulate", "metrics", "sweep", "qec-check"}) {
        auto* sub = app.add_subcommand(task);
        sub->add_option("--config", options.config_path, "scenario config (JSON)")->required();
        sub->add_option("--out", options.out_dir, "output directory");
        sub->add_option("--max-order", options.max_order, "certification order bound");
        sub->add_option("--dyson-order", options.dyson_order, "jump-expansion truncation");
        sub->add_option("--seed", seed, "ignored (reserved; no randomness in the pipeline)");
        sub->callback([task, &options]() { options.task = task; });
    }

    CLI11_PARSE(app, argc, argv);
    return pigates::run_scenario(options, std::cout);
}
