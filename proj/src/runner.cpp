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

#include "pigates/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pigates/picert.hpp"
#include "pigates/qec.hpp"

namespace pigates {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<std::string> default_level_names(int d) {
    static const char* names[] = {"g", "e", "f", "h"};
    std::vector<std::string> out;
    for (int m = 0; m < d; ++m) {
        out.push_back(m < 4 ? names[m] : std::to_string(m));
    }
    return out;
}

int worker_count(size_t points) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("PIGATES_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) n = static_cast<unsigned>(parsed);
    }
    if (n == 0) n = 1;
    return static_cast<int>(std::min<size_t>(n, points));
}

CMatrix matrix_from_json(const nlohmann::json& spec) {
    // [[ [re, im], ... ], ...]
    const int rows = static_cast<int>(spec.size());
    const int cols = rows > 0 ? static_cast<int>(spec[0].size()) : 0;
    CMatrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const auto& cell = spec[i][j];
            if (cell.is_array()) {
                out(i, j) = Complex(cell[0].get<double>(), cell[1].get<double>());
            } else {
                out(i, j) = Complex(cell.get<double>(), 0.0);
            }
        }
    }
    return out;
}

}  // namespace

int Scenario::level_index(const std::string& name) const {
    for (size_t m = 0; m < level_names.size(); ++m) {
        if (level_names[m] == name) return static_cast<int>(m);
    }
    try {
        const int idx = std::stoi(name);
        if (idx >= 0 && idx < static_cast<int>(level_names.size())) return idx;
    } catch (...) {
    }
    throw std::invalid_argument("unknown ancilla level name: " + name);
}

SnapConfig snap_config_from_json(const nlohmann::json& params, int levels) {
    SnapConfig cfg;
    cfg.levels = levels;
    cfg.phases = {0.0, 0.0, M_PI / 4.0};
    cfg.t_phi = 70.0;
    if (levels == 3) {
        cfg.t1 = 50.0;
        cfg.t1_ge = 50.0;
    }
    if (params.contains("chi_mhz")) cfg.chi = kTwoPi * params["chi_mhz"].get<double>();
    if (params.contains("omega_mhz")) cfg.omega = kTwoPi * params["omega_mhz"].get<double>();
    if (params.contains("omega_over_chi")) cfg.omega = params["omega_over_chi"].get<double>() * cfg.chi;
    if (params.contains("delta_mhz")) cfg.delta = kTwoPi * params["delta_mhz"].get<double>();
    if (params.contains("t_phi_us")) cfg.t_phi = params["t_phi_us"].get<double>();
    if (params.contains("t1_us")) cfg.t1 = params["t1_us"].get<double>();
    if (params.contains("t1_ge_us")) cfg.t1_ge = params["t1_ge_us"].get<double>();
    if (params.contains("fock_dim")) cfg.fock_dim = params["fock_dim"].get<int>();
    if (params.contains("duration_us")) cfg.duration = params["duration_us"].get<double>();
    if (params.contains("phases")) cfg.phases = params["phases"].get<std::vector<double>>();
    if (params.contains("dephasing")) {
        const std::string conv = params["dephasing"].get<std::string>();
        if (conv == "unit_square") {
            cfg.dephasing = DephasingConvention::unit_square;
        } else if (conv == "ground_projector") {
            cfg.dephasing = DephasingConvention::ground_projector;
        } else {
            throw std::invalid_argument("unknown dephasing convention: " + conv);
        }
    }
    return cfg;
}

SystemModel model_from_json(const nlohmann::json& spec) {
    const int d = spec.at("ancilla_dim").get<int>();
    const int n = spec.at("fock_dim").get<int>();
    const double chi = kTwoPi * spec.value("chi_mhz", 0.0);

    std::vector<std::string> names = default_level_names(d);
    if (spec.contains("levels")) names = spec["levels"].get<std::vector<std::string>>();
    auto level_of = [&](const nlohmann::json& token) -> int {
        if (token.is_number_integer()) return token.get<int>();
        const std::string name = token.get<std::string>();
        for (size_t m = 0; m < names.size(); ++m) {
            if (names[m] == name) return static_cast<int>(m);
        }
        throw std::invalid_argument("unknown level name in model: " + name);
    };

    CMatrix number = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) number(k, k) = k;

    // One control entry; duration from it.
    const auto& controls = spec.at("controls");
    if (!controls.is_array() || controls.size() != 1) {
        throw std::invalid_argument("model: exactly one control entry is supported");
    }
    const auto& ctrl = controls[0];
    const std::string ctrl_type = ctrl.at("type").get<std::string>();

    ControlSchedule schedule;
    double duration = 0;
    if (ctrl_type == "pi_pairs") {
        PiControlSpec pi_spec;
        double omega_ref = 0;
        for (const auto& pair_spec : ctrl.at("pairs")) {
            PiControlPair pair;
            pair.level_m = level_of(pair_spec.at("levels")[0]);
            pair.level_n = level_of(pair_spec.at("levels")[1]);
            pair.amplitude = kTwoPi * pair_spec.at("omega_mhz").get<double>();
            omega_ref = std::max(omega_ref, pair.amplitude);
            pair.detuning_m = kTwoPi * pair_spec.value("detuning_m_mhz", 0.0);
            pair.detuning_n = kTwoPi * pair_spec.value("detuning_n_mhz", 0.0);
            if (pair_spec.contains("matrix")) {
                pair.unitary = matrix_from_json(pair_spec["matrix"]);
            } else if (pair_spec.contains("phases")) {
                pair.unitary = snap_operator(pair_spec["phases"].get<std::vector<double>>(), n);
            } else {
                pair.unitary = CMatrix::Identity(n, n);
            }
            pi_spec.pairs.push_back(std::move(pair));
        }
        duration = ctrl.value("duration_us", 0.0);
        if (duration <= 0) duration = M_PI / (2.0 * omega_ref);
        // Interaction-picture pair drive: constant matrix of the spec'ed form.
        SystemModel frame_stub = build_model(
            d, n, CMatrix::Zero(d * n, d * n), {},
            ControlSchedule::constant(CMatrix::Zero(d * n, d * n), duration), {});
        schedule = ControlSchedule::constant(build_pi_control(frame_stub, pi_spec, 0.0), duration);
    } else if (ctrl_type == "explicit") {
        PiecewiseMatrix segments(0.0);
        for (const auto& seg : ctrl.at("segments")) {
            segments.append(seg.at("t1_us").get<double>(), matrix_from_json(seg.at("matrix")));
        }
        schedule = ControlSchedule::piecewise(std::move(segments));
        duration = schedule.duration();
    } else if (ctrl_type == "ideal_snap" || ctrl_type == "approx_snap") {
        throw std::invalid_argument("model: use a snap preset scenario for type " + ctrl_type);
    } else {
        throw std::invalid_argument("model: unknown control type " + ctrl_type);
    }

    // Frames: named builder or explicit diagonal blocks (MHz).
    std::vector<PiecewiseMatrix> frames;
    if (spec.contains("frame")) {
        const auto& frame = spec["frame"];
        if (frame.is_string()) {
            const std::string kind = frame.get<std::string>();
            if (kind == "zero") {
                // leave empty: zero frames
            } else if (kind == "dispersive") {
                for (int m = 0; m < d; ++m) {
                    const double weight = (m == 0) ? 0.0 : 1.0;
                    frames.push_back(
                        PiecewiseMatrix::constant(-weight * chi * number, 0.0, duration));
                }
            } else {
                throw std::invalid_argument("model: unknown frame builder " + kind);
            }
        } else if (frame.is_object() && frame.contains("chi_weights")) {
            const auto weights = frame["chi_weights"].get<std::vector<double>>();
            if (static_cast<int>(weights.size()) != d) {
                throw std::invalid_argument("model: chi_weights must list one weight per level");
            }
            for (int m = 0; m < d; ++m) {
                frames.push_back(
                    PiecewiseMatrix::constant(-weights[m] * chi * number, 0.0, duration));
            }
        } else if (frame.is_array()) {
            for (const auto& diag : frame) {
                const auto entries = diag.get<std::vector<double>>();
                if (static_cast<int>(entries.size()) != n) {
                    throw std::invalid_argument("model: frame diagonal must have fock_dim entries");
                }
                CMatrix h = CMatrix::Zero(n, n);
                for (int k = 0; k < n; ++k) h(k, k) = kTwoPi * entries[k];
                frames.push_back(PiecewiseMatrix::constant(h, 0.0, duration));
            }
        } else {
            throw std::invalid_argument("model: unsupported frame spec");
        }
    }

    // Jumps.
    std::vector<JumpOperator> jumps;
    if (spec.contains("jumps")) {
        for (const auto& jspec : spec["jumps"]) {
            double rate = 0;
            if (jspec.contains("rate_per_us")) {
                rate = jspec["rate_per_us"].get<double>();
            } else if (jspec.contains("t_coherence_us")) {
                rate = 1.0 / jspec["t_coherence_us"].get<double>();
            } else {
                throw std::invalid_argument("model: jump needs rate_per_us or t_coherence_us");
            }
            const std::string type = jspec.at("type").get<std::string>();
            if (type == "dephasing") {
                CVector weights(d);
                if (jspec.contains("weights")) {
                    const auto w = jspec["weights"].get<std::vector<double>>();
                    if (static_cast<int>(w.size()) != d) {
                        throw std::invalid_argument("model: dephasing weights per level required");
                    }
                    for (int m = 0; m < d; ++m) weights[m] = w[m];
                } else {
                    for (int m = 0; m < d; ++m) weights[m] = (m == 0) ? 1.0 : ((m == 1) ? -1.0 : 0.0);
                }
                jumps.push_back(dephasing_jump(d, n, weights, rate));
            } else if (type == "relaxation") {
                const int from = level_of(jspec.at("levels")[0]);
                const int to = level_of(jspec.at("levels")[1]);
                jumps.push_back(relaxation_jump(d, n, to, from, rate));
            } else if (type == "general") {
                JumpOperator j;
                j.op = matrix_from_json(jspec.at("matrix"));
                j.rate = rate;
                jumps.push_back(std::move(j));
            } else {
                throw std::invalid_argument("model: unknown jump type " + type);
            }
        }
    }

    CMatrix h0 = CMatrix::Zero(d * n, d * n);
    for (int m = 0; m < d && m < static_cast<int>(frames.size()); ++m) {
        if (!frames[m].empty()) h0.block(m * n, m * n, n, n) = frames[m].segment_value(0);
    }

    SystemModel model = build_model(d, n, h0, std::move(frames), std::move(schedule),
                                    std::move(jumps));
    // Revalidate general jumps against the built model so classification
    // metadata is populated.
    std::vector<JumpOperator> classified;
    for (const auto& jump : model.jumps()) {
        classified.push_back(validate_jump(model, jump.op, jump.rate));
    }
    return build_model(d, n, h0, std::vector<PiecewiseMatrix>(model.frame_terms()),
                       model.control(), std::move(classified));
}

Scenario scenario_from_config(const nlohmann::json& config) {
    Scenario scenario;
    if (config.contains("model")) {
        scenario.model = model_from_json(config["model"]);
        scenario.has_snap = false;
        scenario.level_names = default_level_names(scenario.model.ancilla_dim());
        if (config["model"].contains("levels")) {
            scenario.level_names = config["model"]["levels"].get<std::vector<std::string>>();
        }
        return scenario;
    }
    const std::string name = config.at("scenario").get<std::string>();
    const nlohmann::json params = config.value("params", nlohmann::json::object());
    if (name == "snap2_ideal") {
        scenario.snap = snap_config_from_json(params, 2);
        scenario.model = build_snap_scenario(scenario.snap);
    } else if (name == "snap2_approx") {
        scenario.snap = snap_config_from_json(params, 2);
        scenario.model = build_approx_snap_scenario(scenario.snap);
    } else if (name == "snap3_ideal") {
        scenario.snap = snap_config_from_json(params, 3);
        scenario.model = build_snap_scenario(scenario.snap);
    } else {
        throw std::invalid_argument(
            "unknown scenario '" + name +
            "' (expected snap2_ideal, snap2_approx, snap3_ideal, or an inline model)");
    }
    scenario.has_snap = true;
    scenario.level_names = default_level_names(scenario.model.ancilla_dim());
    return scenario;
}

// ---------------------------------------------------------------------------
// Tasks

namespace {

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json config;
    in >> config;
    return config;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << text;
}

MetricsOptions metrics_options_from_config(const Scenario& scenario,
                                           const nlohmann::json& config,
                                           const LogicalCode& code, int dyson_order_override) {
    MetricsOptions options;
    options.initial = scenario.level_index(config.value("initial", std::string("g")));
    if (scenario.has_snap) {
        options.targets = snap_targets(scenario.snap, code);
        options.unconditioned_target = options.targets.at(scenario.snap.upper_level());
    }
    if (config.contains("targets")) {
        options.targets.clear();
        for (const auto& [key, value] : config["targets"].items()) {
            const int outcome = scenario.level_index(key);
            if (value.is_string()) {
                const std::string kind = value.get<std::string>();
                if (kind == "identity") {
                    options.targets[outcome] = CMatrix::Identity(code.dim(), code.dim());
                } else if (kind == "snap_inverse") {
                    options.targets[outcome] =
                        code.basis.adjoint() *
                        snap_operator(scenario.snap.phases, scenario.snap.fock_dim).adjoint() *
                        code.basis;
                } else {
                    throw std::invalid_argument("unknown target kind: " + kind);
                }
            } else {
                options.targets[outcome] = matrix_from_json(value);
            }
        }
    }
    options.include_unconditioned = config.value("include_unconditioned", false);
    if (options.include_unconditioned && options.unconditioned_target.size() == 0) {
        throw std::invalid_argument("unconditioned comparison needs a snap preset scenario");
    }
    options.dyson_order = dyson_order_override >= 0 ? dyson_order_override
                                                    : config.value("dyson_order", 3);
    options.convergence_check = config.value("convergence_check", true);
    options.routes.clear();
    const auto route_names =
        config.value("routes", std::vector<std::string>{"lindblad"});
    for (const auto& name : route_names) {
        if (name == "dyson") {
            options.routes.push_back(MetricsRoute::dyson);
        } else if (name == "lindblad") {
            options.routes.push_back(MetricsRoute::lindblad);
        } else {
            throw std::invalid_argument("unknown metrics route: " + name);
        }
    }
    return options;
}

nlohmann::json metrics_to_json(const std::vector<GateMetrics>& rows,
                               const Scenario& scenario) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json item;
        item["outcome"] =
            row.outcome < 0 ? "unconditioned" : scenario.level_names[row.outcome];
        item["route"] = row.route;
        item["population"] = row.population;
        item["process_fidelity"] = row.process_fidelity;
        item["average_fidelity"] = row.average_fidelity;
        item["weighted_infidelity"] = row.weighted_infidelity;
        item["converged"] = row.converged;
        out.push_back(item);
    }
    return out;
}

int task_check_pi(const Scenario& scenario, const nlohmann::json& config,
                  const RunOptions& options, std::ostream& log) {
    const int max_order =
        options.max_order >= 0 ? options.max_order : config.value("max_order", 3);
    const bool use_numeric = config.value("use_numeric", true);
    const PiReport report = certify_model(scenario.model, max_order, use_numeric);
    write_text(std::filesystem::path(options.out_dir) / "pi_report.json", to_json(report));
    int disagreements = 0;
    for (const auto& entry : report.entries) {
        if (!entry.methods_agree) ++disagreements;
        log << "pair (" << scenario.level_names[entry.initial] << ","
            << scenario.level_names[entry.final_level] << "): ";
        if (entry.unreachable) {
            log << "unreachable";
        } else {
            log << "order " << entry.order << (entry.at_max_checked ? " (>= max checked)" : "");
        }
        if (!entry.methods_agree) log << "  [routes disagree]";
        log << "\n";
    }
    if (disagreements > 0) {
        log << "certification error: symbolic and numeric routes disagree on " << disagreements
            << " pair(s)\n";
        return 3;
    }
    return 0;
}

int task_simulate(const Scenario& scenario, const nlohmann::json& config,
                  const RunOptions& options, std::ostream& log) {
    const SystemModel& model = scenario.model;
    const int n = model.central_dim();
    const int initial = scenario.level_index(config.value("initial", std::string("g")));
    const int fock = config.value("fock", 0);
    CMatrix rho0 = CMatrix::Zero(model.joint_dim(), model.joint_dim());
    rho0(initial * n + fock, initial * n + fock) = 1.0;

    MasterOptions master;
    master.halving_check = config.value("convergence_check", true);
    MasterResult result;
    const CMatrix rho = evolve_master(model, rho0, model.duration(), master, &result);

    nlohmann::ordered_json out;
    out["trace"] = std::real(rho.trace());
    out["purity"] = std::real((rho * rho).trace());
    out["converged"] = result.converged;
    nlohmann::ordered_json pops = nlohmann::ordered_json::object();
    for (int m = 0; m < model.ancilla_dim(); ++m) {
        pops[scenario.level_names[m]] =
            std::real(rho.block(m * n, m * n, n, n).trace());
    }
    out["populations"] = pops;
    write_text(std::filesystem::path(options.out_dir) / "simulate.json", out.dump(2) + "\n");
    log << "simulate: trace " << format_double(out["trace"].get<double>()) << ", purity "
        << format_double(out["purity"].get<double>()) << "\n";
    return 0;
}

int task_metrics(const Scenario& scenario, const nlohmann::json& config,
                 const RunOptions& options, std::ostream& log) {
    if (!scenario.has_snap && !config.contains("targets")) {
        throw std::invalid_argument("metrics on an inline model needs explicit targets");
    }
    const LogicalCode code = binomial_code(scenario.model.central_dim());
    const MetricsOptions metrics_options =
        metrics_options_from_config(scenario, config, code, options.dyson_order);
    const auto rows =
        gate_metrics(scenario.model, code, metrics_options, scenario.model.duration());
    const nlohmann::json out = metrics_to_json(rows, scenario);
    write_text(std::filesystem::path(options.out_dir) / "metrics.json", out.dump(2) + "\n");
    for (const auto& row : rows) {
        log << "outcome "
            << (row.outcome < 0 ? std::string("unconditioned")
                                : scenario.level_names[row.outcome])
            << " [" << row.route << "]: population " << format_double(row.population)
            << ", weighted infidelity " << format_double(row.weighted_infidelity) << "\n";
    }
    return 0;
}

int task_qec_check(const Scenario& scenario, const nlohmann::json& config,
                   const RunOptions& options, std::ostream& log) {
    if (!scenario.has_snap || scenario.snap.levels != 3) {
        throw std::invalid_argument("qec-check expects the snap3_ideal scenario");
    }
    const SnapConfig& cfg = scenario.snap;
    const int n = cfg.fock_dim;
    const LogicalCode code = binomial_code(n);

    std::vector<CMatrix> errors;
    const auto error_names =
        config.value("errors", std::vector<std::string>{"identity", "lowering"});
    for (const auto& name : error_names) {
        if (name == "identity") {
            errors.push_back(CMatrix::Identity(n, n));
        } else if (name == "lowering") {
            CMatrix a = CMatrix::Zero(n, n);
            for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
            errors.push_back(a);
        } else {
            throw std::invalid_argument("unknown error name: " + name);
        }
    }

    const KlDiagonalization kl = kl_diagonalize(code, errors);
    const CMatrix code_target =
        snap_operator(cfg.phases, n).adjoint() * code.projector;  // S(-phases) on the code
    const CMatrix extended_unitary = build_pi_et_unitary(kl, code_target);
    const SystemModel extended = build_dispersive_scenario(cfg, extended_unitary);
    const SystemModel plain = build_snap_scenario(cfg);

    const std::vector<double> fractions =
        config.value("insertion_fractions", std::vector<double>{0.2, 0.5, 0.8});
    std::vector<double> times;
    for (double f : fractions) times.push_back(f * extended.duration());

    nlohmann::ordered_json out;
    out["kl_weights"] = std::vector<double>(kl.weights.data(), kl.weights.data() + kl.weights.size());
    nlohmann::ordered_json deviations = nlohmann::ordered_json::object();
    for (size_t k = 1; k < kl.diagonal_errors.size(); ++k) {
        const CMatrix& f_op = kl.diagonal_errors[k];
        const double dev_extended =
            error_timing_equivalence(extended, code, f_op, times, extended.duration(), 0, 2);
        const double dev_plain =
            error_timing_equivalence(plain, code, f_op, times, plain.duration(), 0, 2);
        deviations["component_" + std::to_string(k)] = {
            {"extended", dev_extended}, {"plain", dev_plain}};
        log << "error component " << k << ": timing deviation extended "
            << format_double(dev_extended) << ", plain " << format_double(dev_plain) << "\n";
    }
    out["timing_deviations"] = deviations;
    const CommutatorCertificate cert =
        commutator_condition(extended, kl.diagonal_errors.back());
    out["commutator_certificate_valid"] = cert.valid;
    out["commutator_max_residual"] = cert.max_residual;
    write_text(std::filesystem::path(options.out_dir) / "qec_report.json", out.dump(2) + "\n");
    return 0;
}

struct SweepPoint {
    double value = 0;
    std::vector<GateMetrics> rows;
    bool failed = false;
};

}  // namespace

std::string sweep_csv(const nlohmann::json& config, std::ostream& log) {
    const auto& sweep = config.at("sweep");
    const std::string axis = sweep.at("axis").get<std::string>();
    const auto values = sweep.at("values").get<std::vector<double>>();
    if (values.size() < 2) {
        throw std::invalid_argument("sweep needs at least 2 axis values");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("sweep values must be finite");
    }

    std::vector<SweepPoint> points(values.size());
    std::atomic<size_t> cursor{0};
    auto run_point = [&](size_t idx) {
        SweepPoint& point = points[idx];
        point.value = values[idx];
        try {
            nlohmann::json point_config = config;
            point_config["params"][axis] = values[idx];
            const Scenario scenario = scenario_from_config(point_config);
            const LogicalCode code = binomial_code(scenario.model.central_dim());
            const MetricsOptions options =
                metrics_options_from_config(scenario, point_config, code, -1);
            point.rows = gate_metrics(scenario.model, code, options, scenario.model.duration());
        } catch (const std::exception& err) {
            point.failed = true;
        }
    };

    const int workers = worker_count(values.size());
    if (workers <= 1) {
        for (size_t idx = 0; idx < values.size(); ++idx) run_point(idx);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (size_t idx = cursor.fetch_add(1); idx < values.size();
                     idx = cursor.fetch_add(1)) {
                    run_point(idx);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Rows ordered by axis value position regardless of completion order.
    std::ostringstream csv;
    csv << "value,outcome,population,f_avg,weighted_infidelity,converged\n";
    const auto level_names = default_level_names(4);
    for (const auto& point : points) {
        if (point.failed) {
            csv << format_double(point.value) << ",error,nan,nan,nan,false\n";
            log << "sweep point " << format_double(point.value) << " failed\n";
            continue;
        }
        for (const auto& row : point.rows) {
            const std::string outcome =
                row.outcome < 0 ? "unconditioned" : level_names[row.outcome];
            csv << format_double(point.value) << "," << outcome << ","
                << format_double(row.population) << "," << format_double(row.average_fidelity)
                << "," << format_double(row.weighted_infidelity) << ","
                << (row.converged ? "true" : "false") << "\n";
        }
    }
    return csv.str();
}

int run_scenario(const RunOptions& options, std::ostream& log) {
    nlohmann::json config;
    try {
        config = load_config_file(options.config_path);
    } catch (const std::exception& err) {
        log << "config error: " << err.what() << "\n";
        return 2;
    }

    std::string task = options.task;
    if (task.empty()) task = config.value("task", std::string{});
    if (task.empty()) {
        log << "config error: no task given\n";
        return 2;
    }

    log << "pigates " << task
        << " (config frequencies are MHz, converted to angular rad/us; times in us)\n";

    try {
        std::filesystem::create_directories(options.out_dir);
        if (task == "sweep") {
            const std::string csv = sweep_csv(config, log);
            write_text(std::filesystem::path(options.out_dir) / "sweep.csv", csv);
            return 0;
        }
        const Scenario scenario = scenario_from_config(config);
        if (task == "check-pi") return task_check_pi(scenario, config, options, log);
        if (task == "simulate") return task_simulate(scenario, config, options, log);
        if (task == "metrics") return task_metrics(scenario, config, options, log);
        if (task == "qec-check") return task_qec_check(scenario, config, options, log);
        log << "unknown task: " << task << "\n";
        return 2;
    } catch (const std::exception& err) {
        log << "error: " << err.what() << "\n";
        return 1;
    }
}

}  // namespace pigates
