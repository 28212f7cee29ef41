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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pigates/dyson.hpp"
#include "pigates/model.hpp"
#include "pigates/numerics.hpp"
#include "pigates/picert.hpp"
#include "pigates/qec.hpp"
#include "pigates/snap.hpp"

namespace py = pybind11;
using namespace pigates;

namespace {

SnapConfig make_snap_config(int levels, double chi, double omega, double delta,
                            std::vector<double> phases, double t_phi, double t1, double t1_ge,
                            int fock_dim, double duration, const std::string& dephasing) {
    SnapConfig cfg;
    cfg.levels = levels;
    cfg.chi = chi;
    cfg.omega = omega;
    cfg.delta = delta;
    cfg.phases = std::move(phases);
    cfg.t_phi = t_phi;
    cfg.t1 = t1;
    cfg.t1_ge = t1_ge;
    cfg.fock_dim = fock_dim;
    cfg.duration = duration;
    if (dephasing == "unit_square") {
        cfg.dephasing = DephasingConvention::unit_square;
    } else if (dephasing == "ground_projector") {
        cfg.dephasing = DephasingConvention::ground_projector;
    } else {
        throw std::invalid_argument("dephasing must be unit_square or ground_projector");
    }
    return cfg;
}

py::dict order_result_to_dict(const PiOrderResult& r) {
    py::dict out;
    out["pair"] = py::make_tuple(r.initial, r.final_level);
    out["order"] = r.unreachable ? py::object(py::str("unreachable")) : py::object(py::int_(r.order));
    out["at_max_checked"] = r.at_max_checked;
    out["symbolic_order"] = r.symbolic_order;
    out["numeric_order"] = r.numeric_order;
    out["methods_agree"] = r.methods_agree;
    py::list witnesses;
    for (const auto& w : r.witnesses) {
        py::dict item;
        item["levels"] = w.levels;
        item["jumps"] = w.jump_edges;
        item["time_dependent"] = w.time_dependent;
        witnesses.append(item);
    }
    out["witnesses"] = witnesses;
    return out;
}

}  // namespace

PYBIND11_MODULE(_pigates, m) {
    m.doc() = "Simulation and path-independence certification of ancilla-assisted "
              "quantum gates under Markovian ancilla noise";

    // numerics
    m.def("matrix_exponential", &matrix_exponential, py::arg("a"));
    m.def("kronecker", &kronecker, py::arg("a"), py::arg("b"));
    m.def("unitary_distance", &unitary_distance, py::arg("u"), py::arg("v"));
    m.def("proportionality_distance", &proportionality_distance, py::arg("x"), py::arg("y"));

    // model / scenarios
    py::class_<SnapConfig>(m, "SnapConfig")
        .def(py::init(&make_snap_config), py::arg("levels") = 2,
             py::arg("chi") = 2 * M_PI * 0.9, py::arg("omega") = 2 * M_PI * 0.1,
             py::arg("delta") = 0.0,
             py::arg("phases") = std::vector<double>{0.0, 0.0, M_PI / 4},
             py::arg("t_phi") = 0.0, py::arg("t1") = 0.0, py::arg("t1_ge") = 0.0,
             py::arg("fock_dim") = 10, py::arg("duration") = 0.0,
             py::arg("dephasing") = "unit_square")
        .def_readwrite("levels", &SnapConfig::levels)
        .def_readwrite("chi", &SnapConfig::chi)
        .def_readwrite("omega", &SnapConfig::omega)
        .def_readwrite("delta", &SnapConfig::delta)
        .def_readwrite("phases", &SnapConfig::phases)
        .def_readwrite("t_phi", &SnapConfig::t_phi)
        .def_readwrite("t1", &SnapConfig::t1)
        .def_readwrite("t1_ge", &SnapConfig::t1_ge)
        .def_readwrite("fock_dim", &SnapConfig::fock_dim)
        .def_readwrite("duration", &SnapConfig::duration)
        .def_property_readonly("gate_time", &SnapConfig::gate_time);

    py::class_<SystemModel>(m, "SystemModel")
        .def_property_readonly("ancilla_dim", &SystemModel::ancilla_dim)
        .def_property_readonly("central_dim", &SystemModel::central_dim)
        .def_property_readonly("duration", &SystemModel::duration)
        .def("hamiltonian", &SystemModel::hamiltonian, py::arg("t"))
        .def("frame_rotation_level", &SystemModel::frame_rotation_level, py::arg("level"),
             py::arg("t"));

    py::class_<LogicalCode>(m, "LogicalCode")
        .def_property_readonly("basis", [](const LogicalCode& c) { return c.basis; })
        .def_property_readonly("projector", [](const LogicalCode& c) { return c.projector; });

    m.def("snap_operator", &snap_operator, py::arg("phases"), py::arg("fock_dim"));
    m.def("build_snap_scenario", &build_snap_scenario, py::arg("config"));
    m.def("build_approx_snap_scenario", &build_approx_snap_scenario, py::arg("config"));
    m.def("build_dispersive_scenario", &build_dispersive_scenario, py::arg("config"),
          py::arg("pair_unitary"));
    m.def("binomial_code", &binomial_code, py::arg("fock_dim"));
    m.def("frame_rotation", &frame_rotation, py::arg("model"), py::arg("t"));

    // evolution
    m.def("effective_hamiltonian", &effective_hamiltonian, py::arg("model"), py::arg("t"));
    m.def("no_jump_propagator", &no_jump_propagator, py::arg("model"), py::arg("t1"),
          py::arg("t2"));
    m.def(
        "evolve_master",
        [](const SystemModel& model, const CMatrix& rho0, double t) {
            return evolve_master(model, rho0, t);
        },
        py::arg("model"), py::arg("rho0"), py::arg("t"));
    m.def(
        "dyson_superoperator",
        [](const SystemModel& model, int order, double t, int quad_points) {
            return dyson_term(model, order, t, quad_points).superoperator;
        },
        py::arg("model"), py::arg("order"), py::arg("t"), py::arg("quad_points") = 0);
    m.def(
        "conditional_channel",
        [](const SystemModel& model, int initial, int final_level, double t, int max_order) {
            const auto ch = conditional_channel(model, initial, final_level, t, max_order);
            py::dict out;
            out["choi"] = ch.choi;
            out["success_weight"] = ch.success_weight;
            return out;
        },
        py::arg("model"), py::arg("initial"), py::arg("final_level"), py::arg("t"),
        py::arg("max_order"));
    m.def("path_operator", &path_operator, py::arg("model"), py::arg("initial"),
          py::arg("jumps_at_times"), py::arg("final_level"), py::arg("t"));
    m.def("exact_pair_propagator", &exact_pair_propagator, py::arg("omega0"), py::arg("omegaz"),
          py::arg("omegaxy"), py::arg("u"), py::arg("dt"));

    // certification
    m.def(
        "pi_order",
        [](const SystemModel& model, int initial, int final_level, int max_order,
           bool use_numeric) {
            return order_result_to_dict(pi_order(model, initial, final_level, max_order,
                                                 use_numeric));
        },
        py::arg("model"), py::arg("initial"), py::arg("final_level"), py::arg("max_order") = 3,
        py::arg("use_numeric") = true);
    m.def(
        "certify_model",
        [](const SystemModel& model, int max_order, bool use_numeric) {
            return to_json(certify_model(model, max_order, use_numeric));
        },
        py::arg("model"), py::arg("max_order") = 3, py::arg("use_numeric") = true);
    m.def(
        "detect_nas",
        [](const SystemModel& model) { return detect_nas(model).groups; },
        py::arg("model"));

    // gate metrics
    m.def(
        "gate_metrics",
        [](const SystemModel& model, const LogicalCode& code, int initial,
           const std::map<int, CMatrix>& targets, const std::string& route, int dyson_order) {
            MetricsOptions options;
            options.initial = initial;
            options.targets = targets;
            options.dyson_order = dyson_order;
            options.routes = {route == "dyson" ? MetricsRoute::dyson : MetricsRoute::lindblad};
            py::list out;
            for (const auto& row : gate_metrics(model, code, options, model.duration())) {
                py::dict item;
                item["outcome"] = row.outcome;
                item["route"] = row.route;
                item["population"] = row.population;
                item["process_fidelity"] = row.process_fidelity;
                item["average_fidelity"] = row.average_fidelity;
                item["weighted_infidelity"] = row.weighted_infidelity;
                item["converged"] = row.converged;
                out.append(item);
            }
            return out;
        },
        py::arg("model"), py::arg("code"), py::arg("initial"), py::arg("targets"),
        py::arg("route") = "lindblad", py::arg("dyson_order") = 3);

    // QEC
    py::class_<KlDiagonalization>(m, "KlDiagonalization")
        .def_property_readonly("weights",
                               [](const KlDiagonalization& kl) { return kl.weights; })
        .def_property_readonly("diagonal_errors",
                               [](const KlDiagonalization& kl) { return kl.diagonal_errors; });
    m.def("kl_diagonalize", &kl_diagonalize, py::arg("code"), py::arg("errors"),
          py::arg("tol") = 1e-9);
    m.def("build_pi_et_unitary", &build_pi_et_unitary, py::arg("kl"), py::arg("code_unitary"),
          py::arg("phases") = std::vector<double>{});
    m.def("error_timing_equivalence", &error_timing_equivalence, py::arg("model"),
          py::arg("code"), py::arg("error_op"), py::arg("insertion_times"), py::arg("t"),
          py::arg("initial"), py::arg("final_level"));
}
