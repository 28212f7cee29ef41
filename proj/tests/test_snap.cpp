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

#include <cmath>

#include "pigates/picert.hpp"
#include "pigates/snap.hpp"
#include "support.hpp"

using namespace pigates;
using namespace pigates::testing;

namespace {

constexpr double kTwoPi = 2 * M_PI;

SnapConfig paper_cfg(int levels, int fock_dim = 10) {
    SnapConfig cfg;
    cfg.levels = levels;
    cfg.chi = kTwoPi * 0.9;
    cfg.omega = kTwoPi * 0.1;
    cfg.fock_dim = fock_dim;
    cfg.phases = {0.0, 0.0, M_PI / 4};
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("snap");

TEST_CASE("zero phases give the identity gate") {
    CHECK((snap_operator({}, 4) - CMatrix::Identity(4, 4)).norm() == 0.0);
    CHECK((snap_operator({0.0, 0.0}, 4) - CMatrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("the quarter-phase gate acts as a T gate on the binomial code") {
    const LogicalCode code = binomial_code(10);
    const CMatrix s = snap_operator({0.0, 0.0, M_PI / 4}, 10);
    const CMatrix on_code = code.basis.adjoint() * s * code.basis;
    CMatrix t_gate(2, 2);
    t_gate << 1.0, 0.0, 0.0, std::exp(Complex(0, M_PI / 4));
    CHECK((on_code - t_gate).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("phase gates invert cleanly") {
    const std::vector<double> phases{0.3, -1.1, 0.9, 2.4};
    const CMatrix prod = snap_operator(phases, 6) *
                         snap_operator({-0.3, 1.1, -0.9, -2.4}, 6);
    CHECK((prod - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("scenario builders wire the expected noiseless groups") {
    SnapConfig cfg2 = paper_cfg(2);
    cfg2.t_phi = 70.0;
    const NasPartition nas2 = detect_nas(build_snap_scenario(cfg2));
    CHECK(nas2.groups.size() == 2);

    SnapConfig cfg3 = paper_cfg(3);
    cfg3.t_phi = 70.0;
    cfg3.t1 = 50.0;
    const NasPartition nas3 = detect_nas(build_snap_scenario(cfg3));
    REQUIRE(nas3.groups.size() == 2);
    CHECK(nas3.groups[1] == std::vector<int>{1, 2});
}

TEST_CASE("zero drive with explicit duration evolves trivially") {
    SnapConfig cfg = paper_cfg(2, 4);
    cfg.omega = 0.0;
    cfg.duration = 3.0;
    const SystemModel model = build_snap_scenario(cfg);
    std::mt19937 rng(61);
    const CMatrix rho0 = random_density(rng, 8);
    const CMatrix rho = evolve_master(model, rho0, 3.0);
    CHECK((rho - rho0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("approximate control with a single Fock level is one resonant tone") {
    SnapConfig cfg = paper_cfg(2, 1);
    cfg.phases = {0.7};
    const SystemModel ideal = build_snap_scenario(cfg);
    const SystemModel approx = build_approx_snap_scenario(cfg);
    std::mt19937 rng(62);
    const CMatrix rho0 = random_density(rng, 2);
    const CMatrix a = evolve_master(ideal, rho0, cfg.gate_time());
    const CMatrix b = evolve_master(approx, rho0, cfg.gate_time());
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("approximate control converges under step halving") {
    SnapConfig cfg = paper_cfg(2, 5);
    cfg.t_phi = 70.0;
    const SystemModel model = build_approx_snap_scenario(cfg);
    CMatrix rho0 = CMatrix::Zero(10, 10);
    rho0(2, 2) = 1.0;
    MasterOptions options;
    options.halving_check = true;
    MasterResult result;
    evolve_master(model, rho0, model.duration(), options, &result);
    CHECK(result.converged);
    CHECK(result.halving_delta < 1e-8);
}

TEST_CASE("approximate control requires a weak drive") {
    SnapConfig cfg = paper_cfg(2, 4);
    cfg.omega = cfg.chi;
    CHECK_THROWS_AS(approximate_control(cfg), std::invalid_argument);
}

TEST_CASE("closed-form pair propagator reduces to the swap at a quarter period") {
    std::mt19937 rng(63);
    const CMatrix u = random_unitary(rng, 4);
    const double amp = 0.8;
    const double dt = M_PI / (2 * amp);
    const CMatrix w = exact_pair_propagator(0.0, 0.0, amp, u, dt);
    CMatrix expected = CMatrix::Zero(8, 8);
    expected.block(0, 4, 4, 4) = Complex(0, -1) * u;
    expected.block(4, 0, 4, 4) = Complex(0, -1) * u.adjoint();
    CHECK((w - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a pure detuning pair propagator has no cross blocks") {
    const CMatrix w = exact_pair_propagator(0.2, Complex(0.4, -0.1), 0.0,
                                            CMatrix::Identity(3, 3), 0.7);
    CHECK(w.block(0, 3, 3, 3).norm() == 0.0);
    CHECK(w.block(3, 0, 3, 3).norm() == 0.0);
}

TEST_CASE("closed-form pair propagator matches the exponential on random draws") {
    std::mt19937 rng(64);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> dt_dist(0.01, 2.5);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Complex w0(gauss(rng), gauss(rng));
        const Complex wz(gauss(rng), gauss(rng));
        const Complex wxy(gauss(rng), gauss(rng));
        const CMatrix u = random_unitary(rng, 3);
        const double dt = dt_dist(rng);
        const CMatrix closed = exact_pair_propagator(w0, wz, wxy, u, dt);
        const CMatrix reference =
            matrix_exponential(Complex(0, -1) * dt * pair_effective_hamiltonian(w0, wz, wxy, u));
        worst = std::max(worst, (closed - reference).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);

    // Vanishing generalized frequency goes through the series limit.
    const Complex wz(1e-9, 0.0), wxy(0.0, 1e-9);
    const CMatrix u = CMatrix::Identity(2, 2);
    const CMatrix closed = exact_pair_propagator(0.3, wz, wxy, u, 1.0);
    const CMatrix reference =
        matrix_exponential(Complex(0, -1) * pair_effective_hamiltonian(0.3, wz, wxy, u));
    CHECK((closed - reference).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("binomial code words are orthonormal with an idempotent projector") {
    const LogicalCode code = binomial_code(10);
    CHECK((code.basis.adjoint() * code.basis - CMatrix::Identity(2, 2)).norm() < 1e-14);
    CHECK((code.projector * code.projector - code.projector).norm() < 1e-14);
    CHECK_THROWS_AS(binomial_code(5), std::invalid_argument);
}

TEST_CASE("noiseless metrics reproduce the exact swap pulse") {
    SnapConfig cfg = paper_cfg(2);
    const SystemModel model = build_snap_scenario(cfg);
    const LogicalCode code = binomial_code(10);
    MetricsOptions options;
    options.targets = snap_targets(cfg, code);
    options.routes = {MetricsRoute::lindblad, MetricsRoute::dyson};
    const auto rows = gate_metrics(model, code, options, model.duration());
    for (const auto& row : rows) {
        if (row.outcome == 1) {
            CHECK(row.population == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(row.average_fidelity == doctest::Approx(1.0).epsilon(1e-9));
        }
        CHECK(row.weighted_infidelity < 1e-9);
    }
}

TEST_CASE("post-selected gate quality is independent of the dephasing rate") {
    const LogicalCode code = binomial_code(10);
    for (double t_phi : {10.0, 30.0, 70.0, 100.0}) {
        SnapConfig cfg = paper_cfg(2);
        cfg.t_phi = t_phi;
        const SystemModel model = build_snap_scenario(cfg);
        MetricsOptions options;
        options.targets = snap_targets(cfg, code);
        options.routes = {MetricsRoute::lindblad};
        const auto rows = gate_metrics(model, code, options, model.duration());
        for (const auto& row : rows) {
            if (row.outcome == 1) CHECK(row.average_fidelity >= 1.0 - 1e-8);
        }
    }
}

TEST_CASE("relaxation during the gate is detected in the return branch") {
    SnapConfig cfg = paper_cfg(2);
    cfg.t_phi = 70.0;
    cfg.t1 = cfg.gate_time() / 0.05;  // gamma * duration = 0.05
    const SystemModel model = build_snap_scenario(cfg);
    const LogicalCode code = binomial_code(10);
    MetricsOptions options;
    options.targets = snap_targets(cfg, code);
    options.routes = {MetricsRoute::lindblad};
    const auto rows = gate_metrics(model, code, options, model.duration());
    for (const auto& row : rows) {
        if (row.outcome == 0) CHECK(row.average_fidelity < 1.0 - 1e-3);
    }
}

TEST_CASE("heralded decay in the matched pair preserves the gate at first order") {
    SnapConfig cfg = paper_cfg(3);
    cfg.t1 = 50.0;  // only the matched-pair relaxation
    const SystemModel model = build_snap_scenario(cfg);
    const LogicalCode code = binomial_code(10);
    MetricsOptions options;
    options.initial = 2;  // start in the driven upper level
    options.targets[1] = CMatrix::Identity(2, 2);
    options.routes = {MetricsRoute::dyson};
    options.dyson_order = 1;
    const auto rows = gate_metrics(model, code, options, model.duration());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].average_fidelity >= 1.0 - 1e-8);
    CHECK(rows[0].population > 0.0);
}

TEST_CASE("outcome populations from the full propagation sum to one") {
    SnapConfig cfg = paper_cfg(3);
    cfg.t_phi = 40.0;
    cfg.t1 = 30.0;
    cfg.t1_ge = 60.0;
    const SystemModel model = build_snap_scenario(cfg);
    const LogicalCode code = binomial_code(10);
    MetricsOptions options;
    options.targets = snap_targets(cfg, code);
    options.routes = {MetricsRoute::lindblad};
    const auto rows = gate_metrics(model, code, options, model.duration());
    double total = 0;
    for (const auto& row : rows) total += row.population;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("metrics reject non-unitary targets") {
    SnapConfig cfg = paper_cfg(2);
    const SystemModel model = build_snap_scenario(cfg);
    const LogicalCode code = binomial_code(10);
    MetricsOptions options;
    options.targets[1] = 0.5 * CMatrix::Identity(2, 2);
    CHECK_THROWS_AS(gate_metrics(model, code, options, model.duration()),
                    std::invalid_argument);
}

TEST_CASE("the Schrodinger-picture builder matches the frame picture") {
    SnapConfig cfg = paper_cfg(2, 5);
    cfg.t_phi = 40.0;
    const SystemModel frame_model = build_snap_scenario(cfg);
    const SystemModel schrodinger = build_snap_scenario_schrodinger(cfg);
    CMatrix rho0 = CMatrix::Zero(10, 10);
    rho0(2, 2) = 0.5;
    rho0(4, 4) = 0.5;
    rho0(2, 4) = 0.5;
    rho0(4, 2) = 0.5;
    const double t = cfg.gate_time();
    const CMatrix in_frame = evolve_master(frame_model, rho0, t);
    const CMatrix lab = evolve_master(schrodinger, rho0, t);
    const CMatrix rotation = frame_rotation(frame_model, t);
    const CMatrix lab_from_frame = rotation * in_frame * rotation.adjoint();
    CHECK((lab - lab_from_frame).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_SUITE_END();
