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

#include <json.hpp>

#include "pigates/picert.hpp"
#include "pigates/snap.hpp"
#include "support.hpp"

using namespace pigates;
using namespace pigates::testing;

namespace {

constexpr double kTwoPi = 2 * M_PI;

SnapConfig snap_cfg(int levels, int fock_dim, double t_phi = 0, double t1 = 0,
                    double t1_ge = 0) {
    SnapConfig cfg;
    cfg.levels = levels;
    cfg.chi = kTwoPi * 0.9;
    cfg.omega = kTwoPi * 0.1;
    cfg.fock_dim = fock_dim;
    cfg.phases = {0.0, 0.0, M_PI / 4};
    cfg.t_phi = t_phi;
    cfg.t1 = t1;
    cfg.t1_ge = t1_ge;
    return cfg;
}

// Three disjoint pair drives on a six-level ancilla with zero frames, a
// relaxation cascade between the pairs and a dephasing channel: every jump
// stays inside the (global) noiseless subspace.
SystemModel paired_six_level(std::mt19937& rng, int central_dim, bool cascade_only = true) {
    const int d = 6;
    const int n = central_dim;
    const double duration = 2.5;
    const SystemModel frame_stub =
        build_model(d, n, CMatrix::Zero(d * n, d * n), {},
                    ControlSchedule::constant(CMatrix::Zero(d * n, d * n), duration), {});
    PiControlSpec spec;
    spec.pairs.push_back({0, 1, random_unitary(rng, n), kTwoPi * 0.1, 0.0, 0.0});
    spec.pairs.push_back({2, 3, random_unitary(rng, n), kTwoPi * 0.13, 0.0, 0.0});
    spec.pairs.push_back({4, 5, random_unitary(rng, n), kTwoPi * 0.07, 0.0, 0.0});
    const CMatrix control = build_pi_control(frame_stub, spec, 0.0);

    CVector weights(d);
    for (int m = 0; m < d; ++m) weights[m] = (m % 2 == 0 ? 1.0 : -1.0) / (1.0 + m);
    std::vector<JumpOperator> jumps{dephasing_jump(d, n, weights, 0.02),
                                    relaxation_jump(d, n, 2, 1, 0.05),
                                    relaxation_jump(d, n, 4, 3, 0.05)};
    if (!cascade_only) jumps.push_back(relaxation_jump(d, n, 4, 5, 0.05));
    return build_model(d, n, CMatrix::Zero(d * n, d * n), {},
                       ControlSchedule::constant(control, duration), std::move(jumps));
}

}  // namespace

TEST_SUITE_BEGIN("picert");

TEST_CASE("factorization of the driven pair matches the closed-form coefficients") {
    SnapConfig cfg = snap_cfg(2, 5, 20.0);
    const SystemModel model = build_snap_scenario(cfg);
    const auto dec = factorize_no_jump(model);
    CHECK(dec.pi_form);
    CHECK(dec.residuals.maxCoeff() < 1e-10);
    CHECK(dec.composition_residual < 1e-10);

    // Coefficient magnitudes against the closed-form pair propagator. The
    // unit-square dephasing shifts both diagonal decay rates by rate = 1/t_phi.
    const double rate = 1.0 / cfg.t_phi;
    const Complex shift(0.0, -rate);
    for (size_t g = 0; g < dec.grid.size(); ++g) {
        const auto [t1, t2] = dec.grid[g];
        const CMatrix w = exact_pair_propagator(shift, 0.0, cfg.omega,
                                                snap_operator(cfg.phases, 5), t2 - t1);
        CHECK(std::abs(std::abs(dec.coefficients[g](0, 0)) - std::abs(w(0, 0))) < 1e-10);
        CHECK(std::abs(std::abs(dec.coefficients[g](0, 1)) - std::abs(w(0, 5))) < 1e-10);
    }
}

TEST_CASE("generic ancilla-cavity coupling is not of the factorized form") {
    std::mt19937 rng(51);
    const int n = 4;
    CMatrix h = CMatrix::Zero(2 * n, 2 * n);
    const CMatrix block = random_matrix(rng, n, n);
    h.block(0, n, n, n) = block;
    h.block(n, 0, n, n) = block.adjoint();
    const SystemModel model = build_model(2, n, CMatrix::Zero(2 * n, 2 * n), {},
                                          ControlSchedule::constant(h, 1.0), {});
    const auto dec = factorize_no_jump(model);
    CHECK_FALSE(dec.pi_form);
    CHECK_FALSE(dec.failure.empty());
}

TEST_CASE("undriven model factorizes trivially with diagonal coefficients") {
    const SystemModel model =
        build_model(3, 2, CMatrix::Zero(6, 6), {},
                    ControlSchedule::constant(CMatrix::Zero(6, 6), 1.0), {});
    const auto dec = factorize_no_jump(model);
    CHECK(dec.pi_form);
    for (int m = 0; m < 3; ++m) {
        for (int p = 0; p < 3; ++p) {
            if (m == p) {
                CHECK(dec.defined(m, p));
                CHECK(unitary_distance(dec.unitary_table[m][p], CMatrix::Identity(2, 2)) < 1e-12);
            } else {
                CHECK_FALSE(dec.defined(m, p));
            }
        }
    }
}

TEST_CASE("holonomy passes on a consistently generated table") {
    std::mt19937 rng(52);
    const int d = 4, n = 3;
    std::vector<CMatrix> anchors;
    for (int m = 0; m < d; ++m) anchors.push_back(random_unitary(rng, n));
    std::vector<std::vector<CMatrix>> table(d, std::vector<CMatrix>(d));
    for (int m = 0; m < d; ++m) {
        for (int p = 0; p < d; ++p) table[m][p] = anchors[m] * anchors[p].adjoint();
    }
    const auto report = check_holonomy(table, d);
    CHECK(report.pass);
    CHECK(report.worst_distance < 1e-12);
}

TEST_CASE("a small phase perturbation breaks the holonomy") {
    std::mt19937 rng(53);
    const int d = 3, n = 2;
    std::vector<CMatrix> anchors;
    for (int m = 0; m < d; ++m) anchors.push_back(random_unitary(rng, n));
    std::vector<std::vector<CMatrix>> table(d, std::vector<CMatrix>(d));
    for (int m = 0; m < d; ++m) {
        for (int p = 0; p < d; ++p) table[m][p] = anchors[m] * anchors[p].adjoint();
    }
    CMatrix tweak = CMatrix::Identity(n, n);
    tweak(1, 1) = std::exp(Complex(0, 1e-3));
    table[0][1] = table[0][1] * tweak;
    const auto report = check_holonomy(table, d);
    CHECK_FALSE(report.pass);
    // Relative phase 1e-3 on one entry of a 2-dim unitary.
    CHECK(report.worst_distance == doctest::Approx(std::sqrt(1 - std::cos(5e-4))).epsilon(1e-3));
}

TEST_CASE("two-cycles of any anchored table close") {
    std::mt19937 rng(54);
    const int n = 3;
    const CMatrix u = random_unitary(rng, n);
    std::vector<std::vector<CMatrix>> table(2, std::vector<CMatrix>(2));
    table[0][0] = CMatrix::Identity(n, n);
    table[1][1] = CMatrix::Identity(n, n);
    table[0][1] = u;
    table[1][0] = u.adjoint();
    CHECK(check_holonomy(table, 2).pass);
}

TEST_CASE("chi-matched levels form a noiseless group") {
    const SystemModel m3 = build_snap_scenario(snap_cfg(3, 5, 70.0, 50.0, 50.0));
    const NasPartition nas = detect_nas(m3);
    REQUIRE(nas.groups.size() == 2);
    CHECK(nas.groups[0] == std::vector<int>{0});
    CHECK(nas.groups[1] == std::vector<int>{1, 2});
    CHECK(nas.same_group(1, 2));
    CHECK_FALSE(nas.same_group(0, 1));
}

TEST_CASE("zero frames give a single noiseless group") {
    const SystemModel model =
        build_model(4, 2, CMatrix::Zero(8, 8), {},
                    ControlSchedule::constant(CMatrix::Zero(8, 8), 1.0), {});
    const NasPartition nas = detect_nas(model);
    REQUIRE(nas.groups.size() == 1);
    CHECK(nas.groups[0] == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("the two-level dispersive pair does not form a noiseless group") {
    const SystemModel m2 = build_snap_scenario(snap_cfg(2, 5, 70.0));
    const NasPartition nas = detect_nas(m2);
    CHECK(nas.groups.size() == 2);
}

TEST_CASE("identity offsets are reported inside a group") {
    const int n = 3;
    const double split = 0.37;
    std::vector<PiecewiseMatrix> frames;
    frames.push_back(PiecewiseMatrix::constant(number_operator(n), 0.0, 1.0));
    frames.push_back(PiecewiseMatrix::constant(
        number_operator(n) + split * CMatrix::Identity(n, n), 0.0, 1.0));
    const SystemModel model =
        build_model(2, n, CMatrix::Zero(2 * n, 2 * n), std::move(frames),
                    ControlSchedule::constant(CMatrix::Zero(2 * n, 2 * n), 1.0), {});
    const NasPartition nas = detect_nas(model);
    REQUIRE(nas.groups.size() == 1);
    REQUIRE(nas.offsets[1].size() == 1);
    CHECK(nas.offsets[1][0].value == doctest::Approx(-split));
}

TEST_CASE("noiseless grouping recovers random planted partitions") {
    std::mt19937 rng(55);
    const int n = 3;
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 3 + static_cast<int>(rng() % 3);
        std::vector<int> assignment(d);
        std::vector<CMatrix> reps;
        for (int m = 0; m < d; ++m) {
            const bool reuse = !reps.empty() && (rng() % 2 == 0);
            if (reuse) {
                assignment[m] = static_cast<int>(rng() % reps.size());
            } else {
                assignment[m] = static_cast<int>(reps.size());
                reps.push_back(random_hermitian(rng, n));
            }
        }
        std::vector<PiecewiseMatrix> frames;
        std::uniform_real_distribution<double> offset(-2.0, 2.0);
        for (int m = 0; m < d; ++m) {
            frames.push_back(PiecewiseMatrix::constant(
                reps[assignment[m]] + offset(rng) * CMatrix::Identity(n, n), 0.0, 1.0));
        }
        const SystemModel model =
            build_model(d, n, CMatrix::Zero(d * n, d * n), std::move(frames),
                        ControlSchedule::constant(CMatrix::Zero(d * n, d * n), 1.0), {});
        const NasPartition nas = detect_nas(model);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                CHECK(nas.same_group(a, b) == (assignment[a] == assignment[b]));
            }
        }
        // Grouping is an equivalence relation by construction of the indices.
        for (int a = 0; a < d; ++a) CHECK(nas.same_group(a, a));
    }
}

TEST_CASE("path enumeration reproduces the three-level diagrams") {
    const SystemModel m3 = build_snap_scenario(snap_cfg(3, 5, 70.0, 50.0, 50.0));
    PiCertifier certifier(m3, 3, false);
    const PathGraph& graph = certifier.graph();

    SUBCASE("single heralded decay from the driven level acts as the identity") {
        const auto paths = enumerate_paths(graph, 2, 1, 1);
        REQUIRE(paths.size() == 1);
        CHECK(paths[0].nas_only);
        CHECK_FALSE(paths[0].time_dependent);
        CHECK(unitary_distance(paths[0].op, CMatrix::Identity(5, 5)) < 1e-10);
    }

    SUBCASE("two sequential decays reach the ground level with a time-dependent factor") {
        const auto paths = enumerate_paths(graph, 2, 0, 2);
        bool found_time_dependent = false;
        for (const auto& path : paths) {
            if (path.jump_edges.size() == 2 && path.time_dependent) found_time_dependent = true;
        }
        CHECK(found_time_dependent);
    }

    SUBCASE("the trivial diagonal path carries the identity") {
        const auto paths = enumerate_paths(graph, 1, 1, 0);
        REQUIRE(paths.size() == 1);
        CHECK(paths[0].jump_edges.empty());
        CHECK(unitary_distance(paths[0].op, CMatrix::Identity(5, 5)) < 1e-12);
    }

    CHECK_THROWS_AS(enumerate_paths(graph, 0, 0, 5), std::invalid_argument);
}

TEST_CASE("certified orders match the worked ladder examples") {
    // Small Fock truncation keeps the quadrature cheap; the orders are
    // truncation independent.
    const SystemModel m2 = build_snap_scenario(snap_cfg(2, 5, 70.0));
    const SystemModel m2r = build_snap_scenario(snap_cfg(2, 5, 70.0, 25.0));
    const SystemModel m3 = build_snap_scenario(snap_cfg(3, 5, 70.0, 25.0, 25.0));

    SUBCASE("dephasing only is independent at every checked order") {
        const auto r = pi_order(m2, 0, 1, 3);
        CHECK(r.order == 3);
        CHECK(r.at_max_checked);
        CHECK(r.methods_agree);
        CHECK(r.witnesses.empty());
    }

    SUBCASE("two-level relaxation breaks independence immediately") {
        const auto r = pi_order(m2r, 1, 0, 3);
        CHECK(r.order == 0);
        CHECK(r.methods_agree);
        CHECK_FALSE(r.witnesses.empty());
        CHECK(r.witnesses.front().time_dependent);
    }

    SUBCASE("matched three-level design protects one or two decays") {
        PiCertifier certifier(m3, 3, true);
        CHECK(certifier.certify(2, 0).order == 1);
        CHECK(certifier.certify(2, 2).order == 1);
        const auto fe = certifier.certify(2, 1);
        CHECK(fe.order == 2);
        CHECK(fe.methods_agree);
        CHECK(fe.at_max_checked == false);
    }
}

TEST_CASE("the paired six-level cascade is independent at all checked orders") {
    std::mt19937 rng(56);
    const SystemModel model = paired_six_level(rng, 2);
    PiCertifier certifier(model, 3, true);
    int reachable = 0;
    for (const auto& entry : certifier.certify_all()) {
        if (entry.unreachable) continue;
        ++reachable;
        CHECK(entry.order == 3);
        CHECK(entry.at_max_checked);
        CHECK(entry.methods_agree);
    }
    CHECK(reachable == 24);  // 6+6 from the first pair, 4+4 from the second, 2+2 from the third
}

TEST_CASE("adding a non-NAS jump cannot raise the certified order") {
    const SnapConfig base = snap_cfg(3, 4, 70.0, 25.0, 0.0);
    SnapConfig with_ge = base;
    with_ge.t1_ge = 25.0;
    const SystemModel protected_model = build_snap_scenario(base);
    const SystemModel leaky_model = build_snap_scenario(with_ge);
    PiCertifier cert_protected(protected_model, 3, true);
    PiCertifier cert_leaky(leaky_model, 3, true);
    for (int i = 0; i < 3; ++i) {
        for (int r = 0; r < 3; ++r) {
            const auto before = cert_protected.certify(i, r);
            const auto after = cert_leaky.certify(i, r);
            if (before.unreachable || after.unreachable) continue;
            CHECK(after.order <= before.order);
        }
    }
}

TEST_CASE("a valid factorization implies a closing holonomy") {
    std::mt19937 rng(57);
    for (int trial = 0; trial < 3; ++trial) {
        const SystemModel model = paired_six_level(rng, 2);
        const auto dec = factorize_no_jump(model);
        REQUIRE(dec.pi_form);
        CHECK(check_holonomy(dec.unitary_table, model.ancilla_dim()).pass);
    }
    const SystemModel m3 = build_snap_scenario(snap_cfg(3, 5, 70.0, 25.0, 25.0));
    const auto dec = factorize_no_jump(m3);
    REQUIRE(dec.pi_form);
    CHECK(check_holonomy(dec.unitary_table, 3).pass);
}

TEST_CASE("symbolic and numeric routes agree on the shipped scenarios") {
    std::mt19937 rng(58);
    std::vector<SystemModel> models;
    models.push_back(build_snap_scenario(snap_cfg(2, 4, 70.0)));
    models.push_back(build_snap_scenario(snap_cfg(2, 4, 70.0, 25.0)));
    models.push_back(build_snap_scenario(snap_cfg(3, 4, 70.0, 25.0, 25.0)));
    models.push_back(paired_six_level(rng, 2));
    for (const auto& model : models) {
        PiCertifier certifier(model, 2, true);
        for (const auto& entry : certifier.certify_all()) {
            CHECK(entry.methods_agree);
        }
    }
}

TEST_CASE("unreachable pairs are reported distinctly") {
    std::mt19937 rng(59);
    const SystemModel model = paired_six_level(rng, 2);
    PiCertifier certifier(model, 2, true);
    const auto entry = certifier.certify(4, 0);
    CHECK(entry.unreachable);
    CHECK(entry.order == -1);
}

TEST_CASE("report serialization carries pairs, orders, witnesses and groups") {
    const SystemModel m3 = build_snap_scenario(snap_cfg(3, 4, 70.0, 25.0, 25.0));
    const PiReport report = certify_model(m3, 2, true);
    const auto parsed = nlohmann::json::parse(to_json(report));
    CHECK(parsed["pi_form"].get<bool>());
    CHECK(parsed["nas"].size() == 2);
    bool found = false;
    for (const auto& item : parsed["pairs"]) {
        if (item["pair"] == nlohmann::json::array({2, 1})) {
            found = true;
            CHECK(item["order"].get<int>() == 2);
            CHECK(item["at_max_checked"].get<bool>());
        }
    }
    CHECK(found);
}

TEST_SUITE_END();
