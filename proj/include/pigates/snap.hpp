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

#include <map>
#include <string>
#include <vector>

#include "pigates/dyson.hpp"
#include "pigates/model.hpp"

namespace pigates {

enum class DephasingConvention {
    unit_square,       // traceless weights with unit square, e.g. diag(1, -1)
    ground_projector,  // diag(1, 0, ...) weights
};

/// Dispersive transmon-cavity scenario parameters. Frequencies are angular
/// (rad/us); the CLI converts from MHz on ingestion.
struct SnapConfig {
    int levels = 2;  // 2: drive g<->e; 3: chi-matched e/f, drive g<->f
    double chi = 2 * M_PI * 0.9;
    double omega = 2 * M_PI * 0.1;
    double delta = 0.0;
    std::vector<double> phases = {};  // per Fock index, radians
    double t_phi = 0;                 // dephasing time (us); 0 disables
    double t1 = 0;                    // relaxation time (us) of the driven upper level; 0 disables
    double t1_ge = 0;                 // optional e -> g relaxation time (3-level); 0 disables
    int fock_dim = 10;
    double duration = 0;  // 0: pi / (2 omega)
    DephasingConvention dephasing = DephasingConvention::unit_square;

    double gate_time() const { return duration > 0 ? duration : M_PI / (2.0 * omega); }
    int upper_level() const { return levels == 2 ? 1 : 2; }
};

/// diag(e^{i phi_0}, ..., e^{i phi_{N-1}}); phases beyond the list are zero.
CMatrix snap_operator(const std::vector<double>& phases, int fock_dim);

/// Interaction-picture scenario with an arbitrary central unitary attached to
/// the driven level pair: H = amp (|g><x| (x) U + h.c.) + delta |x><x| (x) I,
/// dispersive frames, and the configured dephasing/relaxation channels.
SystemModel build_dispersive_scenario(const SnapConfig& cfg, const CMatrix& pair_unitary);

/// The scenario with the photon-number selective phase gate as the pair unitary.
SystemModel build_snap_scenario(const SnapConfig& cfg);

/// Same physics with the ideal drive in the Schrodinger picture (zero frame
/// terms, dispersive Hamiltonian plus the rotating drive as an explicit
/// sampled schedule). Exists for cross-validation of the picture change.
SystemModel build_snap_scenario_schrodinger(const SnapConfig& cfg);

/// Multi-tone transmon drive approximating the ideal control for omega << chi:
/// in the interaction picture, sum over Fock components of
/// amp e^{i(phi_m + (n-m) chi t - delta t)} |g,n><x,n| + h.c., discretized at
/// midpoints with step bounded by 0.05 rad of the fastest line.
ControlSchedule approximate_control(const SnapConfig& cfg);

SystemModel build_approx_snap_scenario(const SnapConfig& cfg);

/// Closed-form propagator exp(-i H dt) for a driven ancilla pair with complex
/// diagonal shifts:
///   H = w0 I + wxy (sx (x) Re U + sy (x) Im U) + wz sz (x) I,
/// on the 2N-dim pair space (first block = level m). Handles w -> 0 by series.
CMatrix exact_pair_propagator(Complex omega0, Complex omegaz, Complex omegaxy, const CMatrix& u,
                              double dt);

/// The generator above, for cross-checks against matrix_exponential.
CMatrix pair_effective_hamiltonian(Complex omega0, Complex omegaz, Complex omegaxy,
                                   const CMatrix& u);

/// Orthonormal basis of a code subspace with its projector.
struct LogicalCode {
    CMatrix basis;      // N x K, columns are code words
    CMatrix projector;  // N x N

    int dim() const { return static_cast<int>(basis.cols()); }
};

LogicalCode make_code(const std::vector<CVector>& words);

/// Smallest binomial code: (|0> + |4>)/sqrt(2) and |2>.
LogicalCode binomial_code(int fock_dim);

enum class MetricsRoute { dyson, lindblad };

struct GateMetrics {
    int outcome = 0;  // ancilla measurement result; -1 for the unconditioned row
    std::string route;
    double population = 0;
    double process_fidelity = 0;
    double average_fidelity = 0;
    double weighted_infidelity = 0;
    bool converged = true;
};

struct MetricsOptions {
    int initial = 0;                 // ancilla start level
    std::map<int, CMatrix> targets;  // outcome -> unitary on the code (K x K)
    std::vector<MetricsRoute> routes = {MetricsRoute::dyson, MetricsRoute::lindblad};
    int dyson_order = 3;
    int quad_points = 0;
    bool convergence_check = true;
    bool include_unconditioned = false;
    CMatrix unconditioned_target;  // K x K; required when include_unconditioned
};

/// Post-selected gate quality per ancilla outcome: population on the maximally
/// mixed code input, process fidelity of the trace-normalized code channel
/// against the target, average fidelity (K F + 1)/(K + 1), and the
/// population-weighted infidelity. Computed from the truncated jump expansion
/// and/or from the full Lindblad propagation.
std::vector<GateMetrics> gate_metrics(const SystemModel& model, const LogicalCode& code,
                                      const MetricsOptions& options, double t);

/// Default post-selection targets for a scenario started in |g>: the driven
/// transition applies the inverse-phase gate, remaining in |g> applies the
/// identity; a heralded decay within the matched excited pair preserves the
/// gate. Keyed by outcome level.
std::map<int, CMatrix> snap_targets(const SnapConfig& cfg, const LogicalCode& code);

}  // namespace pigates
