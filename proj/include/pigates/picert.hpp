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

#include <optional>
#include <string>
#include <vector>

#include "pigates/dyson.hpp"
#include "pigates/model.hpp"

namespace pigates {

/// Factorization of the no-jump propagator into per-ancilla-block scalar
/// coefficients and a single unitary table: <m| W(t2,t1) |n> = c_mn(t2,t1) U_mn
/// with U_mn time independent in the working picture. Blocks whose coefficient
/// never rises above the edge threshold are left undefined.
struct PropagatorDecomposition {
    std::vector<std::pair<double, double>> grid;            // (t1, t2) pairs
    std::vector<CMatrix> coefficients;                      // d x d per grid pair
    std::vector<std::vector<CMatrix>> unitary_table;        // [m][n], empty when undefined
    Eigen::MatrixXd edge_strength;                          // max |c_mn| over the grid
    Eigen::MatrixXd residuals;                              // worst unitary residual per block
    double composition_residual = 0;                        // factored composition check
    bool pi_form = false;
    std::string failure;                                    // offending block when not PI-form

    bool defined(int m, int n) const { return unitary_table[m][n].size() != 0; }
};

/// Edge-presence threshold on max |coefficient| over the grid.
inline constexpr double kEdgeThreshold = 1e-10;
inline constexpr double kFactorizationTol = 1e-8;

/// Factorizes the no-jump propagator on a grid of (t1, t2) spans covering the
/// gate. grid_points is the number of interior time divisions (>= 2, giving
/// >= 3 span pairs).
PropagatorDecomposition factorize_no_jump(const SystemModel& model, int grid_points = 4);

struct HolonomyReport {
    bool pass = false;
    double worst_distance = 0;
    std::vector<int> worst_cycle;
};

/// Checks the loop condition on a block-unitary table: the ordered product
/// around every simple cycle of defined off-diagonal edges, up to length d,
/// must be the identity up to a global phase.
HolonomyReport check_holonomy(const std::vector<std::vector<CMatrix>>& table, int d,
                              double tol = kFactorizationTol);

/// Partition of the ancilla levels into groups whose frame Hamiltonians differ
/// only by real constants per segment; relaxation inside a group imparts no
/// time-dependent back-action on the central system.
struct NasPartition {
    struct OffsetSegment {
        double t0 = 0, t1 = 0;
        double value = 0;  // rad/us, relative to the group representative
    };
    std::vector<std::vector<int>> groups;               // sorted levels, groups by min level
    std::vector<std::vector<OffsetSegment>> offsets;    // per level
    std::vector<int> group_index;                       // level -> group

    bool same_group(int a, int b) const { return group_index[a] == group_index[b]; }
};

NasPartition detect_nas(const SystemModel& model, double tol = kDefaultTol);

/// Reachability structure for jump-path enumeration: drive edges are ancilla
/// block pairs with a defined factorization coefficient; jump edges are the
/// directed level transitions of the relaxation/general jump operators
/// (pure-dephasing operators act trivially on the paths and carry no edges).
struct PathGraph {
    struct JumpEdge {
        int from = 0;
        int to = 0;
        int jump_index = 0;
        bool in_nas = false;
    };
    int levels = 0;
    std::vector<std::vector<bool>> drive_edge;          // includes diagonal blocks
    std::vector<std::vector<CMatrix>> unitary;          // block unitaries (empty if undefined)
    std::vector<JumpEdge> jump_edges;
    NasPartition nas;
};

PathGraph build_path_graph(const SystemModel& model, const PropagatorDecomposition& decomposition,
                           const NasPartition& nas);

struct PathRecord {
    std::vector<int> levels;        // visited level sequence, starting at i
    std::vector<int> jump_edges;    // indices into PathGraph::jump_edges
    CMatrix op;                     // product of traversed block unitaries
    bool nas_only = true;
    bool time_dependent = false;    // true when any non-NAS jump participates
};

/// All drive-interleaved sequences of at most max_jumps jump edges from i to r.
std::vector<PathRecord> enumerate_paths(const PathGraph& graph, int i, int r, int max_jumps);

struct PiOrderResult {
    int initial = 0;
    int final_level = 0;
    int order = -1;             // certified order; -1 when unreachable
    bool unreachable = false;
    bool at_max_checked = false;  // no breaking path found up to max_order
    int symbolic_order = -1;
    int numeric_order = -1;
    bool numeric_used = false;
    bool methods_agree = true;
    std::vector<PathRecord> witnesses;  // breaking paths at order + 1
    CMatrix gate;                       // representative central-system operator
};

/// Certifier over one model: factorization, NAS detection, path enumeration
/// and (optionally) the conditional-channel rank test, evaluated per
/// (initial, final) ancilla pair. When the two routes disagree the numeric
/// order wins and the disagreement is flagged.
class PiCertifier {
public:
    PiCertifier(const SystemModel& model, int max_order = 3, bool use_numeric = true,
                int quad_points = 0);

    PiOrderResult certify(int initial, int final_level);
    std::vector<PiOrderResult> certify_all();

    const PropagatorDecomposition& decomposition() const { return decomposition_; }
    const NasPartition& nas() const { return nas_; }
    const PathGraph& graph() const { return graph_; }
    int max_order() const { return max_order_; }

private:
    void ensure_channels();

    const SystemModel* model_;
    int max_order_;
    bool use_numeric_;
    int quad_points_;
    PropagatorDecomposition decomposition_;
    NasPartition nas_;
    PathGraph graph_;
    std::optional<PairChannelTable> channels_;
};

PiOrderResult pi_order(const SystemModel& model, int initial, int final_level, int max_order = 3,
                       bool use_numeric = true);

struct PiReport {
    std::vector<PiOrderResult> entries;
    NasPartition nas;
    bool pi_form = false;
    int max_order = 0;
};

PiReport certify_model(const SystemModel& model, int max_order = 3, bool use_numeric = true);

/// JSON rendering with one object per pair:
/// {"pair": [i, r], "order": n, "witnesses": [{"jumps": [...], "time_dependent": b}, ...],
///  "nas": [[...], ...]}.
std::string to_json(const PiReport& report);

}  // namespace pigates
