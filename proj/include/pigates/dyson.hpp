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

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "pigates/model.hpp"

namespace pigates {

/// No-jump propagator evaluator with per-segment caching. The generator is the
/// effective non-Hermitian Hamiltonian H(t) - (i/2) sum_k rate_k K_k^dag K_k
/// (jump operators taken in the working picture). Piecewise-constant segments
/// are exponentiated exactly; sampled drives use their midpoint discretization.
class Propagator {
public:
    explicit Propagator(const SystemModel& model);

    /// W(t2, t1) for 0 <= t1 <= t2 <= duration.
    CMatrix between(double t1, double t2) const;

    CMatrix effective_hamiltonian(double t) const;

    /// True when the effective Hamiltonian is exactly piecewise constant
    /// (no midpoint sampling involved).
    bool piecewise_exact() const { return exact_; }

private:
    struct Cell {
        double t0 = 0;
        double t1 = 0;
        CMatrix gen;          // -i * H_eff on the cell
        bool eig_valid = false;
        CMatrix basis;        // eigenbasis
        CMatrix basis_inv;
        CVector evals;
        CMatrix prefix;       // W(t0, 0)
        CMatrix prefix_inv;   // W(t0, 0)^{-1}
    };

    CMatrix cell_step(const Cell& cell, double dt) const;
    int cell_index(double t) const;

    const SystemModel* model_;
    bool exact_ = true;
    bool cached_ = false;               // full per-cell cache (few segments)
    std::vector<double> edges_;
    std::vector<Cell> cells_;           // populated when cached_
    double step_ = 0;                   // lazy path cell width
    int lazy_cells_ = 0;
};

/// H(t) - (i/2) sum_k rate_k K_k(t)^dag K_k(t) in the working picture.
CMatrix effective_hamiltonian(const SystemModel& model, double t);

/// W(t2, t1), the time-ordered exponential of -i H_eff. Satisfies
/// W(t3, t1) = W(t3, t2) W(t2, t1).
CMatrix no_jump_propagator(const SystemModel& model, double t1, double t2);

/// Liouvillian of the master equation at time t in the working picture,
/// column-stacking convention:
///   L = -i (I (x) H_eff) + i (conj(H_eff) (x) I) + sum_k rate_k kron(conj(K_k), K_k).
CMatrix liouvillian(const SystemModel& model, double t);

/// Superoperator collecting all trajectories with exactly `order` jumps on
/// [0, t], computed by Gauss-Legendre quadrature of the nested time-ordered
/// integral over the simplex.
struct DysonTerm {
    int order = 0;
    CMatrix superoperator;  // (dN)^2 x (dN)^2
    int quad_points = 0;
};

/// Default nodes per integration dimension (24 for order <= 2, 12 for 3, 8 above).
int default_quad_points(int order);

DysonTerm dyson_term(const SystemModel& model, int order, double t, int quad_points = 0);

/// Applies the order-p terms for p = 0..max_order to a batch of operators;
/// result[p][j] is term p applied to inputs[j].
std::vector<std::vector<CMatrix>> apply_dyson_terms(const SystemModel& model, int max_order,
                                                    double t,
                                                    const std::vector<CMatrix>& inputs,
                                                    int quad_points = 0);

/// Unnormalized conditional operator for one explicit trajectory:
/// <r| W(t, t_p) K_p ... K_1 W(t_1, 0) |i> with the jump operators evaluated
/// in the working picture at their jump times.
CMatrix path_operator(const SystemModel& model, int initial,
                      const std::vector<std::pair<int, double>>& jumps_at_times, int final_level,
                      double t);

/// Same trajectory element with arbitrary joint-space insertions.
CMatrix path_operator_matrices(const SystemModel& model, int initial,
                               const std::vector<std::pair<CMatrix, double>>& insertions,
                               int final_level, double t);

/// Outcome-conditioned channel on the central system: Choi matrix of
///   rho_cs -> <r| [ sum_{p<=P} G_p(t,0) (|i><i| (x) rho_cs) ] |r>,
/// stored as the Gram matrix of vectorized trajectory contributions.
struct ConditionalChannel {
    int initial = 0;
    int final_level = 0;
    int max_order = 0;
    CMatrix choi;            // N^2 x N^2, positive semidefinite
    double success_weight = 0;  // trace of the channel on the maximally mixed input
    bool converged = true;
    double convergence_delta = 0;
};

ConditionalChannel conditional_channel(const SystemModel& model, int initial, int final_level,
                                       double t, int max_order, int quad_points = 0,
                                       bool check_convergence = false);

/// Per-order conditional Choi matrices for several (initial, final) pairs,
/// computed in a single quadrature sweep. choi_by_order[p][(i,r)] holds the
/// order-p contribution.
struct PairChannelTable {
    int max_order = 0;
    std::vector<std::map<std::pair<int, int>, CMatrix>> choi_by_order;
    bool converged = true;
    double convergence_delta = 0;

    /// Cumulative Choi over orders p <= k.
    CMatrix cumulative(int i, int r, int k) const;
};

PairChannelTable conditional_channel_table(const SystemModel& model,
                                           const std::vector<std::pair<int, int>>& pairs,
                                           double t, int max_order, int quad_points = 0,
                                           bool check_convergence = false);

/// Rank-1-unitary diagnostics of a conditional Choi matrix: the ratio of the
/// two largest eigenvalues and the singular-value spread of the dominant
/// eigenvector reshaped to an operator.
struct ChannelUnitarity {
    double total_weight = 0;
    double subdominant_ratio = 0;
    double kraus_spread = 0;
    CMatrix kraus;  // dominant Kraus operator, Frobenius-normalized
};

ChannelUnitarity channel_unitarity(const CMatrix& choi, Eigen::Index dim);

struct MasterOptions {
    double step = 0;           // 0: derive from the model's sampling rules
    bool halving_check = false;
    double halving_tol = 1e-8;
};

struct MasterResult {
    bool converged = true;
    double halving_delta = 0;
};

/// Lindblad propagation of a valid density matrix over [0, t]: exponentiation
/// of the vectorized Liouvillian per piecewise-constant segment (exponential
/// action on the state; midpoint sampling for time-dependent generators).
CMatrix evolve_master(const SystemModel& model, const CMatrix& rho0, double t,
                      const MasterOptions& options = {}, MasterResult* result = nullptr);

/// Propagates a batch of (not necessarily Hermitian) operators by linearity.
std::vector<CMatrix> propagate_master(const SystemModel& model, std::vector<CMatrix> inputs,
                                      double t, const MasterOptions& options = {},
                                      MasterResult* result = nullptr);

}  // namespace pigates
