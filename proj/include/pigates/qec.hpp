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

#include <vector>

#include "pigates/model.hpp"
#include "pigates/snap.hpp"

namespace pigates {

/// Diagonalized correctable error set: starting from errors {E_i} satisfying
/// P0 E_i^dag E_j P0 = A_ij P0, the Hermitian matrix A is diagonalized and the
/// rotated errors F_k = sum_i u_ik E_i satisfy P0 F_k^dag F_l P0 = r_k d_kl P0.
/// The component acting as the identity on the code is kept first (r_0 = 1).
struct KlDiagonalization {
    std::vector<CMatrix> original_errors;
    CMatrix overlap;                       // A
    CMatrix mixing;                        // u, column k builds F_k
    std::vector<CMatrix> diagonal_errors;  // F_k
    RVector weights;                       // r_k
    LogicalCode code;
};

KlDiagonalization kl_diagonalize(const LogicalCode& code, const std::vector<CMatrix>& errors,
                                 double tol = 1e-9);

/// Per-level, per-frame-segment commutation certificate
/// [H_m(t), F] = c_m(t) F with real c_m; valid when every residual is small.
struct CommutatorCertificate {
    struct Entry {
        int level = 0;
        double t0 = 0, t1 = 0;
        double coefficient = 0;  // rad/us
        double residual = 0;
        double imag_part = 0;
    };
    std::vector<Entry> entries;
    double max_residual = 0;
    double max_imag = 0;
    bool valid = false;
};

CommutatorCertificate commutator_condition(const SystemModel& model, const CMatrix& error_op,
                                           double tol = 1e-9);

/// Block-diagonal unitary acting as the target on the code subspace and as the
/// conjugated target on each error subspace:
///   U = sum_k e^{i phi_k} F_k U0 F_k^dag / r_k  (+ identity off the supported
/// subspaces), with U0 U0^dag = P0. Throws when the error subspaces overlap or
/// the assembled operator fails to be unitary.
CMatrix build_pi_et_unitary(const KlDiagonalization& kl, const CMatrix& code_unitary,
                            const std::vector<double>& phases = {});

/// Max deviation, over the insertion times, of the conditional trajectory with
/// a single central-system error inserted at t1 from the same error applied
/// after the error-free gate, compared on code-subspace inputs (scale- and
/// phase-invariant). Requires a valid commutation certificate for the error
/// operator.
double error_timing_equivalence(const SystemModel& model, const LogicalCode& code,
                                const CMatrix& error_op,
                                const std::vector<double>& insertion_times, double t, int initial,
                                int final_level);

}  // namespace pigates
