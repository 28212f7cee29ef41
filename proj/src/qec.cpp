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

#include "pigates/qec.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "pigates/dyson.hpp"

namespace pigates {

namespace {

constexpr Complex kImag(0.0, 1.0);

}  // namespace

KlDiagonalization kl_diagonalize(const LogicalCode& code, const std::vector<CMatrix>& errors,
                                 double tol) {
    if (errors.empty()) throw std::invalid_argument("kl_diagonalize: empty error set");
    const int n = static_cast<int>(code.projector.rows());
    const int q = static_cast<int>(errors.size());
    const double p0_trace = std::real(code.projector.trace());

    CMatrix a(q, q);
    for (int i = 0; i < q; ++i) {
        if (errors[i].rows() != n || errors[i].cols() != n) {
            throw std::invalid_argument("kl_diagonalize: error operator dimension mismatch");
        }
        for (int j = 0; j < q; ++j) {
            const CMatrix sandwich =
                code.projector * errors[i].adjoint() * errors[j] * code.projector;
            const Complex coeff = sandwich.trace() / p0_trace;
            if ((sandwich - coeff * code.projector).norm() > tol) {
                throw std::invalid_argument(
                    "kl_diagonalize: error set violates the correctability condition");
            }
            a(i, j) = coeff;
        }
    }
    a = 0.5 * (a + a.adjoint());

    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    if (es.info() != Eigen::Success) throw std::runtime_error("kl_diagonalize: diagonalization failed");

    // Keep the identity-acting component first, the rest by descending weight.
    std::vector<int> order(q);
    int first = 0;
    for (int k = 1; k < q; ++k) {
        if (std::abs(es.eigenvectors()(0, k)) > std::abs(es.eigenvectors()(0, first))) first = k;
    }
    order[0] = first;
    int pos = 1;
    for (int k = q - 1; k >= 0; --k) {
        if (k != first) order[pos++] = k;  // ascending solver order reversed = descending
    }

    KlDiagonalization kl;
    kl.code = code;
    kl.original_errors = errors;
    kl.overlap = a;
    kl.mixing = CMatrix(q, q);
    kl.weights = RVector(q);
    for (int k = 0; k < q; ++k) {
        kl.mixing.col(k) = es.eigenvectors().col(order[k]);
        kl.weights[k] = es.eigenvalues()(order[k]);
        if (kl.weights[k] < -1e-9) {
            throw std::runtime_error("kl_diagonalize: negative error weight");
        }
        // Fix the gauge so the dominant mixing entry is real positive.
        int arg_max = 0;
        for (int i = 1; i < q; ++i) {
            if (std::abs(kl.mixing(i, k)) > std::abs(kl.mixing(arg_max, k))) arg_max = i;
        }
        const Complex lead = kl.mixing(arg_max, k);
        if (std::abs(lead) > 0) kl.mixing.col(k) *= std::abs(lead) / lead;
        CMatrix f = CMatrix::Zero(n, n);
        for (int i = 0; i < q; ++i) f += kl.mixing(i, k) * errors[i];
        kl.diagonal_errors.push_back(std::move(f));
    }

    // Re-verify the diagonalized set.
    for (int k = 0; k < q; ++k) {
        for (int l = 0; l < q; ++l) {
            const CMatrix sandwich = code.projector * kl.diagonal_errors[k].adjoint() *
                                     kl.diagonal_errors[l] * code.projector;
            const double expected = (k == l) ? kl.weights[k] : 0.0;
            if ((sandwich - expected * code.projector).norm() > 10 * tol) {
                throw std::runtime_error("kl_diagonalize: diagonalized set fails re-verification");
            }
        }
    }
    return kl;
}

CommutatorCertificate commutator_condition(const SystemModel& model, const CMatrix& error_op,
                                           double tol) {
    const int n = model.central_dim();
    if (error_op.rows() != n || error_op.cols() != n) {
        throw std::invalid_argument("commutator_condition: operator must act on the central system");
    }
    const double f_norm2 = std::real((error_op.adjoint() * error_op).trace());
    if (f_norm2 <= 0) throw std::invalid_argument("commutator_condition: zero operator");

    CommutatorCertificate cert;
    for (int m = 0; m < model.ancilla_dim(); ++m) {
        const auto& frame = model.frame_terms()[m];
        const int segments = std::max(1, frame.segments());
        for (int k = 0; k < segments; ++k) {
            CommutatorCertificate::Entry entry;
            entry.level = m;
            CMatrix h;
            if (frame.empty()) {
                h = CMatrix::Zero(n, n);
                entry.t0 = 0;
                entry.t1 = model.duration();
            } else {
                h = frame.segment_value(k);
                entry.t0 = frame.segment_begin(k);
                entry.t1 = frame.segment_end(k);
            }
            const CMatrix comm = h * error_op - error_op * h;
            const Complex c = (error_op.adjoint() * comm).trace() / f_norm2;
            entry.coefficient = c.real();
            entry.imag_part = std::abs(c.imag());
            entry.residual = (comm - c.real() * error_op).norm();
            cert.max_residual = std::max(cert.max_residual, entry.residual);
            cert.max_imag = std::max(cert.max_imag, entry.imag_part);
            cert.entries.push_back(entry);
        }
    }
    cert.valid = cert.max_residual <= tol && cert.max_imag <= tol;
    return cert;
}

CMatrix build_pi_et_unitary(const KlDiagonalization& kl, const CMatrix& code_unitary,
                            const std::vector<double>& phases) {
    const int n = static_cast<int>(kl.code.projector.rows());
    const int q = static_cast<int>(kl.diagonal_errors.size());
    if (code_unitary.rows() != n || code_unitary.cols() != n) {
        throw std::invalid_argument("build_pi_et_unitary: target must act on the central system");
    }
    if ((code_unitary * code_unitary.adjoint() - kl.code.projector).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("build_pi_et_unitary: target must be unitary on the code");
    }
    if (!phases.empty() && static_cast<int>(phases.size()) != q) {
        throw std::invalid_argument("build_pi_et_unitary: one phase per error component");
    }

    std::vector<CMatrix> projectors;
    CMatrix supported = CMatrix::Zero(n, n);
    for (int k = 0; k < q; ++k) {
        if (kl.weights[k] <= 1e-12) {
            throw std::invalid_argument("build_pi_et_unitary: vanishing error weight");
        }
        const CMatrix pk =
            kl.diagonal_errors[k] * kl.code.projector * kl.diagonal_errors[k].adjoint() /
            kl.weights[k];
        for (const auto& other : projectors) {
            if ((pk * other).norm() > 1e-9) {
                throw std::invalid_argument("build_pi_et_unitary: error subspaces overlap");
            }
        }
        projectors.push_back(pk);
        supported += pk;
    }

    CMatrix u = CMatrix::Identity(n, n) - supported;
    for (int k = 0; k < q; ++k) {
        const double phase = phases.empty() ? 0.0 : phases[k];
        u += std::exp(kImag * phase) * kl.diagonal_errors[k] * code_unitary *
             kl.diagonal_errors[k].adjoint() / kl.weights[k];
    }
    if (!is_unitary(u, 1e-9)) {
        throw std::runtime_error("build_pi_et_unitary: assembled operator is not unitary");
    }
    return u;
}

double error_timing_equivalence(const SystemModel& model, const LogicalCode& code,
                                const CMatrix& error_op,
                                const std::vector<double>& insertion_times, double t, int initial,
                                int final_level) {
    const CommutatorCertificate cert = commutator_condition(model, error_op);
    if (!cert.valid) {
        throw std::invalid_argument(
            "error_timing_equivalence: error operator fails the frame commutation certificate");
    }
    const int n = model.central_dim();
    const int d = model.ancilla_dim();
    if (code.basis.rows() != n) {
        throw std::invalid_argument("error_timing_equivalence: code dimension mismatch");
    }

    const CMatrix no_error = path_operator_matrices(model, initial, {}, final_level, t);
    // The equivalence is a statement about code inputs.
    const CMatrix reference = error_op * no_error * code.basis;

    double worst = 0;
    for (double t1 : insertion_times) {
        CMatrix insertion = CMatrix::Zero(d * n, d * n);
        for (int m = 0; m < d; ++m) {
            const CMatrix r = model.frame_rotation_level(m, t1);
            insertion.block(m * n, m * n, n, n) = r.adjoint() * error_op * r;
        }
        const CMatrix with_error =
            path_operator_matrices(model, initial, {{insertion, t1}}, final_level, t) *
            code.basis;
        double deviation;
        if (reference.norm() < 1e-14 && with_error.norm() < 1e-14) {
            deviation = 0;
        } else if (reference.norm() < 1e-14 || with_error.norm() < 1e-14) {
            deviation = 1;
        } else {
            deviation = proportionality_distance(with_error, reference);
        }
        worst = std::max(worst, deviation);
    }
    return worst;
}

}  // namespace pigates
