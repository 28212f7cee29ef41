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

#include "pigates/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace pigates {

CMatrix matrix_exponential(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("matrix_exponential: input must be square");
    }
    if (!a.allFinite()) {
        throw std::domain_error("matrix_exponential: input has non-finite entries");
    }
    return a.exp();
}

CMatrix kronecker(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

namespace {

// 1 - |<x, y>| for unit-normalized x, y, evaluated through the phase-aligned
// residual min_phi |x - e^{i phi} y|^2 / 2. Algebraically identical to the
// trace-overlap form but free of the cancellation at overlap ~ 1, so values
// far below sqrt(machine epsilon) stay resolvable.
double one_minus_overlap(const CMatrix& x, const CMatrix& y) {
    const Complex inner = (x.adjoint() * y).trace();
    const Complex phase =
        std::abs(inner) > 0 ? std::conj(inner) / std::abs(inner) : Complex(1.0, 0.0);
    return 0.5 * (x - phase * y).squaredNorm();
}

}  // namespace

double unitary_distance(const CMatrix& u, const CMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
        throw std::invalid_argument("unitary_distance: dimension mismatch");
    }
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) {
        throw std::invalid_argument("unitary_distance: zero matrix");
    }
    return std::sqrt(one_minus_overlap(u / nu, v / nv));
}

double proportionality_distance(const CMatrix& x, const CMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw std::invalid_argument("proportionality_distance: dimension mismatch");
    }
    const double nx = x.norm();
    const double ny = y.norm();
    if (nx == 0.0 || ny == 0.0) {
        throw std::invalid_argument("proportionality_distance: zero matrix");
    }
    return std::sqrt(one_minus_overlap(x / nx, y / ny));
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const CMatrix gram = m.adjoint() * m;
    return (gram - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

CMatrix nearest_unitary(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix hermitian_sqrt(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    RVector vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

CVector vectorize(const CMatrix& m) {
    return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix devectorize(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw std::invalid_argument("devectorize: size mismatch");
    }
    return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix conjugation_superoperator(const CMatrix& a) {
    return kronecker(a.conjugate(), a);
}

CMatrix reshuffle(const CMatrix& m, Eigen::Index dim) {
    if (m.rows() != dim * dim || m.cols() != dim * dim) {
        throw std::invalid_argument("reshuffle: matrix must be dim^2 x dim^2");
    }
    CMatrix out(dim * dim, dim * dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index l = 0; l < dim; ++l) {
                for (Eigen::Index k = 0; k < dim; ++k) {
                    out(i + dim * j, k + dim * l) = m(i + dim * k, j + dim * l);
                }
            }
        }
    }
    return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev estimate, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // Map from [-1, 1] to [0, 1].
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
}

}  // namespace pigates
