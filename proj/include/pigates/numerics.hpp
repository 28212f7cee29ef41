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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace pigates {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Default absolute tolerance for max-entry / Frobenius comparisons.
inline constexpr double kDefaultTol = 1e-10;

/// exp(A) for a square complex matrix (Pade scaling-and-squaring).
/// Throws std::invalid_argument on non-square input, std::domain_error on
/// non-finite entries.
CMatrix matrix_exponential(const CMatrix& a);

/// Kronecker product, (A otimes B)[i*rB + k, j*cB + l] = A(i,j) B(k,l).
CMatrix kronecker(const CMatrix& a, const CMatrix& b);

/// Global-phase-invariant distance sqrt(max(0, 1 - |tr(U^dag V)| / D)).
/// Zero exactly when V = e^{i a} U for unitaries U, V of dimension D.
double unitary_distance(const CMatrix& u, const CMatrix& v);

/// Scale- and phase-invariant distance between two nonzero matrices,
/// sqrt(max(0, 1 - |<X,Y>| / (|X| |Y|))) with the Frobenius inner product.
/// Coincides with unitary_distance on unitaries.
double proportionality_distance(const CMatrix& x, const CMatrix& y);

bool is_hermitian(const CMatrix& m, double tol = kDefaultTol);
bool is_unitary(const CMatrix& m, double tol = kDefaultTol);

/// Unitary polar factor of a (square, full-rank) matrix via SVD.
CMatrix nearest_unitary(const CMatrix& m);

/// Principal square root of a positive semidefinite Hermitian matrix.
CMatrix hermitian_sqrt(const CMatrix& m);

// Column-stacking vectorization and its inverse.
CVector vectorize(const CMatrix& m);
CMatrix devectorize(const CVector& v, Eigen::Index rows, Eigen::Index cols);

/// Superoperator of rho -> A rho A^dag in the column-stacking convention,
/// i.e. kron(conj(A), A).
CMatrix conjugation_superoperator(const CMatrix& a);

/// Involutive index swap between a superoperator matrix and the Choi-form
/// Gram matrix of its Kraus contributions: out[i+Dj, k+Dl] = in[i+Dk, j+Dl].
CMatrix reshuffle(const CMatrix& m, Eigen::Index dim);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace pigates
