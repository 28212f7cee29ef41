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

#include <random>

#include "pigates/model.hpp"
#include "pigates/numerics.hpp"

namespace pigates::testing {

inline CMatrix random_matrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    CMatrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) out(i, j) = Complex(gauss(rng), gauss(rng));
    }
    return out;
}

inline CMatrix random_hermitian(std::mt19937& rng, int dim, double scale = 1.0) {
    const CMatrix g = random_matrix(rng, dim, dim, scale);
    return 0.5 * (g + g.adjoint());
}

inline CMatrix random_unitary(std::mt19937& rng, int dim) {
    const CMatrix g = random_matrix(rng, dim, dim);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        q.col(k) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1.0, 0.0);
    }
    return q;
}

inline CMatrix random_density(std::mt19937& rng, int dim) {
    const CMatrix g = random_matrix(rng, dim, dim);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

inline CMatrix lowering_operator(int dim) {
    CMatrix a = CMatrix::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

inline CMatrix number_operator(int dim) {
    CMatrix n = CMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = k;
    return n;
}

}  // namespace pigates::testing
