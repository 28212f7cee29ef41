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
#include <limits>

#include "pigates/numerics.hpp"
#include "support.hpp"

using namespace pigates;
using namespace pigates::testing;

namespace {

// Independent oracle: order-40 Taylor series with 2^s scaling.
CMatrix taylor_exponential(const CMatrix& a) {
    const int dim = static_cast<int>(a.rows());
    int squarings = 0;
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.5) {
        norm /= 2;
        ++squarings;
    }
    const CMatrix scaled = a / std::pow(2.0, squarings);
    CMatrix sum = CMatrix::Identity(dim, dim);
    CMatrix term = CMatrix::Identity(dim, dim);
    for (int k = 1; k <= 40; ++k) {
        term = (scaled * term) / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("matrix exponential of zero is the identity") {
    const CMatrix z = CMatrix::Zero(2, 2);
    CHECK((matrix_exponential(z) - CMatrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("matrix exponential rotates the plane by pi/2") {
    CMatrix a(2, 2);
    a << 0.0, -M_PI / 2, M_PI / 2, 0.0;
    CMatrix expected(2, 2);
    expected << 0.0, -1.0, 1.0, 0.0;
    CHECK((matrix_exponential(a) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("matrix exponential agrees with the Taylor oracle") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix a = random_matrix(rng, 6, 6, 1.2);
        CHECK((matrix_exponential(a) - taylor_exponential(a)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("matrix exponential input validation") {
    CHECK_THROWS_AS(matrix_exponential(CMatrix::Zero(2, 3)), std::invalid_argument);
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(matrix_exponential(bad), std::domain_error);
}

TEST_CASE("exp(A) exp(-A) = I") {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix a = random_matrix(rng, 5, 5, 1.0);
        const CMatrix prod = matrix_exponential(a) * matrix_exponential(-a);
        CHECK((prod - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("exponential of a skew-Hermitian matrix is unitary") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix h = random_hermitian(rng, 6, 2.0);
        CHECK(is_unitary(matrix_exponential(Complex(0, -1) * h), 1e-10));
    }
}

TEST_CASE("kronecker product basics") {
    CMatrix sz(2, 2);
    sz << 1.0, 0.0, 0.0, -1.0;
    const CMatrix out = kronecker(sz, CMatrix::Identity(2, 2));
    CMatrix expected = CMatrix::Zero(4, 4);
    expected.diagonal() << 1.0, 1.0, -1.0, -1.0;
    CHECK((out - expected).norm() == 0.0);

    std::mt19937 rng(14);
    const CMatrix b = random_matrix(rng, 3, 4);
    CHECK((kronecker(CMatrix::Identity(1, 1), b) - b).norm() == 0.0);
}

TEST_CASE("kronecker mixed-product property") {
    std::mt19937 rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix a = random_matrix(rng, 3, 3);
        const CMatrix b = random_matrix(rng, 3, 3);
        const CMatrix c = random_matrix(rng, 3, 3);
        const CMatrix d = random_matrix(rng, 3, 3);
        const CMatrix lhs = kronecker(a, b) * kronecker(c, d);
        const CMatrix rhs = kronecker(a * c, b * d);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("unitary distance is phase invariant and discriminates") {
    std::mt19937 rng(16);
    const CMatrix u = random_unitary(rng, 4);
    CHECK(unitary_distance(u, std::exp(Complex(0, 1.234)) * u) < 1e-12);
    CHECK(unitary_distance(u, u) < 1e-12);

    CMatrix sx(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    CHECK(unitary_distance(CMatrix::Identity(2, 2), sx) == doctest::Approx(1.0));
}

TEST_CASE("unitary distance scalar example") {
    CMatrix v = CMatrix::Identity(2, 2);
    v(1, 1) = std::exp(Complex(0, 0.1));
    const double expected = std::sqrt(1.0 - std::abs(1.0 + std::exp(Complex(0, 0.1))) / 2.0);
    CHECK(unitary_distance(CMatrix::Identity(2, 2), v) ==
          doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(0.0353).epsilon(2e-2));
}

TEST_CASE("unitary distance is symmetric") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix u = random_unitary(rng, 3);
        const CMatrix v = random_unitary(rng, 3);
        CHECK(unitary_distance(u, v) == doctest::Approx(unitary_distance(v, u)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(unitary_distance(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)),
                    std::invalid_argument);
}

TEST_CASE("reshuffle is an involution and maps conjugation to vec outer product") {
    std::mt19937 rng(18);
    const CMatrix a = random_matrix(rng, 3, 3);
    const CMatrix super = conjugation_superoperator(a);
    const CVector v = vectorize(a);
    const CMatrix gram = v * v.adjoint();
    CHECK((reshuffle(gram, 3) - super).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((reshuffle(reshuffle(super, 3), 3) - super).norm() == 0.0);
}

TEST_CASE("vectorization convention is column stacking") {
    CMatrix a(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    const CVector v = vectorize(a);
    CHECK(v(0) == Complex(1.0));
    CHECK(v(1) == Complex(3.0));
    CHECK(v(2) == Complex(2.0));
    CHECK(v(3) == Complex(4.0));
    CHECK((devectorize(v, 2, 2) - a).norm() == 0.0);

    std::mt19937 rng(19);
    const CMatrix x = random_matrix(rng, 3, 3);
    const CMatrix rho = random_matrix(rng, 3, 3);
    const CVector lhs = vectorize(x * rho * x.adjoint());
    const CVector rhs = conjugation_superoperator(x) * vectorize(rho);
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    for (int n : {2, 6, 12, 24}) {
        std::vector<double> nodes, weights;
        gauss_legendre(n, nodes, weights);
        for (int power = 0; power < 2 * n; ++power) {
            double integral = 0;
            for (int k = 0; k < n; ++k) integral += weights[k] * std::pow(nodes[k], power);
            CHECK(integral == doctest::Approx(1.0 / (power + 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("nearest unitary recovers the polar factor") {
    std::mt19937 rng(20);
    const CMatrix u = random_unitary(rng, 4);
    CMatrix p = random_matrix(rng, 4, 4);
    p = p * p.adjoint() + 0.1 * CMatrix::Identity(4, 4);
    const CMatrix m = u * p;
    CHECK((nearest_unitary(m) - u).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((hermitian_sqrt(p * p) - p).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_SUITE_END();
