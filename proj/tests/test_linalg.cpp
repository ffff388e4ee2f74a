// Copyright 2026 The BQM Authors
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
#include <numbers>

#include "bqm/errors.hpp"
#include "bqm/linalg.hpp"
#include "bqm/random.hpp"
#include "oracles.hpp"

using namespace bqm;
using oracle::kI;

TEST_SUITE("linalg") {
    TEST_CASE("adjoint examples") {
        CHECK(adjoint(identity(2)) == identity(2));
        ComplexMatrix a(2, 2);
        a << 0.0, kI, 0.0, 0.0;
        ComplexMatrix expected(2, 2);
        expected << 0.0, 0.0, -kI, 0.0;
        CHECK(adjoint(a) == expected);
        CHECK(oracle::distance(adjoint(pauli::y()), oracle::dagger(oracle::sy())) == 0.0);
        CHECK(adjoint(pauli::y()) == pauli::y());
    }

    TEST_CASE("commutator examples") {
        Rng rng(3);
        const ComplexMatrix a = random_gaussian_matrix(rng, 3);
        CHECK(commutator(a, a).norm() == 0.0);
        CHECK(commutator(identity(3), a).norm() == 0.0);
        const ComplexMatrix s[3] = {pauli::x(), pauli::y(), pauli::z()};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                CHECK(oracle::distance(commutator(s[i], s[j]), oracle::pauli_commutator(i, j)) < 1e-15);
            }
        }
        CHECK_THROWS_AS(commutator(identity(2), identity(3)), ShapeError);
    }

    TEST_CASE("trace examples") {
        CHECK(trace(identity(5)) == Complex(5.0, 0.0));
        CHECK(trace(pauli::x()) == Complex(0.0, 0.0));
        ComplexMatrix p = ComplexMatrix::Zero(2, 2);
        p(0, 0) = 1.0;
        const oracle::M2 prod = oracle::mul({{{1.0, 0.0}, {0.0, 0.0}}}, oracle::sz());
        CHECK(trace(p * pauli::z()) == prod[0][0] + prod[1][1]);
        CHECK(trace(p * pauli::z()) == Complex(1.0, 0.0));
        CHECK(trace_of_product(p, pauli::z()) == Complex(1.0, 0.0));
    }

    TEST_CASE("matrix_exponential examples") {
        CHECK(matrix_exponential(ComplexMatrix::Zero(4, 4)) == identity(4));

        ComplexMatrix d = ComplexMatrix::Zero(2, 2);
        d(0, 0) = Complex(0.0, 0.7);
        d(1, 1) = Complex(0.0, -2.9);
        const ComplexMatrix e = matrix_exponential(d);
        CHECK(std::abs(e(0, 0) - std::exp(Complex(0.0, 0.7))) < 1e-14);
        CHECK(std::abs(e(1, 1) - std::exp(Complex(0.0, -2.9))) < 1e-14);
        CHECK(std::abs(e(0, 1)) == 0.0);

        const ComplexMatrix r = matrix_exponential(Complex(0.0, -std::numbers::pi / 2) * pauli::x());
        CHECK(oracle::distance(r, oracle::scale(oracle::sx(), -kI)) < 1e-14);
        CHECK(oracle::distance(r, oracle::pauli_rotation(std::numbers::pi / 2, 1, 0, 0)) < 1e-14);
    }

    TEST_CASE("matrix_exponential matches the Pauli rotation formula") {
        Rng rng(11);
        for (int i = 0; i < 50; ++i) {
            double n[3] = {rng.normal(), rng.normal(), rng.normal()};
            const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
            for (double& c : n) c /= len;
            const double theta = rng.uniform(-8.0, 8.0);
            const ComplexMatrix ns = n[0] * pauli::x() + n[1] * pauli::y() + n[2] * pauli::z();
            const ComplexMatrix u = matrix_exponential(Complex(0.0, -theta) * ns);
            CHECK(oracle::distance(u, oracle::pauli_rotation(theta, n[0], n[1], n[2])) < 1e-13);
        }
    }

    TEST_CASE("matrix_exponential reports non-convergence") {
        const ComplexMatrix a = 1e3 * pauli::x();
        CHECK_THROWS_AS(matrix_exponential(a, ExpmConfig{2, 0.5}), NumericError);
        ComplexMatrix bad = identity(2);
        bad(0, 0) = std::nan("");
        CHECK_THROWS(matrix_exponential(bad));
    }

    TEST_CASE("hermitian_eigensystem examples") {
        const Eigensystem z = hermitian_eigensystem(pauli::z());
        CHECK(z.values(0) == doctest::Approx(-1.0));
        CHECK(z.values(1) == doctest::Approx(1.0));

        const auto ox = oracle::hermitian_eigenvalues(0.0, 1.0, 0.0);
        const Eigensystem x = hermitian_eigensystem(pauli::x());
        CHECK(std::abs(x.values(0) - ox[0]) < 1e-15);
        CHECK(std::abs(x.values(1) - ox[1]) < 1e-15);

        const Eigensystem half = hermitian_eigensystem(0.5 * identity(2));
        CHECK(half.values(0) == doctest::Approx(0.5));
        CHECK(half.values(1) == doctest::Approx(0.5));

        ComplexMatrix nh = pauli::x();
        nh(0, 1) = 2.0;
        CHECK_THROWS_AS(hermitian_eigensystem(nh), ContractError);
    }

    TEST_CASE("hermitian_eigensystem matches the 2x2 characteristic polynomial") {
        Rng rng(5);
        for (int i = 0; i < 100; ++i) {
            const double a = rng.normal();
            const double d = rng.normal();
            const Complex b = rng.complex_normal();
            ComplexMatrix h(2, 2);
            h << a, b, std::conj(b), d;
            const auto expected = oracle::hermitian_eigenvalues(a, b, d);
            const Eigensystem es = hermitian_eigensystem(h);
            CHECK(std::abs(es.values(0) - expected[0]) < 1e-13);
            CHECK(std::abs(es.values(1) - expected[1]) < 1e-13);
            const ComplexMatrix rebuilt = es.vectors * es.values.cast<Complex>().asDiagonal() * es.vectors.adjoint();
            CHECK((rebuilt - h).norm() < 1e-13);
            CHECK(unitarity_residual(es.vectors) < 1e-13);
        }
    }

    TEST_CASE("polar_reunitarize examples") {
        Rng rng(8);
        const ComplexMatrix u = random_unitary(rng, 3);
        CHECK((polar_reunitarize(u) - u).norm() < 1e-14);
        CHECK((polar_reunitarize(2.0 * identity(3)) - identity(3)).norm() < 1e-15);
        CHECK(oracle::distance(polar_reunitarize((1.0 + 1e-6) * pauli::x()), oracle::sx()) < 1e-15);
        ComplexMatrix singular = identity(2);
        singular(1, 1) = 0.0;
        CHECK_THROWS_AS(polar_reunitarize(singular), NumericError);
    }

    TEST_CASE("tolerance validation") {
        CHECK_THROWS_AS(Tolerance(-1.0, 0.0), ContractError);
        CHECK_THROWS_AS(Tolerance(0.0, 0.0), ContractError);
        CHECK(Tolerance(1e-10, 1e-10).bound(100.0) == doctest::Approx(1e-8));
        CHECK(Tolerance(1e-10, 1e-10).bound(0.0) == doctest::Approx(1e-10));
    }

    TEST_CASE("non-finite and non-square inputs are rejected") {
        ComplexMatrix rect(2, 3);
        rect.setZero();
        CHECK_THROWS_AS(require_valid(rect, "test"), ShapeError);
        CHECK_THROWS_AS(require_valid(ComplexMatrix::Zero(kMaxDim + 1, kMaxDim + 1), "test"), ShapeError);
        CHECK_FALSE(is_hermitian(rect));
        CHECK_FALSE(is_unitary(rect));
    }
}
