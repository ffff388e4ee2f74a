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
#include "bqm/hilbert.hpp"
#include "bqm/random.hpp"
#include "oracles.hpp"

using namespace bqm;
using oracle::kI;

namespace {

ComplexVector ket(Complex a, Complex b) {
    ComplexVector v(2);
    v << a, b;
    return v;
}

ComplexMatrix plus_projector() {
    ComplexMatrix r(2, 2);
    r << 0.5, 0.5, 0.5, 0.5;
    return r;
}

ComplexMatrix diag2(double a, double b) {
    ComplexMatrix r = ComplexMatrix::Zero(2, 2);
    r(0, 0) = a;
    r(1, 1) = b;
    return r;
}

}  // namespace

TEST_SUITE("hilbert") {
    TEST_CASE("density_from_ensemble examples") {
        CHECK((density_from_ensemble({{{1.0, ket(1, 0)}}}).rho - diag2(1, 0)).norm() < 1e-15);
        CHECK((density_from_ensemble({{{0.5, ket(1, 0)}, {0.5, ket(0, 1)}}}).rho - diag2(0.5, 0.5)).norm() < 1e-15);
        CHECK((density_from_ensemble({{{1.0, ket(2, 0)}}}).rho - diag2(1, 0)).norm() < 1e-15);
    }

    TEST_CASE("density_from_ensemble errors") {
        CHECK_THROWS_AS(density_from_ensemble({{{0.9, ket(1, 0)}}}), ContractError);
        CHECK_THROWS_AS(density_from_ensemble({{{1.0, ket(0, 0)}}}), ContractError);
        CHECK_THROWS_AS(density_from_ensemble({{{1.2, ket(1, 0)}, {-0.2, ket(0, 1)}}}), ContractError);
        CHECK_THROWS_AS(density_from_ensemble({}), ContractError);
    }

    TEST_CASE("validate_density examples") {
        CHECK(validate_density(diag2(0.5, 0.5)).ok());
        const DensityValidity x = validate_density(pauli::x());
        CHECK(x.hermitian);
        CHECK_FALSE(x.positive);
        CHECK_FALSE(x.unit_trace);
        CHECK(x.min_eigenvalue == doctest::Approx(-1.0));
        CHECK(validate_density(diag2(1, 0)).ok());
        ComplexMatrix bad = diag2(1, 0);
        bad(0, 1) = 0.3;
        CHECK_FALSE(validate_density(bad).hermitian);
    }

    TEST_CASE("purity examples") {
        const Purity p1 = purity({diag2(1, 0), 0.0});
        CHECK(p1.value == doctest::Approx(1.0));
        CHECK(p1.is_pure);
        const Purity p2 = purity({diag2(0.5, 0.5), 0.0});
        CHECK(p2.value == doctest::Approx(0.5));
        CHECK_FALSE(p2.is_pure);
        const Purity p3 = purity({diag2(0.75, 0.25), 0.0});
        CHECK(p3.value == doctest::Approx(0.75 * 0.75 + 0.25 * 0.25));
        CHECK_FALSE(p3.is_pure);
    }

    TEST_CASE("evolution_operator examples") {
        PhysicsConfig cfg;
        const double omega = 1.7;
        const HamiltonianFamily h = HamiltonianFamily::constant(omega * pauli::z());
        for (double t : {0.3, 1.0, 2.5}) {
            const Propagator u = evolution_operator(h, TimeGrid(0.0, t, 100), cfg);
            CHECK(oracle::distance(u.u, oracle::sz_propagator(omega, t)) < 1e-12);
            CHECK(u.t_from == 0.0);
            CHECK(u.t_to == t);
        }
        CHECK((evolution_operator(h, TimeGrid(1.5, 1.5, 1), cfg).u - identity(2)).norm() == 0.0);
        CHECK((evolution_operator(HamiltonianFamily::zero(3), TimeGrid(0.0, 4.0, 10), cfg).u - identity(3)).norm() == 0.0);
    }

    TEST_CASE("evolution_operator matches the rotation formula for constant qubit Hamiltonians") {
        Rng rng(17);
        for (auto scheme : {PropagatorScheme::magnus4, PropagatorScheme::midpoint}) {
            PhysicsConfig cfg;
            cfg.scheme = scheme;
            for (int i = 0; i < 10; ++i) {
                double n[3] = {rng.normal(), rng.normal(), rng.normal()};
                const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
                for (double& c : n) c /= len;
                const double w = rng.uniform(0.1, 3.0);
                const double t = rng.uniform(0.1, 3.0);
                const ComplexMatrix h = w * (n[0] * pauli::x() + n[1] * pauli::y() + n[2] * pauli::z());
                const Propagator u = evolution_operator(HamiltonianFamily::constant(h), TimeGrid(0.0, t, 7), cfg);
                CHECK(oracle::distance(u.u, oracle::pauli_rotation(w * t, n[0], n[1], n[2])) < 1e-12);
            }
        }
    }

    TEST_CASE("hbar scales time") {
        PhysicsConfig cfg;
        cfg.hbar = 2.0;
        const Propagator u =
            evolution_operator(HamiltonianFamily::constant(pauli::z()), TimeGrid(0.0, 1.0, 10), cfg);
        CHECK(oracle::distance(u.u, oracle::sz_propagator(0.5, 1.0)) < 1e-13);
    }

    TEST_CASE("fourth-order scheme converges faster than the midpoint scheme") {
        // Reference: a very fine fourth-order run.
        const HamiltonianFamily h = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 1.0, 0.0);
        PhysicsConfig fine;
        const ComplexMatrix ref = evolution_operator(h, TimeGrid(0.0, 2.0, 20000), fine).u;
        PhysicsConfig mid;
        mid.scheme = PropagatorScheme::midpoint;
        const double e_mid_coarse = (evolution_operator(h, TimeGrid(0.0, 2.0, 100), mid).u - ref).norm();
        const double e_mid_fine = (evolution_operator(h, TimeGrid(0.0, 2.0, 200), mid).u - ref).norm();
        const double e4_coarse = (evolution_operator(h, TimeGrid(0.0, 2.0, 100), fine).u - ref).norm();
        const double e4_fine = (evolution_operator(h, TimeGrid(0.0, 2.0, 200), fine).u - ref).norm();
        CHECK(e_mid_coarse / e_mid_fine == doctest::Approx(4.0).epsilon(0.1));
        CHECK(e4_coarse / e4_fine == doctest::Approx(16.0).epsilon(0.15));
    }

    TEST_CASE("evolution_operator rejects grids outside the domain") {
        const HamiltonianFamily h = HamiltonianFamily::table({0.0, 1.0}, {pauli::x(), pauli::y()});
        PhysicsConfig cfg;
        CHECK_THROWS_AS(evolution_operator(h, TimeGrid(0.0, 2.0, 10), cfg), ContractError);
        CHECK_NOTHROW(evolution_operator(h, TimeGrid(0.0, 1.0, 10), cfg));
    }

    TEST_CASE("propagate_density examples") {
        const DensityState plus{plus_projector(), 0.0};
        const Propagator id{identity(2), 0.0, 1.0};
        CHECK((propagate_density(plus, id).rho - plus.rho).norm() == 0.0);
        CHECK(propagate_density(plus, id).time == 1.0);

        PhysicsConfig cfg;
        const HamiltonianFamily h = HamiltonianFamily::constant(pauli::z());
        for (double t : {0.4, std::numbers::pi / 4, 2.0}) {
            const DensityState r = propagate_density(plus, evolution_operator(h, TimeGrid(0.0, t, 50), cfg));
            CHECK(std::abs(r.rho(0, 1) - 0.5 * std::exp(Complex(0.0, -2.0 * t))) < 1e-12);
        }

        Rng rng(1);
        const DensityState mixed{diag2(0.5, 0.5), 0.0};
        const Propagator u{random_unitary(rng, 2), 0.0, 3.0};
        CHECK((propagate_density(mixed, u).rho - mixed.rho).norm() < 1e-15);
    }

    TEST_CASE("propagate_density errors") {
        const DensityState plus{plus_projector(), 0.5};
        CHECK_THROWS_AS(propagate_density(plus, Propagator{identity(2), 0.0, 1.0}), ContractError);
        CHECK_THROWS_AS(propagate_density({plus_projector(), 0.0}, Propagator{2.0 * identity(2), 0.0, 1.0}),
                        ContractError);
    }

    TEST_CASE("integrate_von_neumann examples") {
        PhysicsConfig cfg;
        const DensityState plus{plus_projector(), 0.0};
        for (const auto& r : integrate_von_neumann(plus, HamiltonianFamily::zero(2), TimeGrid(0.0, 1.0, 20), cfg)) {
            CHECK((r.rho - plus.rho).norm() == 0.0);
        }
        const DensityState diag{diag2(0.7, 0.3), 0.0};
        const auto diag_traj = integrate_von_neumann(diag, HamiltonianFamily::constant(diag2(2.0, -1.0)),
                                                     TimeGrid(0.0, 1.0, 20), cfg);
        CHECK((diag_traj.back().rho - diag.rho).norm() == 0.0);

        const double t = std::numbers::pi / 4;
        const auto traj = integrate_von_neumann(plus, HamiltonianFamily::constant(pauli::z()), TimeGrid(0.0, t, 200), cfg);
        CHECK(traj.size() == 201);
        CHECK(std::abs(traj.back().rho(0, 1) - 0.5 * std::exp(Complex(0.0, -2.0 * t))) < 1e-6);
        CHECK(traj.back().time == t);
    }

    TEST_CASE("integrate_von_neumann step underflow") {
        PhysicsConfig cfg;
        const DensityState rho{diag2(1, 0), 1e17};
        CHECK_THROWS_AS(
            integrate_von_neumann(rho, HamiltonianFamily::constant(pauli::x()), TimeGrid(1e17, 1e17 + 64.0, 1000), cfg),
            NumericError);
    }

    TEST_CASE("expectation examples") {
        const DensityState plus{plus_projector(), 0.0};
        CHECK(expectation(plus, identity(2)).value == doctest::Approx(1.0));
        CHECK(expectation({diag2(1, 0), 0.0}, pauli::z()).value == doctest::Approx(1.0));
        CHECK(expectation({diag2(0.5, 0.5), 0.0}, pauli::z()).value == doctest::Approx(0.0));
        CHECK(expectation(plus, pauli::x()).value == doctest::Approx(1.0));
        ComplexMatrix nh = pauli::x();
        nh(0, 1) = kI;
        CHECK_THROWS_AS(expectation(plus, nh), ContractError);
    }

    TEST_CASE("Hamiltonian families check their values") {
        const HamiltonianFamily bad(2, Interval::whole_line(), [](double) {
            ComplexMatrix m = pauli::x();
            m(0, 1) = 3.0;
            return m;
        });
        CHECK_THROWS_AS(bad(0.0), ContractError);
        const HamiltonianFamily wrong_dim(2, Interval::whole_line(), [](double) { return identity(3); });
        CHECK_THROWS_AS(wrong_dim(0.0), ShapeError);
        const HamiltonianFamily bounded = HamiltonianFamily::constant(pauli::z(), Interval{0.0, 1.0});
        CHECK_THROWS_AS(bounded(1.5), ContractError);
        CHECK_THROWS_AS(HamiltonianFamily::piecewise_constant({1.0}, {pauli::x()}), ContractError);
    }

    TEST_CASE("built-in families evaluate as documented") {
        const HamiltonianFamily pw = HamiltonianFamily::piecewise_constant({1.0}, {pauli::x(), pauli::y()});
        CHECK(pw(0.5) == pauli::x());
        CHECK(pw(1.5) == pauli::y());
        const HamiltonianFamily tab = HamiltonianFamily::table({0.0, 2.0}, {pauli::x(), pauli::z()});
        CHECK((tab(0.5) - (0.75 * pauli::x() + 0.25 * pauli::z())).norm() < 1e-15);
        const HamiltonianFamily drive = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 2.0, 0.5);
        CHECK((drive(0.3) - (pauli::z() + std::cos(2.0 * 0.3 + 0.5) * pauli::x())).norm() < 1e-15);
        const HamiltonianFamily mod = HamiltonianFamily::modulated(pauli::z(), [](double t) { return t * t; });
        CHECK((mod(3.0) - 9.0 * pauli::z()).norm() == 0.0);
    }

    TEST_CASE("EvolutionTable reproduces direct propagation") {
        PhysicsConfig cfg;
        const HamiltonianFamily h = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 1.3, 0.2);
        const EvolutionTable table(h, 0.5, Interval{-0.5, 2.0}, cfg);
        for (double t : {-0.5, -0.1234, 0.5, 0.77, 2.0}) {
            const ComplexMatrix direct = propagate_between(h, 0.5, t, cfg).u;
            CHECK((table(t) - direct).norm() < 1e-10);
        }
        CHECK_THROWS_AS(table(2.5), ContractError);
        CHECK_THROWS_AS(EvolutionTable(h, 3.0, Interval{0.0, 1.0}, cfg), ContractError);
        CHECK_THROWS_AS(EvolutionTable(h, 0.0, Interval::whole_line(), cfg), ContractError);
    }

    TEST_CASE("physics config validation") {
        PhysicsConfig cfg;
        cfg.hbar = 0.0;
        CHECK_THROWS_AS(cfg.validate(), ContractError);
        cfg = PhysicsConfig{};
        cfg.max_step = -1.0;
        CHECK_THROWS_AS(cfg.validate(), ContractError);
        CHECK_THROWS_AS(TimeGrid(1.0, 0.0, 5), ContractError);
        CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0), ContractError);
    }
}
