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

#include "bqm/bundle.hpp"
#include "bqm/errors.hpp"
#include "bqm/random.hpp"
#include "oracles.hpp"

using namespace bqm;
using oracle::kI;

namespace {

ComplexMatrix hadamard() {
    ComplexMatrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::sqrt(2.0);
}

FrameField constant_frames(const ComplexMatrix& l) {
    return FrameField::keyed_by_path(l.rows(), [l](const Path&, double) { return l; });
}

ComplexMatrix diag2(double a, double b) {
    ComplexMatrix r = ComplexMatrix::Zero(2, 2);
    r(0, 0) = a;
    r(1, 1) = b;
    return r;
}

ComplexVector ket(Complex a, Complex b) {
    ComplexVector v(2);
    v << a, b;
    return v;
}

const Path kPath = Path::line("gamma", Interval{-1.0, 5.0});

}  // namespace

TEST_SUITE("bundle") {
    TEST_CASE("evolution_transport examples") {
        PhysicsConfig cfg;
        const HamiltonianFamily h = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 1.0, 0.0);
        const EvolutionTransport t = evolution_transport(h, FrameField::identity(2), kPath, 1.2, 0.3, cfg);
        CHECK((t.matrix - propagate_between(h, 0.3, 1.2, cfg).u).norm() < 1e-14);
        CHECK(t.t_from == 0.3);
        CHECK(t.t_to == 1.2);

        const FrameField co = FrameField::co_moving(EvolutionTable(h, 0.0, Interval{-1.0, 5.0}, cfg));
        for (auto [a, b] : {std::pair{2.0, 0.5}, std::pair{0.1, 3.3}, std::pair{-0.5, 4.0}}) {
            CHECK((evolution_transport(h, co, kPath, a, b, cfg).matrix - identity(2)).norm() < 1e-10);
        }
        Rng rng(1);
        const FrameField random = FrameField::random_unitary(2, 99);
        CHECK(evolution_transport(h, random, kPath, 0.7, 0.7, cfg).matrix == identity(2));
        CHECK_THROWS_AS(evolution_transport(h, random, kPath, 6.0, 0.0, cfg), ContractError);
    }

    TEST_CASE("lift_operator examples") {
        const ComplexMatrix a = pauli::y();
        CHECK(lift_operator(a, FrameField::identity(2), kPath, 0.5).matrix == a);
        CHECK((lift_operator(identity(2), FrameField::random_unitary(2, 4), kPath, 0.5).matrix - identity(2)).norm() <
              1e-14);
        const MorphismValue m = lift_operator(pauli::z(), constant_frames(hadamard()), kPath, 0.5);
        CHECK(oracle::distance(m.matrix, oracle::sx()) < 1e-15);
        CHECK(m.path_id == "gamma");
        CHECK(m.time == 0.5);
        CHECK((lower_morphism(m, constant_frames(hadamard()), kPath) - pauli::z()).norm() < 1e-15);
    }

    TEST_CASE("density_morphism examples") {
        const DensityState plus{0.5 * (identity(2) + pauli::x()), 0.0};
        CHECK(density_morphism(plus, FrameField::identity(2), kPath).matrix == plus.rho);
        const DensityState mixed{0.5 * identity(2), 1.0};
        CHECK((density_morphism(mixed, FrameField::random_unitary(2, 5), kPath).matrix - mixed.rho).norm() < 1e-15);
        ComplexMatrix expected(2, 2);
        expected << 0.5, 0.5, 0.5, 0.5;
        CHECK((density_morphism({diag2(1, 0), 0.0}, constant_frames(hadamard()), kPath).matrix - expected).norm() <
              1e-15);
        CHECK_THROWS_AS(density_morphism({pauli::x(), 0.0}, FrameField::identity(2), kPath), ContractError);
    }

    TEST_CASE("density_morphism_from_ensemble examples") {
        const StateSection e0{kPath, [](double) { return ket(1, 0); }};
        const StateSection e1{kPath, [](double) { return ket(0, 1); }};
        const StateSection e0x3{kPath, [](double) { return ket(3, 0); }};
        CHECK((density_morphism_from_ensemble({{1.0, e0}}, kPath, 0.2).matrix - diag2(1, 0)).norm() < 1e-15);
        CHECK((density_morphism_from_ensemble({{0.5, e0}, {0.5, e1}}, kPath, 0.2).matrix - diag2(0.5, 0.5)).norm() <
              1e-15);
        CHECK((density_morphism_from_ensemble({{1.0, e0x3}}, kPath, 0.2).matrix - diag2(1, 0)).norm() < 1e-15);
        CHECK_THROWS_AS(density_morphism_from_ensemble({{0.4, e0}, {0.4, e1}}, kPath, 0.2), ContractError);
        CHECK_THROWS_AS(density_morphism_from_ensemble({{1.0, e0}}, kPath, 9.0), ContractError);
    }

    TEST_CASE("bundle_expectation examples") {
        const FrameField frames = FrameField::random_unitary(2, 12);
        const DensityMorphism half = make_density_morphism({"gamma", 0.3, 0.5 * identity(2)});
        CHECK(bundle_expectation(half, lift_operator(identity(2), frames, kPath, 0.3)) == doctest::Approx(1.0));
        CHECK(std::abs(bundle_expectation(half, lift_operator(pauli::z(), frames, kPath, 0.3))) < 1e-15);

        Rng rng(3);
        for (int i = 0; i < 20; ++i) {
            const ComplexVector psi = random_state(rng, 3);
            const DensityState rho{density_matrix(psi), 0.3};
            const ComplexMatrix a = random_hermitian(rng, 3, 2.0);
            const FrameField f3 = FrameField::random_unitary(3, 100 + i);
            const double direct = (rho.rho * a).trace().real();
            CHECK(bundle_expectation(density_morphism(rho, f3, kPath), lift_operator(a, f3, kPath, 0.3)) ==
                  doctest::Approx(direct).epsilon(1e-12));
        }

        CHECK_THROWS_AS(bundle_expectation(half, lift_operator(pauli::z(), frames, kPath, 0.4)), ContractError);
        MorphismValue other = lift_operator(pauli::z(), frames, kPath, 0.3);
        other.path_id = "elsewhere";
        CHECK_THROWS_AS(bundle_expectation(half, other), ContractError);
    }

    TEST_CASE("transport_coefficients examples") {
        PhysicsConfig cfg;
        const HamiltonianFamily hz = HamiltonianFamily::constant(pauli::z());
        const TransportCoefficients g = transport_coefficients(hz, FrameField::identity(2), kPath, 1.0, 1e-4, cfg);
        CHECK(oracle::distance(g.gamma, oracle::scale(oracle::sz(), kI)) < 1e-8);

        const HamiltonianFamily h = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 1.0, 0.0);
        const FrameField co = FrameField::co_moving(EvolutionTable(h, 0.0, Interval{-1.0, 5.0}, cfg));
        CHECK(transport_coefficients(h, co, kPath, 2.0, 1e-4, cfg).gamma.norm() < 1e-6);
        CHECK(transport_coefficients(HamiltonianFamily::zero(2), FrameField::identity(2), kPath, 1.0, 1e-4, cfg)
                  .gamma.norm() == 0.0);
        CHECK_THROWS_AS(transport_coefficients(hz, FrameField::identity(2), kPath, -1.0, 1e-4, cfg), ContractError);
        CHECK_THROWS_AS(transport_coefficients(hz, FrameField::identity(2), kPath, 4.99999, 1e-4, cfg), ContractError);
    }

    TEST_CASE("transport coefficients equal the frame connection plus the lifted Hamiltonian") {
        // Gamma = l^-1 dl/dt + (i / hbar) l^-1 H l, with dl/dt from the closed form of diagonal-phase frames.
        PhysicsConfig cfg;
        cfg.hbar = 1.5;
        RealVector phases(2);
        phases << 0.4, -1.1;
        const double rate = 0.8;
        const FrameField frames = FrameField::diagonal_phase(phases, rate);
        const HamiltonianFamily h = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 1.0, 0.3);
        const double t = 1.7;
        ComplexMatrix connection = ComplexMatrix::Zero(2, 2);
        connection(0, 0) = kI * rate * phases(0);
        connection(1, 1) = kI * rate * phases(1);
        const ComplexMatrix l = frames(kPath, t);
        const ComplexMatrix expected = connection + (kI / cfg.hbar) * (l.adjoint() * h(t) * l);
        CHECK((transport_coefficients(h, frames, kPath, t, 1e-4, cfg).gamma - expected).norm() < 1e-7);
    }

    TEST_CASE("morphism_derivation examples") {
        const MatrixFunction zero = [](double) { return ComplexMatrix::Zero(2, 2).eval(); };
        const MatrixFunction constant = [](double) { return pauli::x(); };
        const MatrixFunction ramp = [](double t) { return (t * identity(2)).eval(); };
        CHECK(morphism_derivation(constant, zero, 0.5, 1e-4).norm() == 0.0);
        CHECK((morphism_derivation(ramp, zero, 0.5, 1e-4) - identity(2)).norm() < 1e-10);

        PhysicsConfig cfg;
        const HamiltonianFamily h = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 1.0, 0.0);
        const FrameField frames = FrameField::random_unitary(2, 31);
        const DensityMorphism p0 = density_morphism({0.5 * (identity(2) + pauli::x()), 0.0}, frames, kPath);
        const MatrixFunction propagated = [&](double t) {
            return propagate_density_morphism(p0, evolution_transport(h, frames, kPath, t, 0.0, cfg)).matrix;
        };
        const MatrixFunction gamma = gamma_source(h, frames, kPath, cfg);
        for (double t : {0.5, 1.3, 2.2}) {
            CHECK(morphism_derivation(propagated, gamma, t, cfg.fd_step).norm() < 1e-6);
        }
        CHECK_THROWS_AS(morphism_derivation(constant, zero, 0.5, 0.0), ContractError);
    }

    TEST_CASE("propagate_density_morphism examples") {
        PhysicsConfig cfg;
        const DensityMorphism p0 = make_density_morphism({"gamma", 0.0, diag2(0.6, 0.4)});
        const DensityMorphism same = propagate_density_morphism(p0, {"gamma", 0.0, 1.0, identity(2)});
        CHECK(same.matrix == p0.matrix);
        CHECK(same.time == 1.0);

        const HamiltonianFamily hz = HamiltonianFamily::constant(pauli::z());
        const DensityState rho0{0.5 * (identity(2) + pauli::x()), 0.0};
        const Propagator u = propagate_between(hz, 0.0, std::numbers::pi / 3, cfg);
        const DensityMorphism id_route = propagate_density_morphism(
            density_morphism(rho0, FrameField::identity(2), kPath),
            transport_from_propagator(u, FrameField::identity(2), kPath));
        CHECK((id_route.matrix - propagate_density(rho0, u).rho).norm() < 1e-15);

        const FrameField frames = FrameField::random_unitary(2, 77);
        const DensityMorphism bundle_route = propagate_density_morphism(
            density_morphism(rho0, frames, kPath), transport_from_propagator(u, frames, kPath));
        const ComplexMatrix lift_route = lift_operator(propagate_density(rho0, u).rho, frames, kPath, u.t_to).matrix;
        CHECK((bundle_route.matrix - lift_route).norm() < 1e-8);

        CHECK_THROWS_AS(propagate_density_morphism(p0, {"other", 0.0, 1.0, identity(2)}), ContractError);
        CHECK_THROWS_AS(propagate_density_morphism(p0, {"gamma", 0.5, 1.0, identity(2)}), ContractError);
        CHECK_THROWS_AS(make_density_morphism({"gamma", 0.0, pauli::x()}), ContractError);
    }

    TEST_CASE("integrate_bundle_liouville examples") {
        PhysicsConfig cfg;
        const HamiltonianFamily h = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 1.0, 0.0);
        const DensityState rho0{0.5 * (identity(2) + pauli::y()), 0.0};
        const TimeGrid grid(0.0, 2.0, 400);

        const auto bundle = integrate_bundle_liouville(density_morphism(rho0, FrameField::identity(2), kPath), h,
                                                       FrameField::identity(2), kPath, grid, cfg);
        const auto hilbert = integrate_von_neumann(rho0, h, grid, cfg);
        CHECK((bundle.back().matrix - hilbert.back().rho).norm() < 1e-7);

        const FrameField co = FrameField::co_moving(EvolutionTable(h, 0.0, Interval{-1.0, 5.0}, cfg));
        const DensityMorphism p0 = density_morphism(rho0, co, kPath);
        for (const auto& p : integrate_bundle_liouville(p0, h, co, kPath, grid, cfg)) {
            CHECK((p.matrix - p0.matrix).norm() < 1e-6);
        }

        const DensityMorphism still = density_morphism(rho0, FrameField::identity(2), kPath);
        for (const auto& p :
             integrate_bundle_liouville(still, HamiltonianFamily::zero(2), FrameField::identity(2), kPath, grid, cfg)) {
            CHECK(p.matrix == still.matrix);
        }

        const DensityMorphism late = make_density_morphism({"gamma", 1.0, rho0.rho});
        CHECK_THROWS_AS(integrate_bundle_liouville(late, h, FrameField::identity(2), kPath, grid, cfg), ContractError);
    }

    TEST_CASE("check_transport_section_system examples") {
        PhysicsConfig cfg;
        const HamiltonianFamily h = HamiltonianFamily::harmonic_drive(pauli::z(), pauli::x(), 1.0, 0.0);
        const FrameField frames = FrameField::random_unitary(2, 8);
        const MatrixFunction gamma = gamma_source(h, frames, kPath, cfg);
        const ComplexVector psi0 = ket(0.6, Complex(0.0, 0.8));
        const ComplexMatrix p0 = 0.5 * (identity(2) + pauli::x());
        const auto transport = [&](double t) { return evolution_transport(h, frames, kPath, t, 0.0, cfg).matrix; };
        const StateSection psi{kPath, [&](double t) -> ComplexVector { return transport(t) * psi0; }};
        const MatrixFunction rho = [&](double t) -> ComplexMatrix {
            const ComplexMatrix tr = transport(t);
            return tr * p0 * tr.adjoint();
        };
        const TimeGrid grid(0.2, 0.6, 4);
        const TransportSystemReport all = check_transport_section_system(psi, rho, gamma, grid, cfg.fd_step);
        CHECK(all.section_transported);
        CHECK(all.product_transported);
        CHECK(all.density_equation);

        const MatrixFunction frozen = [&](double) { return p0; };
        const TransportSystemReport counter = check_transport_section_system(psi, frozen, gamma, grid, cfg.fd_step);
        CHECK(counter.section_transported);
        CHECK_FALSE(counter.product_transported);
        CHECK_FALSE(counter.density_equation);

        const StateSection still{kPath, [&](double) { return psi0; }};
        const MatrixFunction zero_gamma = [](double) { return ComplexMatrix::Zero(2, 2).eval(); };
        const TransportSystemReport trivial = check_transport_section_system(still, frozen, zero_gamma, grid, cfg.fd_step);
        CHECK(trivial.section_transported);
        CHECK(trivial.product_transported);
        CHECK(trivial.density_equation);
    }

    TEST_CASE("frame fields") {
        const FrameField random = FrameField::random_unitary(3, 5);
        const Path other = Path::line("other");
        CHECK(unitarity_residual(random(kPath, 0.3)) < 1e-13);
        CHECK(random(kPath, 0.3) == FrameField::random_unitary(3, 5)(kPath, 0.3));
        CHECK((random(kPath, 0.3) - random(other, 0.3)).norm() > 1e-3);
        CHECK((random(kPath, 0.3) - random(kPath, 0.3 + 1e-6)).norm() < 1e-5);

        const FrameField by_point = FrameField::random_unitary_points(2, 5);
        const Path loop{"loop", Interval::whole_line(),
                        [](double t) { return BasePointLabel{"x", {std::cos(t), std::sin(t)}}; }};
        CHECK((by_point(loop, 0.25) - by_point(loop, 0.25 + 2.0 * std::numbers::pi)).norm() < 1e-12);
        CHECK(by_point.keying() == FrameField::Keying::base_point);

        const FrameField not_unitary = FrameField::keyed_by_path(2, [](const Path&, double) { return (2.0 * identity(2)).eval(); });
        CHECK_THROWS_AS(not_unitary(kPath, 0.0), ContractError);
        CHECK_THROWS_AS(random(kPath, 0.3 + 100.0), ContractError);
    }
}
