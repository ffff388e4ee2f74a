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

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "bqm/linalg.hpp"

namespace bqm {

// Closed real interval; either end may be infinite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Interval whole_line() { return {}; }
    bool contains(double t) const;
    bool is_finite() const;
};

enum class PropagatorScheme {
    midpoint,  // exp(-i H(t + dt/2) dt / hbar), second order
    magnus4,   // two exponentials at the Gauss-Legendre nodes, fourth order
};

struct PhysicsConfig {
    double hbar = 1.0;
    int reunitarize_every = 64;  // polar re-unitarization period of step products
    PropagatorScheme scheme = PropagatorScheme::magnus4;
    double max_step = 1e-3;  // step bound for propagators built without an explicit grid
    double fd_step = 1e-4;   // central-difference step for time derivatives
    Tolerance tol;

    void validate() const;
};

using StateVector = ComplexVector;

struct EnsembleMember {
    double weight = 0.0;
    StateVector vector;
};

// Finite statistical ensemble. Weights carry no time dependence.
struct Ensemble {
    std::vector<EnsembleMember> members;
};

struct DensityState {
    ComplexMatrix rho;
    double time = 0.0;
};

// Time-dependent Hermitian Hamiltonian on a declared domain. Every
// evaluation is checked for domain membership, shape, and Hermiticity.
class HamiltonianFamily {
   public:
    using Evaluator = std::function<ComplexMatrix(double)>;

    HamiltonianFamily(Index dim, Interval domain, Evaluator evaluator, Tolerance tol = {});

    ComplexMatrix operator()(double t) const;
    Index dim() const noexcept { return dim_; }
    const Interval& domain() const noexcept { return domain_; }

    static HamiltonianFamily constant(const ComplexMatrix& h, Interval domain = Interval::whole_line());
    static HamiltonianFamily zero(Index dim);
    // f(t) * h
    static HamiltonianFamily modulated(const ComplexMatrix& h, std::function<double(double)> f,
                                       Interval domain = Interval::whole_line());
    // h0 + cos(omega t + phase) h1
    static HamiltonianFamily harmonic_drive(const ComplexMatrix& h0, const ComplexMatrix& h1, double omega,
                                            double phase);
    // matrices[k] on [breaks[k-1], breaks[k]); needs matrices.size() == breaks.size() + 1
    static HamiltonianFamily piecewise_constant(std::vector<double> breaks, std::vector<ComplexMatrix> matrices);
    // Piecewise-linear interpolation between samples; domain is [times.front(), times.back()].
    static HamiltonianFamily table(std::vector<double> times, std::vector<ComplexMatrix> matrices);

   private:
    Index dim_;
    Interval domain_;
    std::shared_ptr<const Evaluator> evaluator_;
    Tolerance tol_;
};

struct Propagator {
    ComplexMatrix u;
    double t_from = 0.0;
    double t_to = 0.0;
};

class TimeGrid {
   public:
    TimeGrid(double t0, double t1, int steps);

    double t0() const noexcept { return t0_; }
    double t1() const noexcept { return t1_; }
    int steps() const noexcept { return steps_; }
    double dt() const noexcept { return (t1_ - t0_) / steps_; }
    double at(int k) const noexcept { return k == steps_ ? t1_ : t0_ + k * dt(); }

   private:
    double t0_;
    double t1_;
    int steps_;
};

ComplexMatrix density_matrix(const ComplexVector& psi, double weight = 1.0);

DensityState density_from_ensemble(const Ensemble& ensemble, double time = 0.0, const Tolerance& tol = {});

struct DensityValidity {
    bool hermitian = false;
    bool positive = false;
    bool unit_trace = false;
    double hermiticity_residual = 0.0;
    double min_eigenvalue = 0.0;
    double trace_deviation = 0.0;

    bool ok() const noexcept { return hermitian && positive && unit_trace; }
};

// Never throws on non-density input; it reports.
DensityValidity validate_density(const ComplexMatrix& rho, const Tolerance& tol = {});

struct Purity {
    double value = 0.0;  // Tr(rho^2)
    bool is_pure = false;
};

Purity purity(const DensityState& state, const Tolerance& tol = {});

// Propagator for a single step [t_from, t_to]; either ordering is allowed.
ComplexMatrix step_propagator(const HamiltonianFamily& h, double t_from, double t_to, const PhysicsConfig& cfg);

// U(t_to, t_from) as an ordered product over `steps` uniform steps.
Propagator propagate_between(const HamiltonianFamily& h, double t_from, double t_to, int steps,
                             const PhysicsConfig& cfg);

// As above with the step count chosen from cfg.max_step.
Propagator propagate_between(const HamiltonianFamily& h, double t_from, double t_to, const PhysicsConfig& cfg);

// U(t_k, t0) for every grid point, starting with the identity.
std::vector<Propagator> evolution_path(const HamiltonianFamily& h, const TimeGrid& grid, const PhysicsConfig& cfg);

Propagator evolution_operator(const HamiltonianFamily& h, const TimeGrid& grid, const PhysicsConfig& cfg);

// rho(t) = U rho(t0) U^-1
DensityState propagate_density(const DensityState& rho0, const Propagator& u, const Tolerance& tol = {});

// Classical RK4 on i hbar drho/dt = [H(t), rho]; one state per grid point.
std::vector<DensityState> integrate_von_neumann(const DensityState& rho0, const HamiltonianFamily& h,
                                                const TimeGrid& grid, const PhysicsConfig& cfg);

struct Expectation {
    double value = 0.0;
    double imaginary_residue = 0.0;
};

Expectation expectation(const DensityState& state, const ComplexMatrix& observable, const Tolerance& tol = {});

// U(t, t_ref) for any t in `range`, served from products cached at a fixed
// anchor spacing plus one short step. Cheap to copy; the cache is shared.
class EvolutionTable {
   public:
    EvolutionTable(HamiltonianFamily h, double t_ref, Interval range, PhysicsConfig cfg);

    ComplexMatrix operator()(double t) const;
    double reference_time() const noexcept;
    const Interval& range() const noexcept;
    Index dim() const noexcept;

   private:
    struct Data;
    std::shared_ptr<const Data> data_;
};

}  // namespace bqm
