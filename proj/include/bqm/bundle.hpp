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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bqm/hilbert.hpp"
#include "bqm/linalg.hpp"

namespace bqm {

// A point of the base set. Only equality matters to the bundle layer; the
// coordinates exist so that point-keyed frame constructors can vary smoothly
// over a parameter family.
struct BasePointLabel {
    std::string name;
    std::array<double, 2> coords{};

    friend bool operator==(const BasePointLabel&, const BasePointLabel&) = default;
};

struct Path {
    std::string id;
    Interval domain;
    std::function<BasePointLabel(double)> point_of;

    // Path whose point at time t is {id, {t, 0}}.
    static Path line(std::string id, Interval domain = Interval::whole_line());

    BasePointLabel at(double t) const;
    bool contains(double t) const { return domain.contains(t); }
};

// Unitary trivializations l mapping fibre coordinates to reference-space
// coordinates. Either keyed by (path, time) or by base point; in point mode
// a self-intersecting path sees the same frame at every visit of a point.
class FrameField {
   public:
    enum class Keying { path_time, base_point };
    using PathTimeEvaluator = std::function<ComplexMatrix(const Path&, double)>;
    using PointEvaluator = std::function<ComplexMatrix(const BasePointLabel&)>;

    static FrameField keyed_by_path(Index dim, PathTimeEvaluator evaluator, Tolerance tol = {});
    static FrameField keyed_by_point(Index dim, PointEvaluator evaluator, Tolerance tol = {});

    static FrameField identity(Index dim);
    static FrameField identity_points(Index dim);
    // l(gamma, t) = W_gamma exp(-i t K_gamma); W Haar, K Hermitian with norm `drift`,
    // both seeded from (seed, gamma.id).
    static FrameField random_unitary(Index dim, std::uint64_t seed, double drift = 0.5);
    // l(x) = W_x exp(-i (x0 K0 + x1 K1)) seeded from (seed, x.name).
    static FrameField random_unitary_points(Index dim, std::uint64_t seed, double drift = 0.5);
    // l(gamma, t) = U(t, t_ref)
    static FrameField co_moving(EvolutionTable table);
    // l(gamma, t) = exp(i rate t diag(phases))
    static FrameField diagonal_phase(RealVector phases, double rate);

    ComplexMatrix operator()(const Path& path, double t) const;
    Keying keying() const noexcept { return keying_; }
    Index dim() const noexcept { return dim_; }

   private:
    FrameField(Index dim, Keying keying, PathTimeEvaluator by_path, PointEvaluator by_point, Tolerance tol);

    Index dim_;
    Keying keying_;
    std::shared_ptr<const PathTimeEvaluator> by_path_;
    std::shared_ptr<const PointEvaluator> by_point_;
    Tolerance tol_;
};

struct StateSection {
    Path path;
    std::function<ComplexVector(double)> value_of;
};

struct EvolutionTransport {
    std::string path_id;
    double t_from = 0.0;
    double t_to = 0.0;
    ComplexMatrix matrix;  // fibre(t_from) -> fibre(t_to)
};

struct MorphismValue {
    std::string path_id;
    double time = 0.0;
    ComplexMatrix matrix;
};

// A morphism value satisfying the density conditions in fibre coordinates.
struct DensityMorphism : MorphismValue {};

DensityMorphism make_density_morphism(MorphismValue value, const Tolerance& tol = {});

struct TransportCoefficients {
    std::string path_id;
    double time = 0.0;
    ComplexMatrix gamma;
};

// l(gamma,t)^-1 U(t,s) l(gamma,s), with U built at step bound cfg.max_step.
EvolutionTransport evolution_transport(const HamiltonianFamily& h, const FrameField& frames, const Path& path,
                                       double t, double s, const PhysicsConfig& cfg);

// Same, from an already computed propagator U(t_to, t_from).
EvolutionTransport transport_from_propagator(const Propagator& u, const FrameField& frames, const Path& path);

// l^-1 A l at time t.
MorphismValue lift_operator(const ComplexMatrix& a, const FrameField& frames, const Path& path, double t);

// l M l^-1, the inverse of lift_operator.
ComplexMatrix lower_morphism(const MorphismValue& m, const FrameField& frames, const Path& path);

DensityMorphism density_morphism(const DensityState& rho, const FrameField& frames, const Path& path,
                                 const Tolerance& tol = {});

struct WeightedSection {
    double weight = 0.0;
    StateSection section;
};

// sum_i p_i Psi_i Psi_i^dagger / <Psi_i|Psi_i>, evaluated directly in the fibre.
DensityMorphism density_morphism_from_ensemble(const std::vector<WeightedSection>& sections, const Path& path,
                                               double t, const Tolerance& tol = {});

double bundle_expectation(const DensityMorphism& rho, const MorphismValue& a);

// Gamma(t) = -(d/dt T(t, s)) T(t, s)^-1 at s = t, by a central difference of
// step fd_step. Throws ContractError when t -/+ fd_step leaves a domain.
TransportCoefficients transport_coefficients(const HamiltonianFamily& h, const FrameField& frames,
                                             const Path& path, double t, double fd_step,
                                             const PhysicsConfig& cfg);

using MatrixFunction = std::function<ComplexMatrix(double)>;

// Gamma as a function of time. Falls back to a one-sided second-order
// stencil where the central one would leave the domain, for integrators
// that must reach the domain boundary.
MatrixFunction gamma_source(const HamiltonianFamily& h, const FrameField& frames, const Path& path,
                            const PhysicsConfig& cfg);

// dC/dt + [Gamma(t), C(t)]
ComplexMatrix morphism_derivation(const MatrixFunction& c, const MatrixFunction& gamma, double t, double fd_step);

DensityMorphism propagate_density_morphism(const DensityMorphism& rho0, const EvolutionTransport& transport,
                                           const Tolerance& tol = {});

// RK4 on i hbar dP/dt = [H^m, P] with H^m = -i hbar Gamma, i.e. dP/dt = -[Gamma, P].
std::vector<DensityMorphism> integrate_bundle_liouville(const DensityMorphism& rho0, const HamiltonianFamily& h,
                                                        const FrameField& frames, const Path& path,
                                                        const TimeGrid& grid, const PhysicsConfig& cfg);

struct TransportSystemReport {
    bool section_transported = false;  // D Psi = 0
    bool product_transported = false;  // D(P Psi) = 0
    bool density_equation = false;     // dP/dt + [Gamma, P] = 0
    double section_residual = 0.0;
    double product_residual = 0.0;
    double density_residual = 0.0;
};

// Evaluates the three conditions at every interior grid point.
TransportSystemReport check_transport_section_system(const StateSection& psi, const MatrixFunction& rho,
                                                     const MatrixFunction& gamma, const TimeGrid& grid,
                                                     double fd_step, double threshold = 1e-6);

}  // namespace bqm
