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

#include <algorithm>
#include <functional>
#include <memory>
#include <vector>

#include "bqm/bundle.hpp"
#include "bqm/hilbert.hpp"
#include "bqm/linalg.hpp"

namespace bqm {

// The unitary family V(t1, t) defining a picture of motion, with t1 fixed.
class PictureFamily {
   public:
    using Evaluator = std::function<ComplexMatrix(double)>;  // t -> V(t1, t)

    // `domain` bounds where the evaluator may be called; derivative stencils stay inside it.
    PictureFamily(Index dim, double anchor, Evaluator evaluator, Tolerance tol = {},
                  Interval domain = Interval::whole_line());

    // Schrodinger picture: V = I.
    static PictureFamily identity(Index dim, double anchor);
    // Heisenberg picture: V(t1, t) = U(t1, t). The table's reference time is the anchor.
    static PictureFamily evolution(EvolutionTable table);
    // Rotating frame: V(t1, t) = exp(-i omega (t - t1) diag(phases)).
    static PictureFamily diagonal_phase(double anchor, RealVector phases, double omega);

    ComplexMatrix operator()(double t) const;
    double anchor() const noexcept { return anchor_; }
    Index dim() const noexcept { return dim_; }
    const Interval& domain() const noexcept { return domain_; }

   private:
    Index dim_;
    double anchor_;
    Interval domain_;
    std::shared_ptr<const Evaluator> evaluator_;
    Tolerance tol_;
};

struct PictureGenerator {
    ComplexMatrix matrix;  // energy units
    double time = 0.0;
    double anchor = 0.0;
};

// U^-1 A U
ComplexMatrix to_heisenberg_operator(const ComplexMatrix& a, const Propagator& u);

// T^-1 A T, landing in the fibre at T.t_from.
MorphismValue to_heisenberg_morphism(const MorphismValue& a, const EvolutionTransport& transport);

struct ConstancyReport {
    double max_deviation = 0.0;
    double worst_time = 0.0;
};

// max_t || U^-1(t,t0) rho(t) U(t,t0) - rho(t0) ||
ConstancyReport heisenberg_density(const std::vector<DensityState>& trajectory,
                                   const std::vector<Propagator>& propagators);
ConstancyReport heisenberg_density(const std::vector<DensityMorphism>& trajectory,
                                   const std::vector<EvolutionTransport>& transports);

// Max norm residual of i hbar dA^H/dt = [A^H, H^H] + i hbar (dA/dt)^H over
// the interior grid points, with A^H taken relative to grid.t0().
double heisenberg_observable_rhs_check(const MatrixFunction& a_family, const HamiltonianFamily& h,
                                       const TimeGrid& grid, const PhysicsConfig& cfg);

// V(t1, t) A V(t1, t)^-1
ComplexMatrix v_transform_operator(const ComplexMatrix& a, const PictureFamily& v, double t);

// Bundle-side V-picture transform: l(t1)^-1 V(t1,t) l(t) M l(t)^-1 V^-1 l(t1),
// a morphism on the fibre at the anchor.
MorphismValue v_transform_morphism(const MorphismValue& m, const PictureFamily& v, const FrameField& frames,
                                   const Path& path);

// V H V^-1 + i hbar (dV/dt) V^-1, with dV/dt by central difference, one-sided
// at the edges of v.domain().
PictureGenerator v_picture_generator(const PictureFamily& v, const HamiltonianFamily& h, double t,
                                     double fd_step, const PhysicsConfig& cfg);

// RK4 on i hbar d rho^V/dt = [H~, rho^V]. rho0_v is the V-picture density at grid.t0().
std::vector<DensityState> integrate_v_picture_density(const DensityState& rho0_v, const PictureFamily& v,
                                                      const HamiltonianFamily& h, const TimeGrid& grid,
                                                      const PhysicsConfig& cfg);

// U^V(t,t1,t0) rho^V(t0) U^V^-1 with U^V(t,t1,t0) = V(t1,t) U(t,t0) V^-1(t1,t0).
ComplexMatrix v_picture_solution(const ComplexMatrix& rho_t0_v, const PictureFamily& v, const Propagator& u);

// Same, building U(t, t0) at step bound cfg.max_step.
ComplexMatrix v_picture_solution(const ComplexMatrix& rho_t0_v, const PictureFamily& v, const HamiltonianFamily& h,
                                 double t, double t0, const PhysicsConfig& cfg);

struct PictureInstance {
    DensityState rho0;       // Schrodinger density at u.t_from
    ComplexMatrix observable;  // Schrodinger observable at u.t_to
    Propagator u;
    PictureFamily picture;
    FrameField frames;
    Path path;
};

struct PictureMeans {
    double schrodinger_operator = 0.0;
    double schrodinger_bundle = 0.0;
    double heisenberg_operator = 0.0;
    double heisenberg_bundle = 0.0;
    double v_operator = 0.0;
    double v_bundle = 0.0;
    double heisenberg_chain_gap = 0.0;  // spread of the four Heisenberg/Schrodinger means
    double v_chain_gap = 0.0;           // spread of the four V/Schrodinger means

    double max_deviation() const noexcept { return std::max(heisenberg_chain_gap, v_chain_gap); }
};

PictureMeans picture_mean_invariance(const PictureInstance& instance);

}  // namespace bqm
