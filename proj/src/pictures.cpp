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

#include "bqm/pictures.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "bqm/errors.hpp"
#include "detail/time_util.hpp"

namespace bqm {

PictureFamily::PictureFamily(Index dim, double anchor, Evaluator evaluator, Tolerance tol, Interval domain)
    : dim_(dim),
      anchor_(anchor),
      domain_(domain),
      evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))),
      tol_(tol) {
    if (dim < 1 || dim > kMaxDim) {
        throw ShapeError("PictureFamily: dimension outside [1, 64]");
    }
    if (!domain_.contains(anchor)) {
        throw ContractError("PictureFamily: anchor outside the domain");
    }
    if (!approx_equal((*this)(anchor), bqm::identity(dim), tol_)) {
        throw ContractError("PictureFamily: V(t1, t1) must be the identity");
    }
}

ComplexMatrix PictureFamily::operator()(double t) const {
    if (!domain_.contains(t)) {
        throw ContractError("picture family: t=" + std::to_string(t) + " outside the domain");
    }
    ComplexMatrix v = (*evaluator_)(t);
    require_valid(v, "picture family");
    if (v.rows() != dim_) {
        throw ShapeError("picture family: evaluator returned wrong dimension");
    }
    if (!is_unitary(v, tol_)) {
        throw ContractError("picture family: V(t1, t) is not unitary at t=" + std::to_string(t));
    }
    return v;
}

PictureFamily PictureFamily::identity(Index dim, double anchor) {
    return PictureFamily(dim, anchor, [dim](double) { return bqm::identity(dim); });
}

PictureFamily PictureFamily::evolution(EvolutionTable table) {
    const Index dim = table.dim();
    const double anchor = table.reference_time();
    const Interval domain = table.range();
    return PictureFamily(
        dim, anchor, [table = std::move(table)](double t) -> ComplexMatrix { return table(t).adjoint(); }, {},
        domain);
}

PictureFamily PictureFamily::diagonal_phase(double anchor, RealVector phases, double omega) {
    const Index dim = phases.size();
    return PictureFamily(dim, anchor, [phases = std::move(phases), omega, anchor](double t) -> ComplexMatrix {
        ComplexVector d(phases.size());
        for (Index k = 0; k < phases.size(); ++k) {
            d(k) = std::polar(1.0, -omega * (t - anchor) * phases(k));
        }
        return d.asDiagonal();
    });
}

ComplexMatrix to_heisenberg_operator(const ComplexMatrix& a, const Propagator& u) {
    require_valid(a, "to_heisenberg_operator");
    require_same_dim(a, u.u, "to_heisenberg_operator");
    return u.u.adjoint() * a * u.u;
}

MorphismValue to_heisenberg_morphism(const MorphismValue& a, const EvolutionTransport& transport) {
    if (a.path_id != transport.path_id) {
        throw ContractError("to_heisenberg_morphism: morphism and transport live on different paths");
    }
    if (!detail::same_time(a.time, transport.t_to)) {
        throw ContractError("to_heisenberg_morphism: morphism time differs from transport end");
    }
    require_same_dim(a.matrix, transport.matrix, "to_heisenberg_morphism");
    return {a.path_id, transport.t_from, transport.matrix.adjoint() * a.matrix * transport.matrix};
}

namespace {

template <typename State, typename Map>
ConstancyReport constancy(const std::vector<State>& trajectory, const std::vector<Map>& maps,
                          const ComplexMatrix& (*density)(const State&), const ComplexMatrix& (*matrix)(const Map&),
                          double (*time)(const State&)) {
    if (trajectory.size() != maps.size()) {
        throw ShapeError("heisenberg_density: trajectory and propagators differ in length");
    }
    ConstancyReport r;
    if (trajectory.empty()) {
        return r;
    }
    const ComplexMatrix& first = density(trajectory.front());
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const ComplexMatrix& u = matrix(maps[k]);
        const double dev = (u.adjoint() * density(trajectory[k]) * u - first).norm();
        if (dev > r.max_deviation) {
            r.max_deviation = dev;
            r.worst_time = time(trajectory[k]);
        }
    }
    return r;
}

}  // namespace

ConstancyReport heisenberg_density(const std::vector<DensityState>& trajectory,
                                   const std::vector<Propagator>& propagators) {
    return constancy<DensityState, Propagator>(
        trajectory, propagators, [](const DensityState& s) -> const ComplexMatrix& { return s.rho; },
        [](const Propagator& p) -> const ComplexMatrix& { return p.u; },
        [](const DensityState& s) { return s.time; });
}

ConstancyReport heisenberg_density(const std::vector<DensityMorphism>& trajectory,
                                   const std::vector<EvolutionTransport>& transports) {
    return constancy<DensityMorphism, EvolutionTransport>(
        trajectory, transports, [](const DensityMorphism& s) -> const ComplexMatrix& { return s.matrix; },
        [](const EvolutionTransport& t) -> const ComplexMatrix& { return t.matrix; },
        [](const DensityMorphism& s) { return s.time; });
}

double heisenberg_observable_rhs_check(const MatrixFunction& a_family, const HamiltonianFamily& h,
                                       const TimeGrid& grid, const PhysicsConfig& cfg) {
    const std::vector<Propagator> path = evolution_path(h, grid, cfg);
    const double d = cfg.fd_step;
    const Complex ihbar(0.0, cfg.hbar);

    const auto residual_at = [&](double t, const ComplexMatrix& u0) {
        const ComplexMatrix up = propagate_between(h, t, t + d, cfg).u * u0;
        const ComplexMatrix um = propagate_between(h, t, t - d, cfg).u * u0;
        const ComplexMatrix a = a_family(t);
        const ComplexMatrix a_dot = (a_family(t + d) - a_family(t - d)) / (2.0 * d);
        const ComplexMatrix ah_dot = (up.adjoint() * a_family(t + d) * up - um.adjoint() * a_family(t - d) * um) /
                                     (2.0 * d);
        const ComplexMatrix ah = u0.adjoint() * a * u0;
        const ComplexMatrix hh = u0.adjoint() * h(t) * u0;
        const ComplexMatrix lhs = ihbar * ah_dot;
        const ComplexMatrix rhs = commutator(ah, hh) + ihbar * (u0.adjoint() * a_dot * u0);
        return (lhs - rhs).norm();
    };

    double worst = 0.0;
    if (grid.steps() < 2) {
        const double tm = 0.5 * (grid.t0() + grid.t1());
        return residual_at(tm, propagate_between(h, grid.t0(), tm, cfg).u);
    }
    for (int k = 1; k < grid.steps(); ++k) {
        worst = std::max(worst, residual_at(grid.at(k), path[static_cast<std::size_t>(k)].u));
    }
    return worst;
}

ComplexMatrix v_transform_operator(const ComplexMatrix& a, const PictureFamily& v, double t) {
    require_valid(a, "v_transform_operator");
    const ComplexMatrix vt = v(t);
    require_same_dim(a, vt, "v_transform_operator");
    return vt * a * vt.adjoint();
}

MorphismValue v_transform_morphism(const MorphismValue& m, const PictureFamily& v, const FrameField& frames,
                                   const Path& path) {
    if (m.path_id != path.id) {
        throw ContractError("v_transform_morphism: morphism lives on path '" + m.path_id + "'");
    }
    const double t1 = v.anchor();
    const ComplexMatrix vg = frames(path, t1).adjoint() * v(m.time) * frames(path, m.time);
    return {path.id, t1, vg * m.matrix * vg.adjoint()};
}

PictureGenerator v_picture_generator(const PictureFamily& v, const HamiltonianFamily& h, double t, double fd_step,
                                     const PhysicsConfig& cfg) {
    if (!(fd_step > 0.0)) {
        throw ContractError("v_picture_generator: fd_step must be positive");
    }
    const ComplexMatrix vt = v(t);
    const Interval& dom = v.domain();
    const double d = fd_step;
    ComplexMatrix v_dot;
    if (dom.contains(t - d) && dom.contains(t + d)) {
        v_dot = (v(t + d) - v(t - d)) / (2.0 * d);
    } else if (dom.contains(t + 2.0 * d)) {
        v_dot = (-3.0 * vt + 4.0 * v(t + d) - v(t + 2.0 * d)) / (2.0 * d);
    } else if (dom.contains(t - 2.0 * d)) {
        v_dot = (3.0 * vt - 4.0 * v(t - d) + v(t - 2.0 * d)) / (2.0 * d);
    } else {
        throw ContractError("v_picture_generator: picture domain around t=" + std::to_string(t) +
                            " is shorter than 2 fd_step");
    }
    const ComplexMatrix ht = h(t);
    require_same_dim(vt, ht, "v_picture_generator");
    const ComplexMatrix gen = vt * ht * vt.adjoint() + Complex(0.0, cfg.hbar) * (v_dot * vt.adjoint());
    return {gen, t, v.anchor()};
}

std::vector<DensityState> integrate_v_picture_density(const DensityState& rho0_v, const PictureFamily& v,
                                                      const HamiltonianFamily& h, const TimeGrid& grid,
                                                      const PhysicsConfig& cfg) {
    cfg.validate();
    require_valid(rho0_v.rho, "integrate_v_picture_density");
    if (!detail::same_time(rho0_v.time, grid.t0())) {
        throw ContractError("integrate_v_picture_density: initial density is not at grid.t0");
    }
    const Complex coeff(0.0, -1.0 / cfg.hbar);
    const auto gen = [&](double t) { return v_picture_generator(v, h, t, cfg.fd_step, cfg).matrix; };
    const auto rhs = [&](const ComplexMatrix& g, const ComplexMatrix& r) -> ComplexMatrix {
        return coeff * (g * r - r * g);
    };

    std::vector<DensityState> out;
    out.reserve(static_cast<std::size_t>(grid.steps()) + 1);
    out.push_back(rho0_v);
    ComplexMatrix r = rho0_v.rho;
    for (int k = 0; k < grid.steps(); ++k) {
        const double t = grid.at(k);
        const double t_next = grid.at(k + 1);
        const double dt = t_next - t;
        if (grid.t1() > grid.t0() && !(t_next > t)) {
            throw NumericError("integrate_v_picture_density: step underflow at t=" + std::to_string(t));
        }
        const ComplexMatrix g0 = gen(t);
        const ComplexMatrix gm = gen(t + 0.5 * dt);
        const ComplexMatrix g1 = gen(t_next);
        const ComplexMatrix k1 = rhs(g0, r);
        const ComplexMatrix k2 = rhs(gm, r + (0.5 * dt) * k1);
        const ComplexMatrix k3 = rhs(gm, r + (0.5 * dt) * k2);
        const ComplexMatrix k4 = rhs(g1, r + dt * k3);
        r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!r.allFinite()) {
            throw NumericError("integrate_v_picture_density: non-finite state at t=" + std::to_string(t_next));
        }
        out.push_back({r, t_next});
    }
    return out;
}

ComplexMatrix v_picture_solution(const ComplexMatrix& rho_t0_v, const PictureFamily& v, const Propagator& u) {
    require_valid(rho_t0_v, "v_picture_solution");
    require_same_dim(rho_t0_v, u.u, "v_picture_solution");
    const ComplexMatrix uv = v(u.t_to) * u.u * v(u.t_from).adjoint();
    return uv * rho_t0_v * uv.adjoint();
}

ComplexMatrix v_picture_solution(const ComplexMatrix& rho_t0_v, const PictureFamily& v, const HamiltonianFamily& h,
                                 double t, double t0, const PhysicsConfig& cfg) {
    return v_picture_solution(rho_t0_v, v, propagate_between(h, t0, t, cfg));
}

namespace {

double spread(std::initializer_list<double> values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi - *lo;
}

}  // namespace

PictureMeans picture_mean_invariance(const PictureInstance& in) {
    const Propagator& u = in.u;
    const double t = u.t_to;
    const double t0 = u.t_from;
    if (!detail::same_time(in.rho0.time, t0)) {
        throw ContractError("picture_mean_invariance: density time differs from propagator start");
    }
    const ComplexMatrix& a = in.observable;
    const ComplexMatrix rho_t = u.u * in.rho0.rho * u.u.adjoint();

    PictureMeans m;
    m.schrodinger_operator = trace_of_product(rho_t, a).real();

    const MorphismValue a_lift = lift_operator(a, in.frames, in.path, t);
    const MorphismValue rho_lift = lift_operator(rho_t, in.frames, in.path, t);
    m.schrodinger_bundle = trace_of_product(rho_lift.matrix, a_lift.matrix).real();

    m.heisenberg_operator = trace_of_product(in.rho0.rho, to_heisenberg_operator(a, u)).real();

    const EvolutionTransport transport = transport_from_propagator(u, in.frames, in.path);
    const MorphismValue rho0_lift = lift_operator(in.rho0.rho, in.frames, in.path, t0);
    m.heisenberg_bundle =
        trace_of_product(rho0_lift.matrix, to_heisenberg_morphism(a_lift, transport).matrix).real();

    m.v_operator = trace_of_product(v_transform_operator(rho_t, in.picture, t),
                                    v_transform_operator(a, in.picture, t))
                       .real();
    m.v_bundle = trace_of_product(v_transform_morphism(rho_lift, in.picture, in.frames, in.path).matrix,
                                  v_transform_morphism(a_lift, in.picture, in.frames, in.path).matrix)
                     .real();

    m.heisenberg_chain_gap =
        spread({m.heisenberg_bundle, m.heisenberg_operator, m.schrodinger_bundle, m.schrodinger_operator});
    m.v_chain_gap = spread({m.v_bundle, m.v_operator, m.schrodinger_bundle, m.schrodinger_operator});
    return m;
}

}  // namespace bqm
