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

#include "bqm/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include "bqm/errors.hpp"
#include "bqm/random.hpp"
#include "detail/time_util.hpp"

namespace bqm {

Path Path::line(std::string id, Interval domain) {
    Path p;
    p.id = id;
    p.domain = domain;
    p.point_of = [id](double t) { return BasePointLabel{id, {t, 0.0}}; };
    return p;
}

BasePointLabel Path::at(double t) const {
    if (!domain.contains(t)) {
        throw ContractError("path '" + id + "': t=" + std::to_string(t) + " outside its domain");
    }
    return point_of(t);
}

// ---------------------------------------------------------------------------
// FrameField

FrameField::FrameField(Index dim, Keying keying, PathTimeEvaluator by_path, PointEvaluator by_point, Tolerance tol)
    : dim_(dim),
      keying_(keying),
      by_path_(std::make_shared<const PathTimeEvaluator>(std::move(by_path))),
      by_point_(std::make_shared<const PointEvaluator>(std::move(by_point))),
      tol_(tol) {
    if (dim < 1 || dim > kMaxDim) {
        throw ShapeError("FrameField: dimension outside [1, 64]");
    }
}

FrameField FrameField::keyed_by_path(Index dim, PathTimeEvaluator evaluator, Tolerance tol) {
    return FrameField(dim, Keying::path_time, std::move(evaluator), nullptr, tol);
}

FrameField FrameField::keyed_by_point(Index dim, PointEvaluator evaluator, Tolerance tol) {
    return FrameField(dim, Keying::base_point, nullptr, std::move(evaluator), tol);
}

ComplexMatrix FrameField::operator()(const Path& path, double t) const {
    if (!path.contains(t)) {
        throw ContractError("frame requested at t=" + std::to_string(t) + " outside path '" + path.id + "'");
    }
    ComplexMatrix l = keying_ == Keying::path_time ? (*by_path_)(path, t) : (*by_point_)(path.at(t));
    require_valid(l, "frame");
    if (l.rows() != dim_) {
        throw ShapeError("frame: evaluator returned wrong dimension");
    }
    if (!is_unitary(l, tol_)) {
        throw ContractError("frame at t=" + std::to_string(t) + " on path '" + path.id + "' is not unitary");
    }
    return l;
}

FrameField FrameField::identity(Index dim) {
    return keyed_by_path(dim, [dim](const Path&, double) { return bqm::identity(dim); });
}

FrameField FrameField::identity_points(Index dim) {
    return keyed_by_point(dim, [dim](const BasePointLabel&) { return bqm::identity(dim); });
}

namespace {

// Seeded (W, K0, K1) per key, memoized; values depend only on (seed, key).
class FrameSeedCache {
   public:
    struct Entry {
        ComplexMatrix w;
        ComplexMatrix k0;
        ComplexMatrix k1;
    };

    FrameSeedCache(Index dim, std::uint64_t seed, double drift) : dim_(dim), seed_(seed), drift_(drift) {}

    Entry get(const std::string& key) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end()) {
            return it->second;
        }
        Rng rng(derive_seed(seed_, hash_label(key)));
        Entry e;
        e.w = random_unitary(rng, dim_);
        e.k0 = random_hermitian(rng, dim_, drift_);
        e.k1 = random_hermitian(rng, dim_, drift_);
        return entries_.emplace(key, std::move(e)).first->second;
    }

   private:
    Index dim_;
    std::uint64_t seed_;
    double drift_;
    std::mutex mutex_;
    std::unordered_map<std::string, Entry> entries_;
};

}  // namespace

FrameField FrameField::random_unitary(Index dim, std::uint64_t seed, double drift) {
    auto cache = std::make_shared<FrameSeedCache>(dim, seed, drift);
    return keyed_by_path(dim, [cache](const Path& path, double t) -> ComplexMatrix {
        const auto e = cache->get(path.id);
        return e.w * matrix_exponential(Complex(0.0, -t) * e.k0);
    });
}

FrameField FrameField::random_unitary_points(Index dim, std::uint64_t seed, double drift) {
    auto cache = std::make_shared<FrameSeedCache>(dim, seed, drift);
    return keyed_by_point(dim, [cache](const BasePointLabel& x) -> ComplexMatrix {
        const auto e = cache->get(x.name);
        return e.w * matrix_exponential(Complex(0.0, -1.0) * (x.coords[0] * e.k0 + x.coords[1] * e.k1));
    });
}

FrameField FrameField::co_moving(EvolutionTable table) {
    const Index dim = table.dim();
    return keyed_by_path(dim, [table = std::move(table)](const Path&, double t) { return table(t); });
}

FrameField FrameField::diagonal_phase(RealVector phases, double rate) {
    const Index dim = phases.size();
    return keyed_by_path(dim, [phases = std::move(phases), rate](const Path&, double t) -> ComplexMatrix {
        ComplexVector d(phases.size());
        for (Index k = 0; k < phases.size(); ++k) {
            d(k) = std::polar(1.0, rate * t * phases(k));
        }
        return d.asDiagonal();
    });
}

// ---------------------------------------------------------------------------
// Transports and morphisms

namespace {

void require_on_path(const Path& path, double t, const char* what) {
    if (!path.contains(t)) {
        throw ContractError(std::string(what) + ": t=" + std::to_string(t) + " outside path '" + path.id + "'");
    }
}

bool feasible(const HamiltonianFamily& h, const Path& path, double t) {
    return h.domain().contains(t) && path.contains(t);
}

// T(t + delta, t) via a short propagator.
ComplexMatrix short_transport(const HamiltonianFamily& h, const FrameField& frames, const Path& path, double t,
                              double delta, const ComplexMatrix& frame_t, const PhysicsConfig& cfg) {
    const Propagator u = propagate_between(h, t, t + delta, cfg);
    return frames(path, t + delta).adjoint() * u.u * frame_t;
}

}  // namespace

DensityMorphism make_density_morphism(MorphismValue value, const Tolerance& tol) {
    const DensityValidity v = validate_density(value.matrix, tol);
    if (!v.ok()) {
        throw ContractError("density morphism on path '" + value.path_id + "' violates density conditions " +
                            "(hermiticity residual " + std::to_string(v.hermiticity_residual) + ", min eigenvalue " +
                            std::to_string(v.min_eigenvalue) + ", trace deviation " +
                            std::to_string(v.trace_deviation) + ")");
    }
    DensityMorphism d;
    static_cast<MorphismValue&>(d) = std::move(value);
    return d;
}

EvolutionTransport evolution_transport(const HamiltonianFamily& h, const FrameField& frames, const Path& path,
                                       double t, double s, const PhysicsConfig& cfg) {
    require_on_path(path, t, "evolution_transport");
    require_on_path(path, s, "evolution_transport");
    if (t == s) {
        frames(path, t);  // still validates the frame
        return {path.id, s, t, identity(h.dim())};
    }
    const Propagator u = propagate_between(h, s, t, cfg);
    return transport_from_propagator(u, frames, path);
}

EvolutionTransport transport_from_propagator(const Propagator& u, const FrameField& frames, const Path& path) {
    require_valid(u.u, "transport_from_propagator");
    if (u.u.rows() != frames.dim()) {
        throw ShapeError("transport_from_propagator: frame and propagator dimensions differ");
    }
    const ComplexMatrix m = frames(path, u.t_to).adjoint() * u.u * frames(path, u.t_from);
    return {path.id, u.t_from, u.t_to, m};
}

MorphismValue lift_operator(const ComplexMatrix& a, const FrameField& frames, const Path& path, double t) {
    require_valid(a, "lift_operator");
    if (a.rows() != frames.dim()) {
        throw ShapeError("lift_operator: operator and frame dimensions differ");
    }
    const ComplexMatrix l = frames(path, t);
    return {path.id, t, l.adjoint() * a * l};
}

ComplexMatrix lower_morphism(const MorphismValue& m, const FrameField& frames, const Path& path) {
    if (m.path_id != path.id) {
        throw ContractError("lower_morphism: morphism belongs to path '" + m.path_id + "', not '" + path.id + "'");
    }
    const ComplexMatrix l = frames(path, m.time);
    return l * m.matrix * l.adjoint();
}

DensityMorphism density_morphism(const DensityState& rho, const FrameField& frames, const Path& path,
                                 const Tolerance& tol) {
    return make_density_morphism(lift_operator(rho.rho, frames, path, rho.time), tol);
}

DensityMorphism density_morphism_from_ensemble(const std::vector<WeightedSection>& sections, const Path& path,
                                               double t, const Tolerance& tol) {
    if (sections.empty()) {
        throw ContractError("density_morphism_from_ensemble: no sections");
    }
    if (!path.contains(t)) {
        throw ContractError("density_morphism_from_ensemble: t outside the path domain");
    }
    double weight_sum = 0.0;
    ComplexMatrix rho;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const auto& ws = sections[i];
        if (!(ws.weight >= 0.0 && ws.weight <= 1.0)) {
            throw ContractError("section " + std::to_string(i) + ": weight outside [0, 1]");
        }
        if (ws.section.path.id != path.id) {
            throw ContractError("section " + std::to_string(i) + " lies on path '" + ws.section.path.id + "'");
        }
        const ComplexVector psi = ws.section.value_of(t);
        if (i == 0) {
            rho = ComplexMatrix::Zero(psi.size(), psi.size());
        } else if (psi.size() != rho.rows()) {
            throw ShapeError("section " + std::to_string(i) + ": dimension mismatch");
        }
        rho += density_matrix(psi, ws.weight);
        weight_sum += ws.weight;
    }
    if (std::abs(weight_sum - 1.0) > tol.bound(1.0)) {
        throw ContractError("section weights sum to " + std::to_string(weight_sum) + ", expected 1");
    }
    return make_density_morphism({path.id, t, rho}, tol);
}

double bundle_expectation(const DensityMorphism& rho, const MorphismValue& a) {
    if (rho.path_id != a.path_id) {
        throw ContractError("bundle_expectation: density and observable live on different paths");
    }
    if (!detail::same_time(rho.time, a.time)) {
        throw ContractError("bundle_expectation: density and observable are at different times");
    }
    return trace_of_product(rho.matrix, a.matrix).real();
}

TransportCoefficients transport_coefficients(const HamiltonianFamily& h, const FrameField& frames,
                                             const Path& path, double t, double fd_step,
                                             const PhysicsConfig& cfg) {
    if (!(fd_step > 0.0)) {
        throw ContractError("transport_coefficients: fd_step must be positive");
    }
    if (!feasible(h, path, t - fd_step) || !feasible(h, path, t + fd_step)) {
        throw ContractError("transport_coefficients: t=" + std::to_string(t) +
                            " is within fd_step of a domain boundary");
    }
    const ComplexMatrix l = frames(path, t);
    const ComplexMatrix forward = short_transport(h, frames, path, t, fd_step, l, cfg);
    const ComplexMatrix backward = short_transport(h, frames, path, t, -fd_step, l, cfg);
    return {path.id, t, -(forward - backward) / (2.0 * fd_step)};
}

MatrixFunction gamma_source(const HamiltonianFamily& h, const FrameField& frames, const Path& path,
                            const PhysicsConfig& cfg) {
    return [h, frames, path, cfg](double t) -> ComplexMatrix {
        const double d = cfg.fd_step;
        if (feasible(h, path, t - d) && feasible(h, path, t + d)) {
            return transport_coefficients(h, frames, path, t, d, cfg).gamma;
        }
        const ComplexMatrix l = frames(path, t);
        const ComplexMatrix id = identity(h.dim());
        if (feasible(h, path, t + 2.0 * d)) {
            const ComplexMatrix t1 = short_transport(h, frames, path, t, d, l, cfg);
            const ComplexMatrix t2 = short_transport(h, frames, path, t, 2.0 * d, l, cfg);
            return -(-3.0 * id + 4.0 * t1 - t2) / (2.0 * d);
        }
        if (feasible(h, path, t - 2.0 * d)) {
            const ComplexMatrix t1 = short_transport(h, frames, path, t, -d, l, cfg);
            const ComplexMatrix t2 = short_transport(h, frames, path, t, -2.0 * d, l, cfg);
            return -(3.0 * id - 4.0 * t1 + t2) / (2.0 * d);
        }
        throw ContractError("gamma_source: domain around t=" + std::to_string(t) + " is shorter than 2 fd_step");
    };
}

ComplexMatrix morphism_derivation(const MatrixFunction& c, const MatrixFunction& gamma, double t, double fd_step) {
    if (!(fd_step > 0.0)) {
        throw ContractError("morphism_derivation: fd_step must be positive");
    }
    const ComplexMatrix derivative = (c(t + fd_step) - c(t - fd_step)) / (2.0 * fd_step);
    return derivative + commutator(gamma(t), c(t));
}

DensityMorphism propagate_density_morphism(const DensityMorphism& rho0, const EvolutionTransport& transport,
                                           const Tolerance& tol) {
    if (rho0.path_id != transport.path_id) {
        throw ContractError("propagate_density_morphism: density and transport live on different paths");
    }
    if (!detail::same_time(rho0.time, transport.t_from)) {
        throw ContractError("propagate_density_morphism: density time " + std::to_string(rho0.time) +
                            " differs from transport start " + std::to_string(transport.t_from));
    }
    require_same_dim(rho0.matrix, transport.matrix, "propagate_density_morphism");
    if (!is_unitary(transport.matrix, tol)) {
        throw ContractError("propagate_density_morphism: transport is not unitary");
    }
    DensityMorphism out;
    out.path_id = rho0.path_id;
    out.time = transport.t_to;
    out.matrix = transport.matrix * rho0.matrix * transport.matrix.adjoint();
    return out;
}

std::vector<DensityMorphism> integrate_bundle_liouville(const DensityMorphism& rho0, const HamiltonianFamily& h,
                                                        const FrameField& frames, const Path& path,
                                                        const TimeGrid& grid, const PhysicsConfig& cfg) {
    cfg.validate();
    if (rho0.path_id != path.id) {
        throw ContractError("integrate_bundle_liouville: initial density lives on another path");
    }
    if (!detail::same_time(rho0.time, grid.t0())) {
        throw ContractError("integrate_bundle_liouville: initial density is not at grid.t0");
    }
    require_valid(rho0.matrix, "integrate_bundle_liouville");
    for (double t : {grid.t0(), grid.t1()}) {
        if (!feasible(h, path, t)) {
            throw ContractError("integrate_bundle_liouville: grid leaves the path or Hamiltonian domain");
        }
    }

    const MatrixFunction gamma = gamma_source(h, frames, path, cfg);
    const auto rhs = [](const ComplexMatrix& g, const ComplexMatrix& p) -> ComplexMatrix { return p * g - g * p; };

    std::vector<DensityMorphism> out;
    out.reserve(static_cast<std::size_t>(grid.steps()) + 1);
    out.push_back(rho0);
    ComplexMatrix p = rho0.matrix;
    for (int k = 0; k < grid.steps(); ++k) {
        const double t = grid.at(k);
        const double t_next = grid.at(k + 1);
        const double dt = t_next - t;
        if (grid.t1() > grid.t0() && !(t_next > t)) {
            throw NumericError("integrate_bundle_liouville: step underflow at t=" + std::to_string(t));
        }
        const ComplexMatrix g0 = gamma(t);
        const ComplexMatrix gm = gamma(t + 0.5 * dt);
        const ComplexMatrix g1 = gamma(t_next);
        const ComplexMatrix k1 = rhs(g0, p);
        const ComplexMatrix k2 = rhs(gm, p + (0.5 * dt) * k1);
        const ComplexMatrix k3 = rhs(gm, p + (0.5 * dt) * k2);
        const ComplexMatrix k4 = rhs(g1, p + dt * k3);
        p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!p.allFinite()) {
            throw NumericError("integrate_bundle_liouville: non-finite state at t=" + std::to_string(t_next));
        }
        DensityMorphism next;
        next.path_id = path.id;
        next.time = t_next;
        next.matrix = p;
        out.push_back(std::move(next));
    }
    return out;
}

TransportSystemReport check_transport_section_system(const StateSection& psi, const MatrixFunction& rho,
                                                     const MatrixFunction& gamma, const TimeGrid& grid,
                                                     double fd_step, double threshold) {
    std::vector<double> times;
    for (int k = 1; k < grid.steps(); ++k) {
        times.push_back(grid.at(k));
    }
    if (times.empty()) {
        times.push_back(0.5 * (grid.t0() + grid.t1()));
    }

    TransportSystemReport r;
    const double inv = 1.0 / (2.0 * fd_step);
    for (double t : times) {
        const ComplexVector v = psi.value_of(t);
        const ComplexVector dv = (psi.value_of(t + fd_step) - psi.value_of(t - fd_step)) * inv;
        const ComplexMatrix p = rho(t);
        const ComplexMatrix dp = (rho(t + fd_step) - rho(t - fd_step)) * inv;
        const ComplexMatrix g = gamma(t);

        const ComplexVector dpv =
            (rho(t + fd_step) * psi.value_of(t + fd_step) - rho(t - fd_step) * psi.value_of(t - fd_step)) * inv;

        r.section_residual = std::max(r.section_residual, (dv + g * v).norm());
        r.product_residual = std::max(r.product_residual, (dpv + g * (p * v)).norm());
        r.density_residual = std::max(r.density_residual, (dp + g * p - p * g).norm());
    }
    r.section_transported = r.section_residual <= threshold;
    r.product_transported = r.product_residual <= threshold;
    r.density_equation = r.density_residual <= threshold;
    return r;
}

}  // namespace bqm
