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

#include "bqm/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "bqm/errors.hpp"
#include "detail/time_util.hpp"

namespace bqm {

bool Interval::contains(double t) const {
    const double slack = detail::time_slack(t);
    return t >= lo - slack && t <= hi + slack;
}

bool Interval::is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }

void PhysicsConfig::validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
        throw ContractError("hbar must be positive and finite");
    }
    if (reunitarize_every < 1) {
        throw ContractError("reunitarize_every must be >= 1");
    }
    if (!(max_step > 0.0) || !(fd_step > 0.0)) {
        throw ContractError("max_step and fd_step must be positive");
    }
}

// ---------------------------------------------------------------------------
// HamiltonianFamily

HamiltonianFamily::HamiltonianFamily(Index dim, Interval domain, Evaluator evaluator, Tolerance tol)
    : dim_(dim), domain_(domain), evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))), tol_(tol) {
    if (dim < 1 || dim > kMaxDim) {
        throw ShapeError("HamiltonianFamily: dimension " + std::to_string(dim) + " outside [1, 64]");
    }
    if (!(domain.lo <= domain.hi)) {
        throw ContractError("HamiltonianFamily: empty domain");
    }
    if (!*evaluator_) {
        throw ContractError("HamiltonianFamily: missing evaluator");
    }
}

ComplexMatrix HamiltonianFamily::operator()(double t) const {
    if (!domain_.contains(t)) {
        throw ContractError("Hamiltonian evaluated at t=" + std::to_string(t) + " outside its domain [" +
                            std::to_string(domain_.lo) + ", " + std::to_string(domain_.hi) + "]");
    }
    ComplexMatrix h = (*evaluator_)(t);
    require_valid(h, "Hamiltonian");
    if (h.rows() != dim_) {
        throw ShapeError("Hamiltonian: evaluator returned dimension " + std::to_string(h.rows()) + ", expected " +
                         std::to_string(dim_));
    }
    if (!is_hermitian(h, tol_)) {
        throw ContractError("Hamiltonian at t=" + std::to_string(t) + " is not Hermitian");
    }
    return h;
}

HamiltonianFamily HamiltonianFamily::constant(const ComplexMatrix& h, Interval domain) {
    require_valid(h, "constant Hamiltonian");
    return HamiltonianFamily(h.rows(), domain, [h](double) { return h; });
}

HamiltonianFamily HamiltonianFamily::zero(Index dim) {
    return HamiltonianFamily(dim, Interval::whole_line(), [dim](double) { return ComplexMatrix::Zero(dim, dim); });
}

HamiltonianFamily HamiltonianFamily::modulated(const ComplexMatrix& h, std::function<double(double)> f,
                                               Interval domain) {
    require_valid(h, "modulated Hamiltonian");
    return HamiltonianFamily(h.rows(), domain, [h, f = std::move(f)](double t) -> ComplexMatrix { return f(t) * h; });
}

HamiltonianFamily HamiltonianFamily::harmonic_drive(const ComplexMatrix& h0, const ComplexMatrix& h1, double omega,
                                                    double phase) {
    require_valid(h0, "drive h0");
    require_same_dim(h0, h1, "harmonic drive");
    return HamiltonianFamily(h0.rows(), Interval::whole_line(), [h0, h1, omega, phase](double t) -> ComplexMatrix {
        return h0 + std::cos(omega * t + phase) * h1;
    });
}

HamiltonianFamily HamiltonianFamily::piecewise_constant(std::vector<double> breaks,
                                                        std::vector<ComplexMatrix> matrices) {
    if (matrices.size() != breaks.size() + 1) {
        throw ContractError("piecewise_constant: need one more matrix than breakpoints");
    }
    if (!std::is_sorted(breaks.begin(), breaks.end())) {
        throw ContractError("piecewise_constant: breakpoints must be ascending");
    }
    for (const auto& m : matrices) {
        require_valid(m, "piecewise segment");
        require_same_dim(m, matrices.front(), "piecewise segment");
    }
    const Index dim = matrices.front().rows();
    return HamiltonianFamily(dim, Interval::whole_line(),
                             [breaks = std::move(breaks), matrices = std::move(matrices)](double t) {
                                 const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
                                 return matrices[static_cast<std::size_t>(it - breaks.begin())];
                             });
}

HamiltonianFamily HamiltonianFamily::table(std::vector<double> times, std::vector<ComplexMatrix> matrices) {
    if (times.size() < 2 || times.size() != matrices.size()) {
        throw ContractError("table: need at least two samples and one matrix per time");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw ContractError("table: sample times must be strictly ascending");
        }
    }
    for (const auto& m : matrices) {
        require_valid(m, "table sample");
        require_same_dim(m, matrices.front(), "table sample");
    }
    const Index dim = matrices.front().rows();
    const Interval domain{times.front(), times.back()};
    return HamiltonianFamily(dim, domain, [times = std::move(times), matrices = std::move(matrices)](double t) {
        const double tc = std::clamp(t, times.front(), times.back());
        auto it = std::upper_bound(times.begin(), times.end(), tc);
        std::size_t hi = std::min(static_cast<std::size_t>(it - times.begin()), times.size() - 1);
        std::size_t lo = hi - 1;
        const double w = (tc - times[lo]) / (times[hi] - times[lo]);
        return ComplexMatrix((1.0 - w) * matrices[lo] + w * matrices[hi]);
    });
}

// ---------------------------------------------------------------------------
// Grids and densities

TimeGrid::TimeGrid(double t0, double t1, int steps) : t0_(t0), t1_(t1), steps_(steps) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || !(t0 <= t1)) {
        throw ContractError("TimeGrid: need finite t0 <= t1");
    }
    if (steps < 1) {
        throw ContractError("TimeGrid: steps must be >= 1");
    }
}

ComplexMatrix density_matrix(const ComplexVector& psi, double weight) {
    const double norm2 = psi.squaredNorm();
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw ContractError("state vector has zero or non-finite norm");
    }
    return (weight / norm2) * (psi * psi.adjoint());
}

DensityState density_from_ensemble(const Ensemble& ensemble, double time, const Tolerance& tol) {
    if (ensemble.members.empty()) {
        throw ContractError("ensemble is empty");
    }
    const Index dim = ensemble.members.front().vector.size();
    if (dim < 1 || dim > kMaxDim) {
        throw ShapeError("ensemble: dimension outside [1, 64]");
    }
    double weight_sum = 0.0;
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
        const auto& m = ensemble.members[i];
        if (!(m.weight >= 0.0 && m.weight <= 1.0)) {
            throw ContractError("ensemble member " + std::to_string(i) + ": weight outside [0, 1]");
        }
        if (m.vector.size() != dim) {
            throw ShapeError("ensemble member " + std::to_string(i) + ": dimension mismatch");
        }
        if (!(m.vector.squaredNorm() > 0.0)) {
            throw ContractError("ensemble member " + std::to_string(i) + ": zero-norm state vector");
        }
        weight_sum += m.weight;
        rho += density_matrix(m.vector, m.weight);
    }
    if (std::abs(weight_sum - 1.0) > tol.bound(1.0)) {
        throw ContractError("ensemble weights sum to " + std::to_string(weight_sum) + ", expected 1");
    }
    return {rho, time};
}

DensityValidity validate_density(const ComplexMatrix& rho, const Tolerance& tol) {
    DensityValidity v;
    if (rho.rows() != rho.cols() || rho.rows() == 0 || !rho.allFinite()) {
        v.hermiticity_residual = std::numeric_limits<double>::infinity();
        v.min_eigenvalue = -std::numeric_limits<double>::infinity();
        v.trace_deviation = std::numeric_limits<double>::infinity();
        return v;
    }
    v.hermiticity_residual = hermiticity_residual(rho);
    v.hermitian = v.hermiticity_residual <= tol.bound(rho.norm());
    v.min_eigenvalue = min_eigenvalue(rho);
    v.positive = v.min_eigenvalue >= -tol.abs();
    const Complex tr = trace(rho);
    v.trace_deviation = std::abs(tr - 1.0);
    v.unit_trace = v.trace_deviation <= tol.bound(std::abs(tr));
    return v;
}

Purity purity(const DensityState& state, const Tolerance& tol) {
    const ComplexMatrix sq = state.rho * state.rho;
    Purity p;
    p.value = trace(sq).real();
    p.is_pure = (sq - state.rho).norm() <= tol.bound(state.rho.norm());
    return p;
}

// ---------------------------------------------------------------------------
// Propagators

ComplexMatrix step_propagator(const HamiltonianFamily& h, double t_from, double t_to, const PhysicsConfig& cfg) {
    const double dt = t_to - t_from;
    const Complex factor(0.0, -dt / cfg.hbar);
    if (dt == 0.0) {
        return identity(h.dim());
    }
    switch (cfg.scheme) {
        case PropagatorScheme::midpoint:
            return matrix_exponential(factor * h(t_from + 0.5 * dt));
        case PropagatorScheme::magnus4: {
            constexpr double kC1 = 0.5 - 0.28867513459481288225;  // 1/2 - sqrt(3)/6
            constexpr double kC2 = 0.5 + 0.28867513459481288225;
            constexpr double kA1 = 0.25 + 0.28867513459481288225;  // 1/4 + sqrt(3)/6
            constexpr double kA2 = 0.25 - 0.28867513459481288225;
            const ComplexMatrix h1 = h(t_from + kC1 * dt);
            const ComplexMatrix h2 = h(t_from + kC2 * dt);
            const ComplexMatrix first = matrix_exponential(factor * (kA1 * h1 + kA2 * h2));
            const ComplexMatrix second = matrix_exponential(factor * (kA2 * h1 + kA1 * h2));
            return second * first;
        }
    }
    throw ContractError("unknown propagator scheme");
}

namespace {

void require_in_domain(const HamiltonianFamily& h, double t, const char* what) {
    if (!h.domain().contains(t)) {
        throw ContractError(std::string(what) + ": t=" + std::to_string(t) + " outside the Hamiltonian domain");
    }
}

}  // namespace

Propagator propagate_between(const HamiltonianFamily& h, double t_from, double t_to, int steps,
                             const PhysicsConfig& cfg) {
    cfg.validate();
    if (steps < 1) {
        throw ContractError("propagate_between: steps must be >= 1");
    }
    require_in_domain(h, t_from, "propagate_between");
    require_in_domain(h, t_to, "propagate_between");
    ComplexMatrix u = identity(h.dim());
    const double dt = (t_to - t_from) / steps;
    for (int k = 0; k < steps; ++k) {
        const double a = t_from + k * dt;
        const double b = (k + 1 == steps) ? t_to : t_from + (k + 1) * dt;
        u = step_propagator(h, a, b, cfg) * u;
        if ((k + 1) % cfg.reunitarize_every == 0) {
            u = polar_reunitarize(u, cfg.tol);
        }
    }
    return {u, t_from, t_to};
}

Propagator propagate_between(const HamiltonianFamily& h, double t_from, double t_to, const PhysicsConfig& cfg) {
    cfg.validate();
    const double span = std::abs(t_to - t_from);
    const int steps = std::max(1, static_cast<int>(std::ceil(span / cfg.max_step - 1e-9)));
    return propagate_between(h, t_from, t_to, steps, cfg);
}

std::vector<Propagator> evolution_path(const HamiltonianFamily& h, const TimeGrid& grid, const PhysicsConfig& cfg) {
    cfg.validate();
    require_in_domain(h, grid.t0(), "evolution_operator");
    require_in_domain(h, grid.t1(), "evolution_operator");
    std::vector<Propagator> path;
    path.reserve(static_cast<std::size_t>(grid.steps()) + 1);
    ComplexMatrix u = identity(h.dim());
    path.push_back({u, grid.t0(), grid.t0()});
    for (int k = 0; k < grid.steps(); ++k) {
        u = step_propagator(h, grid.at(k), grid.at(k + 1), cfg) * u;
        if ((k + 1) % cfg.reunitarize_every == 0) {
            u = polar_reunitarize(u, cfg.tol);
        }
        path.push_back({u, grid.t0(), grid.at(k + 1)});
    }
    return path;
}

Propagator evolution_operator(const HamiltonianFamily& h, const TimeGrid& grid, const PhysicsConfig& cfg) {
    return propagate_between(h, grid.t0(), grid.t1(), grid.steps(), cfg);
}

DensityState propagate_density(const DensityState& rho0, const Propagator& u, const Tolerance& tol) {
    require_valid(rho0.rho, "propagate_density");
    require_same_dim(rho0.rho, u.u, "propagate_density");
    if (!detail::same_time(rho0.time, u.t_from)) {
        throw ContractError("propagate_density: density time " + std::to_string(rho0.time) +
                            " differs from propagator start " + std::to_string(u.t_from));
    }
    if (!is_unitary(u.u, tol)) {
        throw ContractError("propagate_density: propagator is not unitary");
    }
    return {u.u * rho0.rho * u.u.adjoint(), u.t_to};
}

std::vector<DensityState> integrate_von_neumann(const DensityState& rho0, const HamiltonianFamily& h,
                                                const TimeGrid& grid, const PhysicsConfig& cfg) {
    cfg.validate();
    require_valid(rho0.rho, "integrate_von_neumann");
    if (rho0.rho.rows() != h.dim()) {
        throw ShapeError("integrate_von_neumann: density and Hamiltonian dimensions differ");
    }
    if (!detail::same_time(rho0.time, grid.t0())) {
        throw ContractError("integrate_von_neumann: initial density is not at grid.t0");
    }
    require_in_domain(h, grid.t0(), "integrate_von_neumann");
    require_in_domain(h, grid.t1(), "integrate_von_neumann");

    const Complex coeff(0.0, -1.0 / cfg.hbar);
    const auto rhs = [&](const ComplexMatrix& ham, const ComplexMatrix& r) -> ComplexMatrix {
        return coeff * (ham * r - r * ham);
    };

    std::vector<DensityState> out;
    out.reserve(static_cast<std::size_t>(grid.steps()) + 1);
    out.push_back(rho0);
    ComplexMatrix r = rho0.rho;
    for (int k = 0; k < grid.steps(); ++k) {
        const double t = grid.at(k);
        const double t_next = grid.at(k + 1);
        const double dt = t_next - t;
        if (grid.t1() > grid.t0() && !(t_next > t)) {
            throw NumericError("integrate_von_neumann: step underflow at t=" + std::to_string(t));
        }
        const ComplexMatrix h0 = h(t);
        const ComplexMatrix hm = h(t + 0.5 * dt);
        const ComplexMatrix h1 = h(t_next);
        const ComplexMatrix k1 = rhs(h0, r);
        const ComplexMatrix k2 = rhs(hm, r + (0.5 * dt) * k1);
        const ComplexMatrix k3 = rhs(hm, r + (0.5 * dt) * k2);
        const ComplexMatrix k4 = rhs(h1, r + dt * k3);
        r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!r.allFinite()) {
            throw NumericError("integrate_von_neumann: non-finite state at t=" + std::to_string(t_next));
        }
        out.push_back({r, t_next});
    }
    return out;
}

Expectation expectation(const DensityState& state, const ComplexMatrix& observable, const Tolerance& tol) {
    require_valid(observable, "expectation");
    require_same_dim(state.rho, observable, "expectation");
    if (!is_hermitian(observable, tol)) {
        throw ContractError("expectation: observable is not Hermitian");
    }
    const Complex value = trace_of_product(state.rho, observable);
    return {value.real(), std::abs(value.imag())};
}

// ---------------------------------------------------------------------------
// EvolutionTable

struct EvolutionTable::Data {
    HamiltonianFamily h;
    PhysicsConfig cfg;
    double t_ref;
    Interval range;
    double spacing;
    long kmin;
    long kmax;
    std::vector<ComplexMatrix> anchors;  // U(t_ref + k spacing, t_ref), k = kmin..kmax

    double anchor_time(long k) const { return t_ref + static_cast<double>(k) * spacing; }
};

EvolutionTable::EvolutionTable(HamiltonianFamily h, double t_ref, Interval range, PhysicsConfig cfg) {
    cfg.validate();
    if (!range.is_finite() || !(range.lo <= range.hi)) {
        throw ContractError("EvolutionTable: range must be a finite interval");
    }
    if (!range.contains(t_ref)) {
        throw ContractError("EvolutionTable: reference time outside range");
    }
    require_in_domain(h, range.lo, "EvolutionTable");
    require_in_domain(h, range.hi, "EvolutionTable");

    const double spacing = cfg.max_step;
    const long kmin = static_cast<long>(std::ceil((range.lo - t_ref) / spacing));
    const long kmax = static_cast<long>(std::floor((range.hi - t_ref) / spacing));
    if (kmax - kmin > 4'000'000) {
        throw ContractError("EvolutionTable: range too long for anchor spacing");
    }

    auto data = std::make_shared<Data>(Data{h, cfg, t_ref, range, spacing, std::min(kmin, 0L), std::max(kmax, 0L), {}});
    data->anchors.resize(static_cast<std::size_t>(data->kmax - data->kmin + 1));
    const auto slot = [&](long k) -> ComplexMatrix& { return data->anchors[static_cast<std::size_t>(k - data->kmin)]; };
    slot(0) = identity(h.dim());
    for (long k = 0; k < data->kmax; ++k) {
        ComplexMatrix u = step_propagator(h, data->anchor_time(k), data->anchor_time(k + 1), cfg) * slot(k);
        if ((k + 1) % cfg.reunitarize_every == 0) {
            u = polar_reunitarize(u, cfg.tol);
        }
        slot(k + 1) = std::move(u);
    }
    for (long k = 0; k > data->kmin; --k) {
        ComplexMatrix u = step_propagator(h, data->anchor_time(k), data->anchor_time(k - 1), cfg) * slot(k);
        if ((-k + 1) % cfg.reunitarize_every == 0) {
            u = polar_reunitarize(u, cfg.tol);
        }
        slot(k - 1) = std::move(u);
    }
    data_ = std::move(data);
}

ComplexMatrix EvolutionTable::operator()(double t) const {
    const Data& d = *data_;
    if (!d.range.contains(t)) {
        throw ContractError("EvolutionTable: t=" + std::to_string(t) + " outside tabulated range");
    }
    long k = std::lround((t - d.t_ref) / d.spacing);
    k = std::clamp(k, d.kmin, d.kmax);
    const ComplexMatrix& anchor = d.anchors[static_cast<std::size_t>(k - d.kmin)];
    return step_propagator(d.h, d.anchor_time(k), t, d.cfg) * anchor;
}

double EvolutionTable::reference_time() const noexcept { return data_->t_ref; }
const Interval& EvolutionTable::range() const noexcept { return data_->range; }
Index EvolutionTable::dim() const noexcept { return data_->h.dim(); }

}  // namespace bqm
