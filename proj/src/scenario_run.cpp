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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bqm/bundle.hpp"
#include "bqm/curvature.hpp"
#include "bqm/errors.hpp"
#include "bqm/pictures.hpp"
#include "bqm/scenario.hpp"

namespace bqm {

void InvariantReport::add(std::string name, double max_deviation, double threshold) {
    checks.push_back({std::move(name), max_deviation, threshold, max_deviation <= threshold});
}

void InvariantReport::merge(const std::string& name, double deviation, double threshold) {
    for (auto& c : checks) {
        if (c.name == name) {
            if (std::isnan(deviation) || deviation > c.max_deviation) {
                c.max_deviation = deviation;
            }
            c.threshold = threshold;
            c.pass = c.max_deviation <= c.threshold;
            return;
        }
    }
    add(name, deviation, threshold);
}

bool InvariantReport::overall() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

PhysicsConfig build_physics(const ScenarioConfig& cfg, const RunOptions& opts) {
    PhysicsConfig pc;
    pc.hbar = cfg.hbar;
    pc.tol = opts.contract_tol;
    pc.validate();
    return pc;
}

HamiltonianFamily build_hamiltonian(const ScenarioConfig& cfg, const RunOptions&) {
    const HamiltonianSpec& spec = cfg.hamiltonian;
    switch (spec.kind) {
        case HamiltonianKind::constant:
            return HamiltonianFamily::constant(spec.matrices.at(0));
        case HamiltonianKind::piecewise_constant:
            return HamiltonianFamily::piecewise_constant(spec.breaks, spec.matrices);
        case HamiltonianKind::harmonic_drive:
            return HamiltonianFamily::harmonic_drive(spec.matrices.at(0), spec.matrices.at(1), spec.omega, spec.phase);
        case HamiltonianKind::custom_table:
            return HamiltonianFamily::table(spec.times, spec.matrices);
    }
    throw ContractError("build_hamiltonian: unknown kind");
}

namespace {

Interval grid_range(const ScenarioConfig& cfg) { return {cfg.grid.t0, cfg.grid.t1}; }

// Grid range widened by a few derivative steps where the Hamiltonian allows it.
Interval table_range(const ScenarioConfig& cfg, const HamiltonianFamily& h, const PhysicsConfig& pc) {
    const double pad = 4.0 * pc.fd_step;
    return {std::max(cfg.grid.t0 - pad, h.domain().lo), std::min(cfg.grid.t1 + pad, h.domain().hi)};
}

FrameField build_frames(const ScenarioConfig& cfg, const HamiltonianFamily& h, const PhysicsConfig& pc) {
    const FrameSpec& spec = cfg.frames;
    switch (spec.kind) {
        case FrameKind::identity:
            return FrameField::identity(cfg.dim);
        case FrameKind::random_unitary:
            return FrameField::random_unitary(cfg.dim, spec.seed.value(), spec.drift);
        case FrameKind::co_moving:
            return FrameField::co_moving(EvolutionTable(h, cfg.grid.t0, table_range(cfg, h, pc), pc));
        case FrameKind::diagonal_phase:
            return FrameField::diagonal_phase(spec.phases, spec.rate);
    }
    throw ContractError("build_frames: unknown kind");
}

PictureFamily build_picture(const ScenarioConfig& cfg, const HamiltonianFamily& h, const PhysicsConfig& pc) {
    const double anchor = cfg.picture.anchor.value_or(cfg.grid.t0);
    switch (cfg.picture.kind) {
        case PictureKind::schrodinger:
            return PictureFamily::identity(cfg.dim, anchor);
        case PictureKind::heisenberg:
            return PictureFamily::evolution(EvolutionTable(h, anchor, table_range(cfg, h, pc), pc));
        case PictureKind::v_family:
            return PictureFamily::diagonal_phase(anchor, cfg.picture.diagonal, cfg.picture.omega);
    }
    throw ContractError("build_picture: unknown kind");
}

// Propagators U(t_k, t0) at the user grid points, each grid interval split
// so that no propagator step exceeds cfg.max_step.
std::vector<Propagator> sampled_propagators(const HamiltonianFamily& h, const TimeGrid& grid,
                                            const PhysicsConfig& pc) {
    const int sub = std::max(1, static_cast<int>(std::ceil(grid.dt() / pc.max_step - 1e-9)));
    const TimeGrid fine(grid.t0(), grid.t1(), grid.steps() * sub);
    std::vector<Propagator> all = evolution_path(h, fine, pc);
    std::vector<Propagator> out;
    out.reserve(static_cast<std::size_t>(grid.steps()) + 1);
    for (int k = 0; k <= grid.steps(); ++k) {
        out.push_back(std::move(all[static_cast<std::size_t>(k) * static_cast<std::size_t>(sub)]));
        out.back().t_to = grid.at(k);
    }
    return out;
}

double density_defect(const ComplexMatrix& rho) {
    return std::max({std::abs(trace(rho) - Complex(1.0, 0.0)), std::max(0.0, -min_eigenvalue(rho)),
                     hermiticity_residual(rho)});
}

template <typename Fn>
auto with_context(const std::string& scenario, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericError& e) {
        throw NumericError("scenario '" + scenario + "': " + e.what());
    } catch (const ValidationError&) {
        throw;
    } catch (const ShapeError& e) {
        throw ShapeError("scenario '" + scenario + "': " + e.what());
    } catch (const ContractError& e) {
        throw ContractError("scenario '" + scenario + "': " + e.what());
    }
}

EvolveResult evolve(const ScenarioConfig& cfg, const RunOptions& opts) {
    const PhysicsConfig pc = build_physics(cfg, opts);
    const Tolerance& tol = pc.tol;
    const Tolerances& th = cfg.tolerances;
    const HamiltonianFamily h = build_hamiltonian(cfg, opts);
    const TimeGrid grid(cfg.grid.t0, cfg.grid.t1, cfg.grid.steps);
    const FrameField frames = build_frames(cfg, h, pc);
    const PictureFamily picture = build_picture(cfg, h, pc);
    const Path path = Path::line(cfg.name, grid_range(cfg));

    const DensityState rho0 = density_from_ensemble(cfg.ensemble, grid.t0(), tol);
    const DensityMorphism p0 = density_morphism(rho0, frames, path, tol);
    const std::vector<Propagator> us = sampled_propagators(h, grid, pc);
    const double purity0 = purity(rho0, tol).value;

    EvolveResult result;
    result.report.scenario = cfg.name;
    for (const auto& o : cfg.observables) {
        result.table.observable_names.push_back(o.name);
    }

    double max_trace = 0.0, max_herm = 0.0, max_neg = 0.0, max_purity = 0.0, max_bundle_density = 0.0;
    double max_formulation = 0.0, max_picture = 0.0, max_heisenberg = 0.0;
    std::vector<DensityMorphism> morphisms;
    morphisms.reserve(us.size());

    for (std::size_t k = 0; k < us.size(); ++k) {
        const Propagator& u = us[k];
        const double t = u.t_to;
        const DensityState rho = propagate_density(rho0, u, tol);
        const EvolutionTransport transport = transport_from_propagator(u, frames, path);
        const DensityMorphism p = propagate_density_morphism(p0, transport, tol);

        TraceRow row;
        row.t = t;
        const Complex tr = trace(rho.rho);
        row.trace_re = tr.real();
        row.trace_im = tr.imag();
        row.purity = purity(rho, tol).value;
        row.min_eig = min_eigenvalue(rho.rho);

        for (const auto& o : cfg.observables) {
            ObservableMeans m;
            m.schrodinger = expectation(rho, o.matrix, tol).value;
            m.heisenberg = trace_of_product(rho0.rho, to_heisenberg_operator(o.matrix, u)).real();
            m.bundle = bundle_expectation(p, lift_operator(o.matrix, frames, path, t));
            row.gap_formulation = std::max(row.gap_formulation, std::abs(m.schrodinger - m.bundle));
            const PictureMeans pm = picture_mean_invariance({rho0, o.matrix, u, picture, frames, path});
            row.gap_picture = std::max(row.gap_picture, pm.max_deviation());
            row.means.push_back(m);
        }
        const double hilbert_const = (u.u.adjoint() * rho.rho * u.u - rho0.rho).norm();
        const double bundle_const = (transport.matrix.adjoint() * p.matrix * transport.matrix - p0.matrix).norm();
        row.gap_heisenberg_const = std::max(hilbert_const, bundle_const);

        max_trace = std::max(max_trace, std::abs(tr - Complex(1.0, 0.0)));
        max_herm = std::max(max_herm, hermiticity_residual(rho.rho));
        max_neg = std::max(max_neg, -row.min_eig);
        max_purity = std::max(max_purity, std::abs(row.purity - purity0));
        max_bundle_density = std::max(max_bundle_density, density_defect(p.matrix));
        max_formulation = std::max(max_formulation, row.gap_formulation);
        max_picture = std::max(max_picture, row.gap_picture);
        max_heisenberg = std::max(max_heisenberg, row.gap_heisenberg_const);

        result.table.rows.push_back(std::move(row));
        morphisms.push_back(p);
    }

    InvariantReport& report = result.report;
    report.add("trace", max_trace, th.density);
    report.add("hermiticity", max_herm, th.hermiticity);
    report.add("positivity", std::max(0.0, max_neg), th.density);
    report.add("purity_drift", max_purity, th.purity);
    report.add("bundle_density", max_bundle_density, th.density);
    report.add("formulation_gap", max_formulation, th.formulation);
    report.add("picture_gap", max_picture, th.picture);
    report.add("heisenberg_constancy", max_heisenberg, th.heisenberg);

    const std::vector<DensityState> rk = integrate_von_neumann(rho0, h, grid, pc);
    const ComplexMatrix rho_end = us.back().u * rho0.rho * us.back().u.adjoint();
    report.add("hilbert_integrator", (rk.back().rho - rho_end).norm(), th.integrator);

    const std::vector<DensityMorphism> rk_bundle = integrate_bundle_liouville(p0, h, frames, path, grid, pc);
    report.add("bundle_integrator", (rk_bundle.back().matrix - morphisms.back().matrix).norm(), th.integrator);

    const DensityState rho0_v{v_transform_operator(rho0.rho, picture, grid.t0()), grid.t0()};
    const std::vector<DensityState> rk_v = integrate_v_picture_density(rho0_v, picture, h, grid, pc);
    const ComplexMatrix v_end = v_picture_solution(rho0_v.rho, picture, us.back());
    report.add("v_picture_integrator", (rk_v.back().rho - v_end).norm(), th.v_picture);

    // D~ P along the propagated morphisms at interior grid points, with the
    // morphism near t_k reached by a short transport from the grid value.
    const MatrixFunction gamma = gamma_source(h, frames, path, pc);
    double max_derivation = 0.0;
    for (int k = 1; k < grid.steps(); ++k) {
        const double t = grid.at(k);
        if (!path.contains(t - pc.fd_step) || !path.contains(t + pc.fd_step)) {
            continue;
        }
        const ComplexMatrix& pk = morphisms[static_cast<std::size_t>(k)].matrix;
        const MatrixFunction local = [&](double s) -> ComplexMatrix {
            if (s == t) {
                return pk;
            }
            const ComplexMatrix tr_s = evolution_transport(h, frames, path, s, t, pc).matrix;
            return tr_s * pk * tr_s.adjoint();
        };
        max_derivation = std::max(max_derivation, morphism_derivation(local, gamma, t, pc.fd_step).norm());
    }
    report.add("derivation_annihilation", max_derivation, th.derivation);
    return result;
}

std::vector<double> sample_points(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 1; i <= n; ++i) {
        out.push_back(lo + (hi - lo) * i / (n + 1));
    }
    return out;
}

// At most `cap` grid points, evenly strided, always including both ends.
std::vector<double> strided_grid(const TimeGrid& grid, int cap) {
    const int stride = std::max(1, (grid.steps() + cap - 1) / cap);
    std::vector<double> out;
    for (int k = 0; k < grid.steps(); k += stride) {
        out.push_back(grid.at(k));
    }
    out.push_back(grid.t1());
    return out;
}

CurvatureResult curvature(const ScenarioConfig& cfg, const RunOptions& opts) {
    const PhysicsConfig pc = build_physics(cfg, opts);
    const Tolerances& th = cfg.tolerances;
    const CurvatureSpec spec = cfg.curvature.value_or(CurvatureSpec{});
    const HamiltonianFamily h = build_hamiltonian(cfg, opts);
    const TimeGrid grid(cfg.grid.t0, cfg.grid.t1, cfg.grid.steps);

    const TwoParamFamily fam =
        TwoParamFamily::grid(h, FrameField::identity_points(cfg.dim), grid_range(cfg), grid_range(cfg));
    CurvatureOptions copts;
    copts.h_step = spec.h_step;

    CurvatureResult result;
    result.report.scenario = cfg.name;
    double max_gap = 0.0, max_fd = 0.0, lower_bound_defect = 0.0;
    for (double s : sample_points(grid.t0(), grid.t1(), spec.s_samples)) {
        for (double t : sample_points(grid.t0(), grid.t1(), spec.t_samples)) {
            CurvatureSample sample{s, t, curvature_fd(fam, s, t, copts, pc).r, curvature_commutator(h, s, t, pc).r};
            const double fd_norm = sample.fd.norm();
            const double comm_norm = sample.commutator.norm();
            max_gap = std::max(max_gap, (sample.fd - sample.commutator).norm());
            max_fd = std::max(max_fd, fd_norm);
            if (comm_norm > th.flatness) {
                lower_bound_defect = std::max(lower_bound_defect, 0.5 * comm_norm - fd_norm);
            }
            result.samples.push_back(std::move(sample));
        }
    }
    result.report.add("curvature_fd_vs_commutator", max_gap, th.curvature_fd);

    const std::vector<double> scan = strided_grid(grid, 512);
    result.verdict = is_flat(h, scan, th.flatness);
    if (!result.verdict.flat) {
        result.report.add("curvature_lower_bound", lower_bound_defect, th.flat);
        return result;
    }
    result.report.add("flat_curvature", max_fd, th.flat);

    const Path path = Path::line(cfg.name, grid_range(cfg));
    const FrameField frames = flat_frame(h, path, grid, pc);
    FlatFrameNumbers numbers;
    for (double t : scan) {
        if (path.contains(t - pc.fd_step) && path.contains(t + pc.fd_step)) {
            numbers.max_gamma = std::max(
                numbers.max_gamma, transport_coefficients(h, frames, path, t, pc.fd_step, pc).gamma.norm());
        }
    }
    const ComplexMatrix id = identity(cfg.dim);
    for (const Propagator& u : sampled_propagators(h, grid, pc)) {
        numbers.max_transport_deviation =
            std::max(numbers.max_transport_deviation, (transport_from_propagator(u, frames, path).matrix - id).norm());
    }
    result.flat_frame = numbers;
    result.report.add("flat_frame_gamma", numbers.max_gamma, th.flat);
    result.report.add("flat_frame_transport", numbers.max_transport_deviation, th.flat);
    return result;
}

}  // namespace

EvolveResult run_evolve(const ScenarioConfig& cfg, const RunOptions& opts) {
    return with_context(cfg.name, [&] { return evolve(cfg, opts); });
}

CurvatureResult run_curvature(const ScenarioConfig& cfg, const RunOptions& opts) {
    return with_context(cfg.name, [&] { return curvature(cfg, opts); });
}

}  // namespace bqm
