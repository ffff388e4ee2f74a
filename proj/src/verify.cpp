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
#include <numbers>
#include <string>
#include <vector>

#include "bqm/bundle.hpp"
#include "bqm/curvature.hpp"
#include "bqm/errors.hpp"
#include "bqm/hilbert.hpp"
#include "bqm/pictures.hpp"
#include "bqm/random.hpp"
#include "bqm/scenario.hpp"

namespace bqm {

namespace {

double density_defect(const ComplexMatrix& rho) {
    return std::max({std::abs(trace(rho) - Complex(1.0, 0.0)), std::max(0.0, -min_eigenvalue(rho)),
                     hermiticity_residual(rho)});
}

double spectrum_gap(const ComplexMatrix& a, const ComplexMatrix& b) {
    const RealVector ea = hermitian_eigensystem(a).values;
    const RealVector eb = hermitian_eigensystem(b).values;
    return (ea - eb).cwiseAbs().maxCoeff() / std::max(1.0, a.norm());
}

Ensemble random_ensemble(Rng& rng, Index dim, int members) {
    Ensemble e;
    double total = 0.0;
    for (int i = 0; i < members; ++i) {
        const double w = 0.1 + rng.uniform();
        e.members.push_back({w, random_state(rng, dim)});
        total += w;
    }
    for (auto& m : e.members) {
        m.weight /= total;
    }
    return e;
}

// One randomized instance of every module invariant. Deviations are merged
// into the shared report under fixed check names.
class Trial {
   public:
    Trial(int index, Index dim, const VerifyOptions& opts, InvariantReport& report)
        : index_(index),
          dim_(dim),
          seed_(derive_seed(opts.seed, static_cast<std::uint64_t>(index))),
          rng_(seed_),
          flip_(opts.flip_gamma_sign),
          ctol_(opts.contract_tol),
          report_(report),
          h_(HamiltonianFamily::harmonic_drive(random_hermitian(rng_, dim, 2.0), random_hermitian(rng_, dim, 1.5),
                                               rng_.uniform(0.5, 3.0), rng_.uniform(0.0, 2.0 * std::numbers::pi))),
          grid_(0.0, 1.0, 200),
          frames_(FrameField::random_unitary(dim, derive_seed(seed_, 1))),
          path_(Path::line("trial-" + std::to_string(index), Interval{0.0, 1.0})),
          observable_(random_hermitian(rng_, dim, 1.0)) {
        pc_.tol = ctol_;
        mixed_ = density_from_ensemble(random_ensemble(rng_, dim, 3), 0.0, ctol_);
        pure_ensemble_ = random_ensemble(rng_, dim, 1);
        pure_ = density_from_ensemble(pure_ensemble_, 0.0, ctol_);
        us_ = evolution_path(h_, grid_, pc_);
    }

    void run() {
        linalg();
        hilbert();
        bundle();
        pictures();
        curvature();
    }

   private:
    void merge(const std::string& name, double deviation, double threshold) {
        report_.merge(name, deviation, threshold);
    }

    double interior_time() { return rng_.uniform(0.1, 0.9); }

    int interior_index() {
        return 1 + static_cast<int>(rng_.uniform() * (grid_.steps() - 1)) % (grid_.steps() - 1);
    }

    ComplexMatrix gamma_at(const MatrixFunction& gamma, double t) const { return flip_ ? ComplexMatrix(-gamma(t)) : gamma(t); }

    void linalg() {
        const ComplexMatrix a = random_gaussian_matrix(rng_, dim_);
        const ComplexMatrix b = random_gaussian_matrix(rng_, dim_);
        merge("linalg.commutator_trace", std::abs(trace(commutator(a, b))) / (a.norm() * b.norm()), ctol_.abs());
        merge("linalg.adjoint_involution", (adjoint(adjoint(a)) - a).cwiseAbs().maxCoeff(), 0.0);
        const ComplexMatrix g = a * (5.0 * rng_.uniform() / a.norm());
        merge("linalg.exp_inverse", (matrix_exponential(g) * matrix_exponential(-g) - identity(dim_)).norm(),
              10.0 * ctol_.abs());
        merge("linalg.ensemble_min_eigenvalue", std::max(0.0, -min_eigenvalue(mixed_.rho)), ctol_.abs());
        merge("linalg.ensemble_min_eigenvalue", std::max(0.0, -min_eigenvalue(pure_.rho)), ctol_.abs());
    }

    void hilbert() {
        const double purity_mixed = purity(mixed_, ctol_).value;
        std::vector<DensityState> trajectory;
        for (const Propagator& u : us_) {
            const DensityState rho = propagate_density(mixed_, u, ctol_);
            const DensityState pure = propagate_density(pure_, u, ctol_);
            merge("hilbert.trace", std::abs(trace(rho.rho) - Complex(1.0, 0.0)), th_.density);
            merge("hilbert.hermiticity", hermiticity_residual(rho.rho), th_.hermiticity);
            merge("hilbert.min_eigenvalue", std::max(0.0, -min_eigenvalue(rho.rho)), th_.density);
            merge("hilbert.purity_drift", std::abs(purity(rho, ctol_).value - purity_mixed), th_.purity);
            merge("hilbert.pure_stays_pure", (pure.rho * pure.rho - pure.rho).norm(), th_.purity);
            trajectory.push_back(rho);
        }

        const std::vector<DensityState> rk = integrate_von_neumann(mixed_, h_, grid_, pc_);
        for (const auto& r : rk) {
            merge("hilbert.integrator_invariants", density_defect(r.rho), th_.integrator);
        }
        merge("hilbert.integrator_endpoint", (rk.back().rho - trajectory.back().rho).norm(), th_.integrator);

        const int mid = grid_.steps() / 2;
        const Propagator tail = propagate_between(h_, grid_.at(mid), grid_.t1(), grid_.steps() - mid, pc_);
        merge("hilbert.composition", (us_.back().u - tail.u * us_[static_cast<std::size_t>(mid)].u).norm(),
              th_.composition);

        Ensemble evolved = pure_ensemble_;
        Ensemble mixed_members = random_ensemble(rng_, dim_, 2);
        const DensityState start = density_from_ensemble(mixed_members, 0.0, ctol_);
        for (auto& m : mixed_members.members) {
            m.vector = us_.back().u * m.vector;
        }
        const DensityState member_route = density_from_ensemble(mixed_members, grid_.t1(), ctol_);
        merge("hilbert.ensemble_route",
              (member_route.rho - propagate_density(start, us_.back(), ctol_).rho).norm(), th_.two_route);

        const DensityState& last = trajectory.back();
        merge("hilbert.cyclic_expectation",
              std::abs(trace(last.rho * observable_) - trace(observable_ * last.rho)) / std::max(1.0, observable_.norm()),
              ctol_.abs());
        merge("hilbert.expectation_imaginary", expectation(last, observable_, ctol_).imaginary_residue, ctol_.abs());
    }

    void bundle() {
        for (int i = 0; i < 4; ++i) {
            merge("bundle.frame_unitarity", unitarity_residual(frames_(path_, rng_.uniform(0.0, 1.0))), ctol_.abs());
        }
        const DensityMorphism p0 = density_morphism(mixed_, frames_, path_, ctol_);
        for (int k = 0; k <= grid_.steps(); k += 20) {
            const Propagator& u = us_[static_cast<std::size_t>(k)];
            const double t = u.t_to;
            const EvolutionTransport tr = transport_from_propagator(u, frames_, path_);
            const DensityMorphism p = propagate_density_morphism(p0, tr, ctol_);
            const DensityState rho = propagate_density(mixed_, u, ctol_);
            merge("bundle.two_route_density", (lift_operator(rho.rho, frames_, path_, t).matrix - p.matrix).norm(),
                  th_.two_route);
            const MorphismValue a_lift = lift_operator(observable_, frames_, path_, t);
            const ComplexMatrix lhs = to_heisenberg_morphism(a_lift, tr).matrix;
            const ComplexMatrix rhs = lift_operator(to_heisenberg_operator(observable_, u), frames_, path_, 0.0).matrix;
            merge("bundle.two_route_observable", (lhs - rhs).norm(), th_.two_route);
            merge("bundle.expectation_equality",
                  std::abs(expectation(rho, observable_, ctol_).value - bundle_expectation(p, a_lift)),
                  th_.formulation);
            merge("bundle.density_validity", density_defect(p.matrix), th_.density);
        }

        const MatrixFunction gamma = gamma_source(h_, frames_, path_, pc_);
        const MatrixFunction signed_gamma = [this, gamma](double t) { return gamma_at(gamma, t); };
        for (int i = 0; i < 3; ++i) {
            const int k = interior_index();
            const double tk = grid_.at(k);
            const ComplexMatrix pk =
                propagate_density_morphism(p0, transport_from_propagator(us_[static_cast<std::size_t>(k)], frames_, path_), ctol_)
                    .matrix;
            const MatrixFunction local = [&](double s) -> ComplexMatrix {
                if (s == tk) {
                    return pk;
                }
                const ComplexMatrix t_s = evolution_transport(h_, frames_, path_, s, tk, pc_).matrix;
                return t_s * pk * t_s.adjoint();
            };
            merge("bundle.derivation_annihilation", morphism_derivation(local, signed_gamma, tk, pc_.fd_step).norm(),
                  th_.derivation);
        }

        transport_system(p0, signed_gamma);

        const double r = rng_.uniform(0.1, 0.5);
        const double s = r + rng_.uniform(0.0, 0.1);
        const double t = s + rng_.uniform(0.0, 0.1);
        const ComplexMatrix t_ts = evolution_transport(h_, frames_, path_, t, s, pc_).matrix;
        const ComplexMatrix t_sr = evolution_transport(h_, frames_, path_, s, r, pc_).matrix;
        const ComplexMatrix t_tr = evolution_transport(h_, frames_, path_, t, r, pc_).matrix;
        merge("bundle.transport_composition", (t_ts * t_sr - t_tr).norm(), th_.composition);
        merge("bundle.transport_identity",
              (evolution_transport(h_, frames_, path_, s, s, pc_).matrix - identity(dim_)).norm(), th_.composition);
    }

    // The three transport conditions on a short window: all transported, a
    // frozen density, and a frozen section. Any two holding must force the third.
    void transport_system(const DensityMorphism& p0, const MatrixFunction& gamma) {
        const int k = interior_index();
        const double tk = grid_.at(k);
        const ComplexMatrix pk =
            propagate_density_morphism(p0, transport_from_propagator(us_[static_cast<std::size_t>(k)], frames_, path_), ctol_)
                .matrix;
        const ComplexVector psi_k = frames_(path_, tk).adjoint() * us_[static_cast<std::size_t>(k)].u *
                                    pure_ensemble_.members.front().vector.normalized();
        const auto transport = [this, tk](double s) -> ComplexMatrix {
            return s == tk ? identity(dim_) : evolution_transport(h_, frames_, path_, s, tk, pc_).matrix;
        };
        const double half = std::min({0.02, tk - 2.0 * pc_.fd_step, 1.0 - tk - 2.0 * pc_.fd_step});
        const TimeGrid window(tk - half, tk + half, 6);

        const StateSection moving{path_, [transport, psi_k](double s) -> ComplexVector { return transport(s) * psi_k; }};
        const StateSection frozen{path_, [psi_k](double) -> ComplexVector { return psi_k; }};
        const MatrixFunction rho_moving = [transport, pk](double s) -> ComplexMatrix {
            const ComplexMatrix t = transport(s);
            return t * pk * t.adjoint();
        };
        const MatrixFunction rho_frozen = [pk](double) -> ComplexMatrix { return pk; };

        const double thr = th_.derivation;
        const auto all = check_transport_section_system(moving, rho_moving, gamma, window, pc_.fd_step, thr);
        merge("bundle.transport_system",
              std::max({all.section_residual, all.product_residual, all.density_residual}), thr);

        double violations = 0.0;
        for (const auto& rep : {all, check_transport_section_system(moving, rho_frozen, gamma, window, pc_.fd_step, thr),
                                check_transport_section_system(frozen, rho_moving, gamma, window, pc_.fd_step, thr)}) {
            const int held = int(rep.section_transported) + int(rep.product_transported) + int(rep.density_equation);
            if (held == 2) {
                violations += 1.0;
            }
        }
        merge("bundle.transport_system_implication", violations, 0.0);
    }

    void pictures() {
        const ComplexMatrix x = random_gaussian_matrix(rng_, dim_);
        const ComplexMatrix y = random_gaussian_matrix(rng_, dim_);
        const ComplexMatrix z = random_gaussian_matrix(rng_, dim_);
        merge("pictures.cyclic_trace",
              std::abs(trace(x * y * z) - trace(z * x * y)) / (x.norm() * y.norm() * z.norm()), ctol_.abs());

        RealVector phases(dim_);
        for (Index i = 0; i < dim_; ++i) {
            phases(i) = rng_.uniform(-1.0, 1.0);
        }
        const double anchor = rng_.uniform(0.0, 1.0);
        const PictureFamily v = PictureFamily::diagonal_phase(anchor, phases, rng_.uniform(0.5, 2.0));

        const std::vector<DensityState> traj = [&] {
            std::vector<DensityState> out;
            for (const auto& u : us_) {
                out.push_back(propagate_density(mixed_, u, ctol_));
            }
            return out;
        }();
        merge("pictures.heisenberg_constancy", heisenberg_density(traj, us_).max_deviation, th_.heisenberg);
        {
            const DensityMorphism p0 = density_morphism(mixed_, frames_, path_, ctol_);
            std::vector<DensityMorphism> ptraj;
            std::vector<EvolutionTransport> transports;
            for (const auto& u : us_) {
                transports.push_back(transport_from_propagator(u, frames_, path_));
                ptraj.push_back(propagate_density_morphism(p0, transports.back(), ctol_));
            }
            merge("pictures.heisenberg_constancy", heisenberg_density(ptraj, transports).max_deviation,
                  th_.heisenberg);
        }

        // d rho^V / dt against [H~, rho^V] / (i hbar) along the exact trajectory.
        for (int i = 0; i < 3; ++i) {
            const int k = interior_index();
            const double tk = grid_.at(k);
            const ComplexMatrix& rk = traj[static_cast<std::size_t>(k)].rho;
            const auto rho_v = [&](double s) -> ComplexMatrix {
                const ComplexMatrix u = s == tk ? identity(dim_) : propagate_between(h_, tk, s, pc_).u;
                return v_transform_operator(u * rk * u.adjoint(), v, s);
            };
            const double d = pc_.fd_step;
            const ComplexMatrix deriv = (rho_v(tk + d) - rho_v(tk - d)) / (2.0 * d);
            const ComplexMatrix gen = v_picture_generator(v, h_, tk, d, pc_).matrix;
            const ComplexMatrix residual = Complex(0.0, pc_.hbar) * deriv - commutator(gen, rho_v(tk));
            merge("pictures.v_residual", residual.norm(), th_.v_picture);
        }

        const int k = interior_index();
        const Propagator& u = us_[static_cast<std::size_t>(k)];
        const double t = u.t_to;
        merge("pictures.spectrum", spectrum_gap(observable_, v_transform_operator(observable_, v, t)), ctol_.abs());
        merge("pictures.spectrum", spectrum_gap(observable_, to_heisenberg_operator(observable_, u)), ctol_.abs());

        const MorphismValue a_lift = lift_operator(observable_, frames_, path_, t);
        merge("pictures.morphism_coherence",
              (v_transform_morphism(a_lift, v, frames_, path_).matrix -
               lift_operator(v_transform_operator(observable_, v, t), frames_, path_, anchor).matrix)
                  .norm(),
              th_.two_route);
        merge("pictures.morphism_coherence",
              (to_heisenberg_morphism(a_lift, transport_from_propagator(u, frames_, path_)).matrix -
               lift_operator(to_heisenberg_operator(observable_, u), frames_, path_, 0.0).matrix)
                  .norm(),
              th_.two_route);

        merge("pictures.mean_invariance",
              picture_mean_invariance({mixed_, observable_, u, v, frames_, path_}).max_deviation(), th_.picture);
        merge("pictures.mean_invariance",
              picture_mean_invariance({mixed_, observable_, u, PictureFamily::identity(dim_, anchor), frames_, path_})
                  .max_deviation(),
              th_.picture);

        const ComplexMatrix rho_v0 = v_transform_operator(mixed_.rho, v, 0.0);
        merge("pictures.v_solution_two_route",
              (v_picture_solution(rho_v0, v, u) -
               v_transform_operator(propagate_density(mixed_, u, ctol_).rho, v, t))
                  .norm(),
              th_.two_route);

        const std::vector<DensityState> rk_v = integrate_v_picture_density({rho_v0, 0.0}, v, h_, grid_, pc_);
        merge("pictures.v_integrator", (rk_v.back().rho - v_picture_solution(rho_v0, v, us_.back())).norm(),
              th_.v_picture);

        // Evolution picture anchored at 0 on a short window reduces to the Heisenberg forms.
        const double window = 0.2;
        const int wk = static_cast<int>(window / grid_.dt() + 0.5);
        const PictureFamily ev = PictureFamily::evolution(EvolutionTable(h_, 0.0, Interval{0.0, window}, pc_));
        for (int j : {wk / 2, wk}) {
            const Propagator& uw = us_[static_cast<std::size_t>(j)];
            merge("pictures.evolution_reduction",
                  (v_picture_solution(mixed_.rho, ev, uw) - mixed_.rho).norm(), th_.heisenberg);
            merge("pictures.evolution_reduction",
                  (v_transform_operator(observable_, ev, uw.t_to) - to_heisenberg_operator(observable_, uw)).norm(),
                  th_.heisenberg);
            merge("pictures.mean_invariance",
                  picture_mean_invariance({mixed_, observable_, uw, ev, frames_, path_}).max_deviation(),
                  th_.picture);
        }
    }

    void curvature() {
        const ComplexMatrix a = random_hermitian(rng_, dim_, 1.5);
        const ComplexMatrix b = random_hermitian(rng_, dim_, 1.5);
        const HamiltonianFamily rotating(dim_, Interval::whole_line(), [a, b](double u) -> ComplexMatrix {
            return std::cos(u) * a + std::sin(u) * b;
        });
        const Interval box{-1.0, 2.0};
        const TwoParamFamily fam = TwoParamFamily::grid(rotating, FrameField::identity_points(dim_), box, box);
        const double s = rng_.uniform(0.0, 1.0);
        const double t = rng_.uniform(0.0, 1.0);
        const CurvatureOptions copts;
        const ComplexMatrix r_fd = curvature_fd(fam, s, t, copts, pc_).r;
        const ComplexMatrix r_comm = curvature_commutator(rotating, s, t, pc_).r;
        merge("curvature.identity_frame_agreement", (r_fd - r_comm).norm(), th_.curvature_fd);
        merge("curvature.nonflat_lower_bound", std::max(0.0, 0.5 * r_comm.norm() - r_fd.norm()), th_.flat);

        const FrameField gauge = FrameField::random_unitary_points(dim_, derive_seed(seed_, 2));
        const TwoParamFamily gauged = TwoParamFamily::grid(rotating, gauge, box, box);
        const Path at_point{"eta", Interval::whole_line(), [s, t](double) { return BasePointLabel{"eta", {s, t}}; }};
        const ComplexMatrix l = gauge(at_point, 0.0);
        merge("curvature.gauge_covariance",
              (curvature_fd(gauged, s, t, copts, pc_).r - l.adjoint() * r_fd * l).norm(), th_.curvature_fd);

        const ComplexMatrix w = random_unitary(rng_, dim_);
        RealVector diag(dim_);
        for (Index i = 0; i < dim_; ++i) {
            diag(i) = rng_.uniform(-1.0, 1.0);
        }
        const ComplexMatrix d = w * diag.cast<Complex>().asDiagonal() * w.adjoint();
        const double freq = rng_.uniform(0.5, 3.0);
        const HamiltonianFamily commuting =
            HamiltonianFamily::modulated(d, [freq](double u) { return 1.0 + 0.5 * std::sin(freq * u); });
        const TwoParamFamily flat_fam = TwoParamFamily::grid(commuting, FrameField::identity_points(dim_), box, box);
        merge("curvature.flat_family", curvature_fd(flat_fam, s, t, copts, pc_).r.norm(), th_.flat);

        std::vector<double> samples;
        for (int i = 0; i <= 8; ++i) {
            samples.push_back(0.125 * i);
        }
        double misclassified = 0.0;
        if (!is_flat(commuting, samples, th_.flatness).flat) {
            misclassified += 1.0;
        }
        const FlatnessVerdict nonflat = is_flat(rotating, samples, th_.flatness);
        if (nonflat.flat || commutator(rotating(nonflat.witness.first), rotating(nonflat.witness.second)).norm() !=
                                nonflat.max_commutator_norm) {
            misclassified += 1.0;
        }
        merge("curvature.flatness_verdict", misclassified, 0.0);

        const double window = 0.2;
        const TimeGrid flat_grid(0.0, window, 20);
        const Path flat_path = Path::line("flat-" + std::to_string(index_), Interval{0.0, window});
        const FrameField flat = flat_frame(commuting, flat_path, flat_grid, pc_);
        for (int k = 1; k < flat_grid.steps(); ++k) {
            const double tk = flat_grid.at(k);
            merge("curvature.flat_frame_gamma",
                  transport_coefficients(commuting, flat, flat_path, tk, pc_.fd_step, pc_).gamma.norm(), th_.flat);
            const ComplexMatrix hk = commuting(tk);
            merge("curvature.lifted_hamiltonian",
                  std::max(0.0, hk.norm() - lift_operator(hk, flat, flat_path, tk).matrix.norm()), th_.flat);
        }
        const std::vector<Propagator> flat_us = evolution_path(commuting, TimeGrid(0.0, window, 200), pc_);
        const DensityMorphism p0 = density_morphism(mixed_, flat, flat_path, ctol_);
        for (std::size_t k = 0; k < flat_us.size(); k += 20) {
            const EvolutionTransport tr = transport_from_propagator(flat_us[k], flat, flat_path);
            merge("curvature.flat_frame_transport", (tr.matrix - identity(dim_)).norm(), th_.flat);
            merge("curvature.flat_frame_density", density_defect(propagate_density_morphism(p0, tr, ctol_).matrix),
                  th_.density);
        }
    }

    int index_;
    Index dim_;
    std::uint64_t seed_;
    Rng rng_;
    bool flip_;
    Tolerance ctol_;
    InvariantReport& report_;
    Tolerances th_;
    PhysicsConfig pc_;
    HamiltonianFamily h_;
    TimeGrid grid_;
    FrameField frames_;
    Path path_;
    ComplexMatrix observable_;
    DensityState mixed_;
    Ensemble pure_ensemble_;
    DensityState pure_;
    std::vector<Propagator> us_;
};

}  // namespace

InvariantReport run_verify(const VerifyOptions& opts) {
    if (opts.trials < 1) {
        throw ContractError("run_verify: trials must be at least 1");
    }
    if (opts.dims.empty()) {
        throw ContractError("run_verify: dims must not be empty");
    }
    for (int d : opts.dims) {
        if (d < 2 || d > 16) {
            throw ContractError("run_verify: dimension " + std::to_string(d) + " outside [2, 16]");
        }
    }
    InvariantReport report;
    report.scenario = "verify";
    for (int i = 0; i < opts.trials; ++i) {
        const Index dim = opts.dims[static_cast<std::size_t>(i) % opts.dims.size()];
        try {
            Trial(i, dim, opts, report).run();
        } catch (const Error& e) {
            throw Error("verify trial " + std::to_string(i) + " (dim " + std::to_string(dim) + "): " + e.what());
        }
    }
    return report;
}

}  // namespace bqm
