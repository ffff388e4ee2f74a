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

#include "bqm/curvature.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace bqm {

TwoParamFamily TwoParamFamily::grid(HamiltonianFamily h, FrameField frames, Interval s_domain, Interval t_domain) {
    return {s_domain, t_domain, [](double s, double t) { return BasePointLabel{"eta", {s, t}}; }, std::move(h),
            std::move(frames)};
}

namespace {

void require_point_frames(const TwoParamFamily& fam) {
    if (fam.frames.keying() != FrameField::Keying::base_point) {
        throw ContractError("curvature: two-parameter families need point-keyed frames");
    }
}

Path t_line(const TwoParamFamily& fam, double s) {
    Path p;
    p.id = "eta(s,.)";
    p.domain = fam.t_domain;
    p.point_of = [pt = fam.point_of, s](double t) { return pt(s, t); };
    return p;
}

Path s_line(const TwoParamFamily& fam, double t) {
    Path p;
    p.id = "eta(.,t)";
    p.domain = fam.s_domain;
    p.point_of = [pt = fam.point_of, t](double s) { return pt(s, t); };
    return p;
}

}  // namespace

ComplexMatrix gamma_along_t(const TwoParamFamily& fam, double s, double t, const PhysicsConfig& cfg) {
    require_point_frames(fam);
    return transport_coefficients(fam.hamiltonian, fam.frames, t_line(fam, s), t, cfg.fd_step, cfg).gamma;
}

ComplexMatrix gamma_along_s(const TwoParamFamily& fam, double s, double t, const PhysicsConfig& cfg) {
    require_point_frames(fam);
    return transport_coefficients(fam.hamiltonian, fam.frames, s_line(fam, t), s, cfg.fd_step, cfg).gamma;
}

namespace {

ComplexMatrix curvature_at_step(const TwoParamFamily& fam, double s, double t, double h, const PhysicsConfig& cfg) {
    const ComplexMatrix gs = gamma_along_s(fam, s, t, cfg);
    const ComplexMatrix gt = gamma_along_t(fam, s, t, cfg);
    const ComplexMatrix ds_gt = (gamma_along_t(fam, s + h, t, cfg) - gamma_along_t(fam, s - h, t, cfg)) / (2.0 * h);
    const ComplexMatrix dt_gs = (gamma_along_s(fam, s, t + h, cfg) - gamma_along_s(fam, s, t - h, cfg)) / (2.0 * h);
    return ds_gt - dt_gs + gs * gt - gt * gs;
}

}  // namespace

CurvatureValue curvature_fd(const TwoParamFamily& fam, double s, double t, const CurvatureOptions& opts,
                            const PhysicsConfig& cfg) {
    if (!(opts.h_step > 0.0)) {
        throw ContractError("curvature_fd: h_step must be positive");
    }
    const double margin = opts.h_step + cfg.fd_step;
    if (!fam.s_domain.contains(s - margin) || !fam.s_domain.contains(s + margin) ||
        !fam.t_domain.contains(t - margin) || !fam.t_domain.contains(t + margin)) {
        throw ContractError("curvature_fd: (s, t) = (" + std::to_string(s) + ", " + std::to_string(t) +
                            ") is too close to the family boundary");
    }
    ComplexMatrix r = curvature_at_step(fam, s, t, opts.h_step, cfg);
    if (opts.richardson) {
        const ComplexMatrix half = curvature_at_step(fam, s, t, 0.5 * opts.h_step, cfg);
        r = (4.0 * half - r) / 3.0;
    }
    return {r, s, t};
}

CurvatureValue curvature_commutator(const HamiltonianFamily& h, double s, double t, const PhysicsConfig& cfg) {
    cfg.validate();
    return {-commutator(h(s), h(t)) / (cfg.hbar * cfg.hbar), s, t};
}

FlatnessVerdict is_flat(const HamiltonianFamily& h, std::span<const double> samples, double tol) {
    if (samples.size() < 2) {
        throw ContractError("is_flat: need at least two sample times");
    }
    std::vector<ComplexMatrix> values;
    values.reserve(samples.size());
    for (double t : samples) {
        values.push_back(h(t));
    }
    FlatnessVerdict v;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const double n = commutator(values[i], values[j]).norm();
            if (n > v.max_commutator_norm) {
                v.max_commutator_norm = n;
                v.witness = {samples[i], samples[j]};
            }
        }
    }
    v.flat = v.max_commutator_norm <= tol;
    return v;
}

FrameField flat_frame(const HamiltonianFamily& h, const Path& path, const TimeGrid& grid, const PhysicsConfig& cfg) {
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(grid.steps()) + 1);
    for (int k = 0; k <= grid.steps(); ++k) {
        samples.push_back(grid.at(k));
    }
    const FlatnessVerdict verdict = is_flat(h, samples, 1e-8);
    if (!verdict.flat) {
        throw NonFlatError("flat_frame: Hamiltonian values at t=" + std::to_string(verdict.witness.first) +
                               " and t=" + std::to_string(verdict.witness.second) + " do not commute (norm " +
                               std::to_string(verdict.max_commutator_norm) + ")",
                           verdict);
    }
    // Pad the table so that derivative stencils at the grid ends stay inside it.
    const double pad = 4.0 * cfg.fd_step;
    Interval range{grid.t0() - pad, grid.t1() + pad};
    range.lo = std::max(range.lo, std::max(h.domain().lo, path.domain.lo));
    range.hi = std::min(range.hi, std::min(h.domain().hi, path.domain.hi));
    return FrameField::co_moving(EvolutionTable(h, grid.t0(), range, cfg));
}

}  // namespace bqm
