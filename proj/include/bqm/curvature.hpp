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
#include <optional>
#include <span>
#include <utility>

#include "bqm/bundle.hpp"
#include "bqm/errors.hpp"
#include "bqm/hilbert.hpp"

namespace bqm {

// eta: J x J' -> B. Both coordinate directions use the same Hamiltonian,
// evaluated at the respective parameter; frames must be point-keyed.
struct TwoParamFamily {
    Interval s_domain;
    Interval t_domain;
    std::function<BasePointLabel(double, double)> point_of;
    HamiltonianFamily hamiltonian;
    FrameField frames;

    // point_of(s, t) = {"eta", {s, t}}
    static TwoParamFamily grid(HamiltonianFamily h, FrameField frames, Interval s_domain, Interval t_domain);
};

struct CurvatureValue {
    ComplexMatrix r;  // inverse time squared
    double s = 0.0;
    double t = 0.0;
};

struct CurvatureOptions {
    double h_step = 1e-3;    // outer step for the s- and t-derivatives of Gamma
    bool richardson = true;  // one refinement at h_step / 2
};

// Gamma(t; eta(s, .)) along the t-line through (s, t).
ComplexMatrix gamma_along_t(const TwoParamFamily& fam, double s, double t, const PhysicsConfig& cfg);
// Gamma(s; eta(., t)) along the s-line through (s, t).
ComplexMatrix gamma_along_s(const TwoParamFamily& fam, double s, double t, const PhysicsConfig& cfg);

// d_s Gamma_t - d_t Gamma_s + Gamma_s Gamma_t - Gamma_t Gamma_s, by finite differences.
CurvatureValue curvature_fd(const TwoParamFamily& fam, double s, double t, const CurvatureOptions& opts,
                            const PhysicsConfig& cfg);

// -(1/hbar^2) [H(s), H(t)]; equals the curvature only in identity frames.
CurvatureValue curvature_commutator(const HamiltonianFamily& h, double s, double t, const PhysicsConfig& cfg);

struct FlatnessVerdict {
    bool flat = true;
    double max_commutator_norm = 0.0;
    std::pair<double, double> witness{0.0, 0.0};  // maximizing pair
};

FlatnessVerdict is_flat(const HamiltonianFamily& h, std::span<const double> samples, double tol);

class NonFlatError : public ContractError {
   public:
    NonFlatError(const std::string& what, FlatnessVerdict verdict) : ContractError(what), verdict_(verdict) {}
    const FlatnessVerdict& verdict() const noexcept { return verdict_; }

   private:
    FlatnessVerdict verdict_;
};

// Co-moving frames l(gamma, t) = U(t, grid.t0()) for a commuting family, in
// which the transport is the identity and its coefficients vanish. Throws
// NonFlatError when the family fails is_flat on the grid at tolerance 1e-8.
FrameField flat_frame(const HamiltonianFamily& h, const Path& path, const TimeGrid& grid, const PhysicsConfig& cfg);

}  // namespace bqm
