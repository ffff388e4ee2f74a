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

#include <cstdint>
#include <random>
#include <string_view>

#include "bqm/linalg.hpp"

namespace bqm {

// Seeded generator used for every random fixture in the project.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniform variates take the top 53 bits of each draw; normals use
// the Box-Muller transform. Nothing depends on the standard library's
// distribution classes, so a given seed yields the same stream on every
// conforming toolchain.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();  // [0, 1)
    double normal();   // mean 0, variance 1
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    Complex complex_normal();  // E|z|^2 = 1

   private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// SplitMix64 mix of (seed, stream); gives each consumer an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// FNV-1a, 64-bit.
std::uint64_t hash_label(std::string_view label);

ComplexMatrix random_gaussian_matrix(Rng& rng, Index dim);

// Haar-distributed unitary: polar factor of a complex Gaussian matrix.
ComplexMatrix random_unitary(Rng& rng, Index dim);

// Hermitian matrix with the given Frobenius norm.
ComplexMatrix random_hermitian(Rng& rng, Index dim, double frobenius_norm);

// Unnormalized state vector with Gaussian components.
ComplexVector random_state(Rng& rng, Index dim);

}  // namespace bqm
