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

#include "bqm/random.hpp"

#include <cmath>
#include <numbers>

namespace bqm {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Complex Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ComplexMatrix random_gaussian_matrix(Rng& rng, Index dim) {
    ComplexMatrix g(dim, dim);
    // Fill row by row so the stream order is independent of Eigen's storage order.
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            g(i, j) = rng.complex_normal();
        }
    }
    return g;
}

ComplexMatrix random_unitary(Rng& rng, Index dim) { return polar_reunitarize(random_gaussian_matrix(rng, dim)); }

ComplexMatrix random_hermitian(Rng& rng, Index dim, double frobenius_norm) {
    const ComplexMatrix g = random_gaussian_matrix(rng, dim);
    ComplexMatrix h = 0.5 * (g + g.adjoint());
    const double n = h.norm();
    if (n > 0.0) {
        h *= frobenius_norm / n;
    }
    return h;
}

ComplexVector random_state(Rng& rng, Index dim) {
    ComplexVector v(dim);
    for (Index i = 0; i < dim; ++i) {
        v(i) = rng.complex_normal();
    }
    return v;
}

}  // namespace bqm
