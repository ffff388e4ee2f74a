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

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace bqm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Index kMaxDim = 64;

// Absolute/relative comparison threshold. A check "within tolerance" of an
// operand of magnitude m passes when the residual is <= max(abs, rel * m).
class Tolerance {
   public:
    Tolerance() = default;
    Tolerance(double abs, double rel);

    static Tolerance absolute(double abs) { return Tolerance(abs, 0.0); }

    double abs() const noexcept { return abs_; }
    double rel() const noexcept { return rel_; }
    double bound(double magnitude) const noexcept;

   private:
    double abs_ = 1e-10;
    double rel_ = 1e-10;
};

// Throws ShapeError unless `a` is square with 1 <= dim <= kMaxDim, and
// NumericError if any entry is NaN or infinite.
void require_valid(const ComplexMatrix& a, std::string_view what);
void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, std::string_view what);

ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
Complex trace(const ComplexMatrix& a);
// Tr(a b) without forming the product.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix identity(Index dim);

struct ExpmConfig {
    int max_order = 40;               // Taylor terms allowed before giving up
    double squaring_threshold = 0.5;  // scale until ||A / 2^s||_1 <= this
};

// Scaling and squaring around a truncated Taylor kernel.
ComplexMatrix matrix_exponential(const ComplexMatrix& a, const ExpmConfig& cfg = {});

struct Eigensystem {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // columns, orthonormal
};

Eigensystem hermitian_eigensystem(const ComplexMatrix& h, const Tolerance& tol = {});

// Unitary polar factor of `m`, i.e. the closest unitary in Frobenius norm.
ComplexMatrix polar_reunitarize(const ComplexMatrix& m, const Tolerance& tol = {});

double hermiticity_residual(const ComplexMatrix& a);
double unitarity_residual(const ComplexMatrix& u);
bool is_hermitian(const ComplexMatrix& a, const Tolerance& tol = {});
bool is_unitary(const ComplexMatrix& u, const Tolerance& tol = {});
bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, const Tolerance& tol = {});

// Smallest eigenvalue of the Hermitian part of `a`.
double min_eigenvalue(const ComplexMatrix& a);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace bqm
