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

#include "bqm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bqm/errors.hpp"

namespace bqm {

Tolerance::Tolerance(double abs, double rel) : abs_(abs), rel_(rel) {
    if (!(abs >= 0.0) || !(rel >= 0.0) || !std::isfinite(abs) || !std::isfinite(rel)) {
        throw ContractError("tolerance components must be finite and non-negative");
    }
    if (abs == 0.0 && rel == 0.0) {
        throw ContractError("tolerance needs a positive absolute or relative component");
    }
}

double Tolerance::bound(double magnitude) const noexcept { return std::max(abs_, rel_ * std::abs(magnitude)); }

void require_valid(const ComplexMatrix& a, std::string_view what) {
    if (a.rows() != a.cols()) {
        throw ShapeError(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
    }
    if (a.rows() < 1 || a.rows() > kMaxDim) {
        throw ShapeError(std::string(what) + ": dimension " + std::to_string(a.rows()) + " outside [1, " +
                         std::to_string(kMaxDim) + "]");
    }
    if (!a.allFinite()) {
        throw NumericError(std::string(what) + ": non-finite entry");
    }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, std::string_view what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()) + ")");
    }
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "commutator");
    return a * b - b * a;
}

Complex trace(const ComplexMatrix& a) { return a.trace(); }

Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "trace_of_product");
    return a.transpose().cwiseProduct(b).sum();
}

ComplexMatrix identity(Index dim) { return ComplexMatrix::Identity(dim, dim); }

namespace {

double norm1(const ComplexMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

ComplexMatrix matrix_exponential(const ComplexMatrix& a, const ExpmConfig& cfg) {
    require_valid(a, "matrix_exponential");
    const Index n = a.rows();

    const double anorm = norm1(a);
    int squarings = 0;
    if (anorm > cfg.squaring_threshold) {
        squarings = static_cast<int>(std::ceil(std::log2(anorm / cfg.squaring_threshold)));
    }
    const ComplexMatrix scaled = a / std::ldexp(1.0, squarings);

    ComplexMatrix sum = ComplexMatrix::Identity(n, n);
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    bool converged = false;
    for (int k = 1; k <= cfg.max_order; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
        if (norm1(term) <= std::numeric_limits<double>::epsilon() * norm1(sum)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NumericError("matrix_exponential: Taylor kernel did not converge within order " +
                           std::to_string(cfg.max_order));
    }
    for (int s = 0; s < squarings; ++s) {
        sum = sum * sum;
    }
    return sum;
}

Eigensystem hermitian_eigensystem(const ComplexMatrix& h, const Tolerance& tol) {
    require_valid(h, "hermitian_eigensystem");
    if (!is_hermitian(h, tol)) {
        throw ContractError("hermitian_eigensystem: input is not Hermitian (residual " +
                            std::to_string(hermiticity_residual(h)) + ")");
    }
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericError("hermitian_eigensystem: eigensolver failed");
    }

    // Degenerate clusters can leave eigenvectors slightly non-orthogonal;
    // two passes of modified Gram-Schmidt restore orthonormality.
    ComplexMatrix v = solver.eigenvectors();
    for (int pass = 0; pass < 2; ++pass) {
        for (Index j = 0; j < v.cols(); ++j) {
            for (Index i = 0; i < j; ++i) {
                v.col(j) -= v.col(i).dot(v.col(j)) * v.col(i);
            }
            v.col(j).normalize();
        }
    }
    return {solver.eigenvalues(), v};
}

ComplexMatrix polar_reunitarize(const ComplexMatrix& m, const Tolerance& tol) {
    require_valid(m, "polar_reunitarize");
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= tol.bound(sv(0))) {
        throw NumericError("polar_reunitarize: matrix is singular within tolerance");
    }
    return svd.matrixU() * svd.matrixV().adjoint();
}

double hermiticity_residual(const ComplexMatrix& a) { return (a - a.adjoint()).norm(); }

double unitarity_residual(const ComplexMatrix& u) {
    return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

bool is_hermitian(const ComplexMatrix& a, const Tolerance& tol) {
    return a.rows() == a.cols() && hermiticity_residual(a) <= tol.bound(a.norm());
}

bool is_unitary(const ComplexMatrix& u, const Tolerance& tol) {
    return u.rows() == u.cols() && unitarity_residual(u) <= tol.bound(std::sqrt(static_cast<double>(u.rows())));
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, const Tolerance& tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return false;
    }
    return (a - b).norm() <= tol.bound(std::max(a.norm(), b.norm()));
}

double min_eigenvalue(const ComplexMatrix& a) {
    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

namespace pauli {

ComplexMatrix x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

ComplexMatrix y() {
    ComplexMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

ComplexMatrix z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

}  // namespace pauli

}  // namespace bqm
