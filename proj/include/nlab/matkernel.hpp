// Copyright 2026 The nlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra used throughout the library.
//
// Composite spaces are always ordered system-slow / ancilla-fast: the basis
// vector |s>|a> of H_s (x) H_a has index s * dim_a + a.

#ifndef NLAB_MATKERNEL_HPP
#define NLAB_MATKERNEL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "nlab/error.hpp"

namespace nlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance used to decide whether an input is Hermitian.
inline constexpr double kHermitianTolerance = 1e-9;
/// Eigenvalues below this (absolute) are treated as genuine negativity by
/// sqrt / log / fractional powers.
inline constexpr double kNegativeEigenvalueFloor = 1e-8;

/// Rank threshold: eigenvalues at or below this are outside the support.
inline double support_epsilon(double largest_eigenvalue) {
    return 1e-10 * std::max(1.0, largest_eigenvalue);
}

inline std::string shape_string(const Matrix &m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline bool all_finite(const Matrix &m) {
    for (Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            return false;
        }
    }
    return true;
}

inline void require_square(const Matrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw_dimension_mismatch(std::string(what) + " must be a nonempty square matrix, got " + shape_string(m));
    }
}

/// Largest absolute entry of a - b.
inline double max_abs_diff(const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw_dimension_mismatch("cannot compare " + shape_string(a) + " with " + shape_string(b));
    }
    return (a - b).cwiseAbs().maxCoeff();
}

/// ||A - A^dagger||_F.
inline double hermiticity_residual(const Matrix &a) {
    return (a - a.adjoint()).norm();
}

inline Matrix hermitian_part(const Matrix &a) {
    return (a + a.adjoint()) / 2.0;
}

inline Matrix identity(Index dim) {
    return Matrix::Identity(dim, dim);
}

/// |k><k| in dimension `dim`.
inline Matrix basis_projector(Index dim, Index k) {
    Matrix p = Matrix::Zero(dim, dim);
    p(k, k) = 1.0;
    return p;
}

inline Vector basis_ket(Index dim, Index k) {
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return v;
}

inline Matrix ket_bra(const Vector &ket) {
    return ket * ket.adjoint();
}

/// Kronecker product a (x) b with `a` on the slow index.
inline Matrix tensor_product(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Vector tensor_product(const Vector &a, const Vector &b) {
    Vector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

inline void require_bipartite(const Matrix &m, Index dim_s, Index dim_a) {
    if (dim_s <= 0 || dim_a <= 0 || m.rows() != dim_s * dim_a || m.cols() != dim_s * dim_a) {
        throw_dimension_mismatch("expected a " + std::to_string(dim_s * dim_a) + "x" + std::to_string(dim_s * dim_a) +
                                 " operator on " + std::to_string(dim_s) + "x" + std::to_string(dim_a) + ", got " +
                                 shape_string(m));
    }
}

/// Tr_a over the fast (ancilla) factor.
inline Matrix partial_trace_ancilla(const Matrix &m, Index dim_s, Index dim_a) {
    require_bipartite(m, dim_s, dim_a);
    Matrix out = Matrix::Zero(dim_s, dim_s);
    for (Index s = 0; s < dim_s; ++s) {
        for (Index t = 0; t < dim_s; ++t) {
            Complex acc = 0.0;
            for (Index a = 0; a < dim_a; ++a) {
                acc += m(s * dim_a + a, t * dim_a + a);
            }
            out(s, t) = acc;
        }
    }
    return out;
}

/// Tr_s over the slow (system) factor.
inline Matrix partial_trace_system(const Matrix &m, Index dim_s, Index dim_a) {
    require_bipartite(m, dim_s, dim_a);
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (Index s = 0; s < dim_s; ++s) {
        out += m.block(s * dim_a, s * dim_a, dim_a, dim_a);
    }
    return out;
}

/// The (m, n) ancilla block <m|_a X |n>_a, a dim_s x dim_s operator.
inline Matrix ancilla_block(const Matrix &x, Index dim_s, Index dim_a, Index m, Index n) {
    require_bipartite(x, dim_s, dim_a);
    Matrix out(dim_s, dim_s);
    for (Index s = 0; s < dim_s; ++s) {
        for (Index t = 0; t < dim_s; ++t) {
            out(s, t) = x(s * dim_a + m, t * dim_a + n);
        }
    }
    return out;
}

/// Reorders a matrix written in ancilla-slow layout (index a * dim_s + s)
/// into the library's system-slow layout.
inline Matrix from_ancilla_slow(const Matrix &m, Index dim_s, Index dim_a) {
    require_bipartite(m, dim_s, dim_a);
    Matrix out(m.rows(), m.cols());
    auto old_index = [&](Index k) { return (k % dim_a) * dim_s + k / dim_a; };
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            out(i, j) = m(old_index(i), old_index(j));
        }
    }
    return out;
}

struct HermitianSpectrum {
    RealVector eigenvalues;  // descending
    Matrix eigenvectors;     // columns

    Matrix reconstruct() const {
        return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
    }
    double largest() const {
        return eigenvalues.size() ? eigenvalues(0) : 0.0;
    }
    double smallest() const {
        return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0;
    }
    double epsilon() const {
        return support_epsilon(largest());
    }
    Index rank() const {
        const double eps = epsilon();
        return static_cast<Index>((eigenvalues.array() > eps).count());
    }
};

/// Eigendecomposition of a Hermitian matrix (symmetrized first). Throws if
/// ||A - A^dagger||_F exceeds 1e-9 * max(1, ||A||_F).
inline HermitianSpectrum hermitian_eig(const Matrix &a) {
    require_square(a, "hermitian_eig input");
    const double residual = hermiticity_residual(a);
    if (!(residual <= kHermitianTolerance * std::max(1.0, a.norm()))) {
        throw_violation("hermiticity", "hermitian_eig requires a Hermitian matrix", residual);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(a));
    if (solver.info() != Eigen::Success) {
        throw_domain("eigendecomposition", "self-adjoint eigensolver did not converge");
    }
    const Index n = a.rows();
    HermitianSpectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    // Eigen returns ascending order.
    for (Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
        out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    return out;
}

enum class SupportMode {
    kFull,         // f applied to every eigenvalue
    kSupportOnly,  // eigenvalues <= support_epsilon map to 0
};

/// V f(Lambda) V^dagger for Hermitian `a`.
template <class F>
Matrix matrix_function(const Matrix &a, F &&f, SupportMode mode = SupportMode::kFull) {
    const HermitianSpectrum spec = hermitian_eig(a);
    const double eps = spec.epsilon();
    RealVector mapped(spec.eigenvalues.size());
    for (Index k = 0; k < mapped.size(); ++k) {
        const double lambda = spec.eigenvalues(k);
        mapped(k) = (mode == SupportMode::kSupportOnly && lambda <= eps) ? 0.0 : f(lambda);
    }
    return spec.eigenvectors * mapped.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
}

namespace detail {

inline void require_psd_spectrum(const HermitianSpectrum &spec, const char *op) {
    if (spec.smallest() < -kNegativeEigenvalueFloor) {
        throw NlabError(ErrorKind::kDomain, "positivity",
                        std::string(op) + " of a matrix with eigenvalue " + std::to_string(spec.smallest()),
                        -spec.smallest());
    }
}

template <class F>
Matrix psd_function(const Matrix &a, F &&f, SupportMode mode, const char *op) {
    const HermitianSpectrum spec = hermitian_eig(a);
    require_psd_spectrum(spec, op);
    const double eps = spec.epsilon();
    RealVector mapped(spec.eigenvalues.size());
    for (Index k = 0; k < mapped.size(); ++k) {
        const double lambda = spec.eigenvalues(k);
        if (mode == SupportMode::kSupportOnly && lambda <= eps) {
            mapped(k) = 0.0;
        } else {
            mapped(k) = f(std::max(lambda, 0.0));
        }
    }
    return spec.eigenvectors * mapped.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
}

}  // namespace detail

inline Matrix sqrt_psd(const Matrix &a) {
    return detail::psd_function(a, [](double x) { return std::sqrt(x); }, SupportMode::kFull, "sqrt");
}

/// Base-2 logarithm restricted to the support (zero elsewhere).
inline Matrix log2_psd(const Matrix &a) {
    return detail::psd_function(a, [](double x) { return std::log2(x); }, SupportMode::kSupportOnly, "log");
}

/// a^p on the support; for p <= 0 the off-support part is always zero.
inline Matrix power_psd(const Matrix &a, double p, SupportMode mode = SupportMode::kSupportOnly) {
    if (p <= 0.0) {
        mode = SupportMode::kSupportOnly;
    }
    return detail::psd_function(a, [p](double x) { return std::pow(x, p); }, mode, "power");
}

inline Matrix support_projector(const Matrix &a) {
    return power_psd(a, 0.0);
}

/// Moore-Penrose inverse of a PSD matrix, restricted to its support.
inline Matrix pseudo_inverse_on_support(const Matrix &a) {
    require_square(a, "pseudo_inverse_on_support input");
    if (a.cwiseAbs().maxCoeff() == 0.0) {
        return Matrix::Zero(a.rows(), a.cols());
    }
    return detail::psd_function(a, [](double x) { return 1.0 / x; }, SupportMode::kSupportOnly, "pseudo-inverse");
}

/// Sum of singular values.
inline double trace_norm(const Matrix &a) {
    require_square(a, "trace_norm input");
    if (hermiticity_residual(a) <= 1e-12 * std::max(1.0, a.norm())) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
        return solver.eigenvalues().cwiseAbs().sum();
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

inline double real_trace(const Matrix &a) {
    return a.trace().real();
}

/// Orthonormal basis (columns) whose first column is exactly `ket`.
inline Matrix basis_with_first(const Vector &ket) {
    const Index n = ket.size();
    const Vector v = ket / ket.norm();
    if (v.tail(n - 1).norm() <= 1e-15) {
        Matrix w = identity(n);
        w(0, 0) = v(0) / std::abs(v(0));
        return w;
    }
    Matrix seed(n, n + 1);
    seed.col(0) = v;
    seed.rightCols(n) = identity(n);
    Eigen::HouseholderQR<Matrix> qr(seed);
    Matrix w = qr.householderQ() * identity(n);
    const Complex overlap = w.col(0).dot(v);
    w.col(0) *= overlap / std::abs(overlap);
    return w;
}

/// ||U^dagger U - 1|| as the largest entry.
inline double unitarity_residual(const Matrix &u) {
    require_square(u, "unitary");
    return max_abs_diff(u.adjoint() * u, identity(u.rows()));
}

}  // namespace nlab

#endif
