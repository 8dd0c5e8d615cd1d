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

#ifndef NLAB_QOBJECTS_HPP
#define NLAB_QOBJECTS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nlab/matkernel.hpp"

namespace nlab {

inline constexpr double kStateTolerance = 1e-9;
inline constexpr double kPovmTolerance = 1e-9;
inline constexpr double kPvmTolerance = 1e-9;
inline constexpr double kCorrectionTolerance = 1e-8;
inline constexpr double kProbabilityClip = 1e-12;

inline std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(std::to_string(i));
    }
    return labels;
}

namespace detail {

inline void require_finite(const Matrix &m, const std::string &what) {
    if (!all_finite(m)) {
        throw NlabError(ErrorKind::kInvariantViolation, "finiteness", what + " contains NaN or Inf");
    }
}

inline void require_labels(const std::vector<std::string> &labels, std::size_t n) {
    if (labels.size() != n) {
        throw_dimension_mismatch("expected " + std::to_string(n) + " outcome labels, got " +
                                 std::to_string(labels.size()));
    }
}

}  // namespace detail

/// Hermitian, positive semidefinite, unit-trace operator.
class DensityMatrix {
   public:
    /// Validates and stores the Hermitian part of `m`.
    static DensityMatrix from_matrix(const Matrix &m) {
        require_square(m, "density matrix");
        detail::require_finite(m, "density matrix");
        const double herm = hermiticity_residual(m);
        if (herm > kStateTolerance * std::max(1.0, m.norm())) {
            throw_violation("hermiticity", "density matrix is not Hermitian", herm);
        }
        const double trace_error = std::abs(m.trace() - Complex(1.0));
        if (trace_error > kStateTolerance) {
            throw_violation("unit trace", "density matrix trace is " + std::to_string(m.trace().real()), trace_error);
        }
        const HermitianSpectrum spec = hermitian_eig(m);
        if (spec.smallest() < -kStateTolerance) {
            throw_violation("positivity", "density matrix has a negative eigenvalue", -spec.smallest());
        }
        return DensityMatrix(hermitian_part(m));
    }

    /// Normalizes a nonzero PSD operator by its trace first.
    static DensityMatrix from_unnormalized(const Matrix &m) {
        const double tr = real_trace(m);
        if (!(tr > 0.0)) {
            throw_domain("normalization", "cannot normalize an operator with trace " + std::to_string(tr));
        }
        return from_matrix(m / tr);
    }

    static DensityMatrix pure(const Vector &ket) {
        const double norm = ket.norm();
        if (!(norm > 0.0)) {
            throw_domain("normalization", "zero ket");
        }
        return from_matrix(ket_bra(ket / norm));
    }

    static DensityMatrix maximally_mixed(Index dim) {
        return DensityMatrix(identity(dim) / static_cast<double>(dim));
    }

    const Matrix &mat() const {
        return mat_;
    }
    Index dim() const {
        return mat_.rows();
    }
    double purity() const {
        return (mat_ * mat_).trace().real();
    }

   private:
    explicit DensityMatrix(Matrix m) : mat_(std::move(m)) {
    }
    Matrix mat_;
};

/// Ordered list of effects summing to the identity.
class Povm {
   public:
    Povm() = default;
    const std::vector<Matrix> &effects() const {
        return effects_;
    }
    const Matrix &effect(std::size_t i) const {
        return effects_.at(i);
    }
    const std::vector<std::string> &labels() const {
        return labels_;
    }
    std::size_t size() const {
        return effects_.size();
    }
    Index dim() const {
        return effects_.empty() ? 0 : effects_.front().rows();
    }

   private:
    friend Povm validate_povm(std::vector<Matrix>, std::vector<std::string>, double);
    std::vector<Matrix> effects_;
    std::vector<std::string> labels_;
};

/// Checks nonemptiness, shapes, Hermiticity, positivity and completeness;
/// throws NlabError naming the first violated invariant.
inline Povm validate_povm(std::vector<Matrix> effects, std::vector<std::string> labels = {},
                          double tolerance = kPovmTolerance) {
    if (effects.empty()) {
        throw_dimension_mismatch("a POVM needs at least one effect");
    }
    if (labels.empty()) {
        labels = default_labels(effects.size());
    }
    detail::require_labels(labels, effects.size());
    const Index dim = effects.front().rows();
    Matrix total = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const Matrix &m = effects[i];
        require_square(m, "POVM effect");
        if (m.rows() != dim) {
            throw_dimension_mismatch("POVM effect " + std::to_string(i) + " is " + shape_string(m) + ", expected " +
                                     std::to_string(dim) + "x" + std::to_string(dim));
        }
        detail::require_finite(m, "POVM effect " + std::to_string(i));
        const double herm = hermiticity_residual(m);
        if (herm > tolerance) {
            throw_violation("hermiticity", "POVM effect " + std::to_string(i) + " is not Hermitian", herm);
        }
        const double lowest = hermitian_eig(m).smallest();
        if (lowest < -tolerance) {
            throw_violation("positivity", "POVM effect " + std::to_string(i) + " has a negative eigenvalue", -lowest);
        }
        total += m;
    }
    const double completeness = max_abs_diff(total, identity(dim));
    if (completeness > tolerance) {
        throw_violation("completeness", "POVM effects do not sum to the identity", completeness);
    }
    Povm out;
    for (Matrix &m : effects) {
        m = hermitian_part(m);
    }
    out.effects_ = std::move(effects);
    out.labels_ = std::move(labels);
    return out;
}

/// Mutually orthogonal projectors; `complete()` when they sum to identity.
class Pvm {
   public:
    Pvm() = default;
    const std::vector<Matrix> &projectors() const {
        return projectors_;
    }
    const Matrix &projector(std::size_t i) const {
        return projectors_.at(i);
    }
    std::size_t size() const {
        return projectors_.size();
    }
    Index dim() const {
        return projectors_.empty() ? 0 : projectors_.front().rows();
    }
    bool complete() const {
        return complete_;
    }
    /// I - sum_i Q_i.
    Matrix complement() const {
        Matrix c = identity(dim());
        for (const Matrix &q : projectors_) {
            c -= q;
        }
        return c;
    }

   private:
    friend Pvm validate_pvm(std::vector<Matrix>, double);
    std::vector<Matrix> projectors_;
    bool complete_ = false;
};

/// max_{i,j} |Q_i Q_j - delta_ij Q_i| (entrywise).
inline double pvm_orthogonality_residual(const std::vector<Matrix> &projectors) {
    double worst = 0.0;
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        for (std::size_t j = i; j < projectors.size(); ++j) {
            const Matrix prod = projectors[i] * projectors[j];
            const double r = (i == j) ? max_abs_diff(prod, projectors[i]) : prod.cwiseAbs().maxCoeff();
            worst = std::max(worst, r);
        }
    }
    return worst;
}

inline Pvm validate_pvm(std::vector<Matrix> projectors, double tolerance = kPvmTolerance) {
    if (projectors.empty()) {
        throw_dimension_mismatch("a PVM needs at least one projector");
    }
    const Index dim = projectors.front().rows();
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        require_square(projectors[i], "PVM projector");
        if (projectors[i].rows() != dim) {
            throw_dimension_mismatch("PVM projector " + std::to_string(i) + " has shape " +
                                     shape_string(projectors[i]));
        }
        detail::require_finite(projectors[i], "PVM projector " + std::to_string(i));
        const double herm = hermiticity_residual(projectors[i]);
        if (herm > tolerance) {
            throw_violation("hermiticity", "PVM projector " + std::to_string(i) + " is not Hermitian", herm);
        }
    }
    const double orth = pvm_orthogonality_residual(projectors);
    if (orth > tolerance) {
        throw_violation("orthogonality", "PVM projectors are not mutually orthogonal idempotents", orth);
    }
    Pvm out;
    for (Matrix &q : projectors) {
        q = hermitian_part(q);
    }
    out.projectors_ = std::move(projectors);
    out.complete_ = out.complement().cwiseAbs().maxCoeff() <= tolerance;
    return out;
}

/// Probability vector over labelled outcomes.
class OutcomeDistribution {
   public:
    /// Clips entries in [-1e-12, 0) to zero and renormalizes; anything more
    /// negative, or a sum off by more than 1e-9, is rejected.
    static OutcomeDistribution from_probabilities(std::vector<double> probs, std::vector<std::string> labels = {}) {
        if (probs.empty()) {
            throw_dimension_mismatch("empty distribution");
        }
        if (labels.empty()) {
            labels = default_labels(probs.size());
        }
        detail::require_labels(labels, probs.size());
        double sum = 0.0;
        for (double &p : probs) {
            if (!std::isfinite(p) || p < -kProbabilityClip) {
                throw_violation("nonnegativity", "probability " + std::to_string(p) + " is negative",
                                std::isfinite(p) ? -p : 1.0);
            }
            p = std::max(p, 0.0);
            sum += p;
        }
        if (std::abs(sum - 1.0) > kStateTolerance) {
            throw_violation("normalization", "probabilities sum to " + std::to_string(sum), std::abs(sum - 1.0));
        }
        for (double &p : probs) {
            p /= sum;
        }
        OutcomeDistribution out;
        out.probs_ = std::move(probs);
        out.labels_ = std::move(labels);
        return out;
    }

    const std::vector<double> &probs() const {
        return probs_;
    }
    double operator[](std::size_t i) const {
        return probs_.at(i);
    }
    std::size_t size() const {
        return probs_.size();
    }
    const std::vector<std::string> &labels() const {
        return labels_;
    }

   private:
    std::vector<double> probs_;
    std::vector<std::string> labels_;
};

inline OutcomeDistribution born_probabilities(const DensityMatrix &rho, const Povm &m) {
    if (rho.dim() != m.dim()) {
        throw_dimension_mismatch("state of dimension " + std::to_string(rho.dim()) + " vs POVM of dimension " +
                                 std::to_string(m.dim()));
    }
    std::vector<double> probs;
    probs.reserve(m.size());
    for (const Matrix &e : m.effects()) {
        probs.push_back((rho.mat() * e).trace().real());
    }
    return OutcomeDistribution::from_probabilities(std::move(probs), m.labels());
}

inline OutcomeDistribution born_probabilities(const DensityMatrix &rho, const Pvm &q) {
    if (rho.dim() != q.dim()) {
        throw_dimension_mismatch("state of dimension " + std::to_string(rho.dim()) + " vs PVM of dimension " +
                                 std::to_string(q.dim()));
    }
    std::vector<double> probs;
    for (const Matrix &p : q.projectors()) {
        probs.push_back((rho.mat() * p).trace().real());
    }
    return OutcomeDistribution::from_probabilities(std::move(probs));
}

/// The doubly indexed correction operators N_{l|i}, l >= 1, together with
/// the POVM they belong to (which supplies N_{0|i} = M_i).
///
/// corrections()[i][l - 1] is N_{l|i}. Outcomes may carry different numbers
/// of corrections; missing ones are zero.
class KrausCorrectionFamily {
   public:
    KrausCorrectionFamily() = default;

    const Povm &povm() const {
        return povm_;
    }
    const std::vector<std::vector<Matrix>> &corrections() const {
        return corrections_;
    }
    /// Largest l that carries an operator.
    std::size_t max_index() const {
        std::size_t l = 0;
        for (const auto &row : corrections_) {
            l = std::max(l, row.size());
        }
        return l;
    }
    /// N_{l|i} for l >= 0 (zero when absent).
    Matrix op(std::size_t i, std::size_t l) const {
        if (l == 0) {
            return povm_.effect(i);
        }
        const auto &row = corrections_.at(i);
        return l <= row.size() ? row[l - 1] : Matrix::Zero(povm_.dim(), povm_.dim());
    }

    /// Copy without the ancilla levels whose operators all have Frobenius
    /// norm <= `threshold`; remaining levels are renumbered in order.
    KrausCorrectionFamily pruned(double threshold = 1e-10) const;

   private:
    friend KrausCorrectionFamily make_correction_family(Povm, std::vector<std::vector<Matrix>>, double);
    friend KrausCorrectionFamily make_correction_family_unchecked(Povm, std::vector<std::vector<Matrix>>);
    Povm povm_;
    std::vector<std::vector<Matrix>> corrections_;
};

/// max_{i,j} || sum_{l>=1} N_{l|i}^dagger N_{l|j} - (delta_ij M_i - M_i M_j) ||_F.
inline double correction_condition_residual(const Povm &povm, const std::vector<std::vector<Matrix>> &corrections) {
    const Index dim = povm.dim();
    double worst = 0.0;
    for (std::size_t i = 0; i < povm.size(); ++i) {
        for (std::size_t j = 0; j < povm.size(); ++j) {
            Matrix lhs = Matrix::Zero(dim, dim);
            const std::size_t common = std::min(corrections[i].size(), corrections[j].size());
            for (std::size_t l = 0; l < common; ++l) {
                lhs += corrections[i][l].adjoint() * corrections[j][l];
            }
            Matrix rhs = -povm.effect(i) * povm.effect(j);
            if (i == j) {
                rhs += povm.effect(i);
            }
            worst = std::max(worst, (lhs - rhs).norm());
        }
    }
    return worst;
}

inline double correction_condition_residual(const KrausCorrectionFamily &k) {
    return correction_condition_residual(k.povm(), k.corrections());
}

namespace detail {

inline void check_correction_shapes(const Povm &povm, const std::vector<std::vector<Matrix>> &corrections) {
    if (corrections.size() != povm.size()) {
        throw_dimension_mismatch("correction family has " + std::to_string(corrections.size()) +
                                 " outcomes, POVM has " + std::to_string(povm.size()));
    }
    for (std::size_t i = 0; i < corrections.size(); ++i) {
        for (const Matrix &n : corrections[i]) {
            if (n.rows() != povm.dim() || n.cols() != povm.dim()) {
                throw_dimension_mismatch("correction operator for outcome " + std::to_string(i) + " has shape " +
                                         shape_string(n));
            }
            require_finite(n, "correction operator");
        }
    }
}

}  // namespace detail

inline KrausCorrectionFamily make_correction_family_unchecked(Povm povm, std::vector<std::vector<Matrix>> corrections) {
    detail::check_correction_shapes(povm, corrections);
    KrausCorrectionFamily out;
    out.povm_ = std::move(povm);
    out.corrections_ = std::move(corrections);
    return out;
}

/// Rejects families whose correction condition residual exceeds `tolerance`.
inline KrausCorrectionFamily make_correction_family(Povm povm, std::vector<std::vector<Matrix>> corrections,
                                                    double tolerance = kCorrectionTolerance) {
    detail::check_correction_shapes(povm, corrections);
    const double residual = correction_condition_residual(povm, corrections);
    if (!(residual <= tolerance)) {
        throw_violation("correction condition",
                        "sum_l N_{l|i}^dagger N_{l|j} does not equal delta_ij M_i - M_i M_j", residual);
    }
    KrausCorrectionFamily out;
    out.povm_ = std::move(povm);
    out.corrections_ = std::move(corrections);
    return out;
}

inline KrausCorrectionFamily KrausCorrectionFamily::pruned(double threshold) const {
    const std::size_t levels = max_index();
    std::vector<std::size_t> keep;
    for (std::size_t l = 1; l <= levels; ++l) {
        bool any = false;
        for (std::size_t i = 0; i < povm_.size(); ++i) {
            any = any || op(i, l).norm() > threshold;
        }
        if (any) {
            keep.push_back(l);
        }
    }
    std::vector<std::vector<Matrix>> rows(povm_.size());
    for (std::size_t i = 0; i < povm_.size(); ++i) {
        for (std::size_t l : keep) {
            rows[i].push_back(op(i, l));
        }
    }
    return make_correction_family_unchecked(povm_, std::move(rows));
}

// ---------------------------------------------------------------------------
// Seeded random ensembles. Every generator owns its engine; equal seeds give
// bit-identical output.

/// splitmix64 finalizer, used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt = 0) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
inline Matrix ginibre(Index rows, Index cols, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Matrix g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

/// Haar unitary from the QR decomposition of a Ginibre matrix, with the
/// phases of R's diagonal moved into Q.
inline Matrix random_unitary(Index dim, std::uint64_t seed) {
    if (dim < 1) {
        throw_domain("dimension", "random_unitary needs dim >= 1");
    }
    std::mt19937_64 rng(mix_seed(seed, 0x11));
    const Matrix g = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * identity(dim);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        const double mag = std::abs(d);
        q.col(k) *= (mag > 0.0) ? d / mag : Complex(1.0);
    }
    return q;
}

/// Reduction of a Haar-random pure state on C^dim (x) C^rank.
inline DensityMatrix random_density(Index dim, Index rank, std::uint64_t seed) {
    if (rank < 1 || rank > dim) {
        throw_domain("rank", "random_density needs 1 <= rank <= dim");
    }
    std::mt19937_64 rng(mix_seed(seed, 0x22));
    const Matrix g = ginibre(dim, rank, rng);
    const Matrix rho = g * g.adjoint();
    return DensityMatrix::from_matrix(rho / real_trace(rho));
}

inline Vector random_ket(Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 0x33));
    const Matrix g = ginibre(dim, 1, rng);
    return g.col(0) / g.col(0).norm();
}

/// M_i = V^dagger (1 (x) |i><i|) V for a Haar isometry V: C^dim -> C^dim (x) C^n.
inline Povm random_povm(Index dim, Index n_outcomes, std::uint64_t seed) {
    if (n_outcomes < 1 || dim < 1) {
        throw_domain("outcomes", "random_povm needs dim >= 1 and n_outcomes >= 1");
    }
    const Matrix u = random_unitary(dim * n_outcomes, mix_seed(seed, 0x44));
    const Matrix v = u.leftCols(dim);
    std::vector<Matrix> effects;
    for (Index i = 0; i < n_outcomes; ++i) {
        const Matrix pointer = tensor_product(identity(dim), basis_projector(n_outcomes, i));
        effects.push_back(hermitian_part(v.adjoint() * pointer * v));
    }
    return validate_povm(std::move(effects));
}

}  // namespace nlab

#endif
