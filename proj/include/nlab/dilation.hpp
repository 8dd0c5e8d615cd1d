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

// Naimark dilations of POVMs and their correction families.
//
// A dilation is an ancilla state rho_a together with orthogonal projectors
// Q_i on H_s (x) H_a such that M_i = Tr_a(Q_i (1 (x) rho_a)). Each dilation
// with a pure ancilla determines operators N_{l|i} = <l|_a Q_i |0>_a (l >= 1,
// |0>_a the ancilla state) obeying
//
//     sum_{l>=1} N_{l|i}^dagger N_{l|j} = delta_ij M_i - M_i M_j,
//
// and every family obeying that identity comes from some dilation.

#ifndef NLAB_DILATION_HPP
#define NLAB_DILATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "nlab/qobjects.hpp"

namespace nlab {

inline constexpr double kPurityTolerance = 1e-9;
inline constexpr double kConstructionTolerance = 1e-8;
inline constexpr double kUnitaryTolerance = 1e-10;

class NaimarkDilation {
   public:
    const DensityMatrix &ancilla_state() const {
        return ancilla_;
    }
    /// Outcome projectors, one per POVM element.
    const Pvm &pvm() const {
        return pvm_;
    }
    /// Leftover projector 1 - sum_i Q_i; a non-outcome block, zero when the
    /// outcome projectors are already complete.
    const Matrix &completion() const {
        return completion_;
    }
    bool has_completion() const {
        return completion_.cwiseAbs().maxCoeff() > kPvmTolerance;
    }
    /// Outcome projectors followed by the completion block when present.
    std::vector<Matrix> all_projectors() const {
        std::vector<Matrix> all = pvm_.projectors();
        if (has_completion()) {
            all.push_back(completion_);
        }
        return all;
    }
    const std::vector<std::string> &labels() const {
        return labels_;
    }
    Index dim_s() const {
        return dim_s_;
    }
    Index dim_a() const {
        return dim_a_;
    }
    std::size_t size() const {
        return pvm_.size();
    }
    bool ancilla_is_pure() const {
        return hermitian_eig(ancilla_.mat()).largest() >= 1.0 - kPurityTolerance;
    }

   private:
    friend NaimarkDilation make_dilation(DensityMatrix, std::vector<Matrix>, Index, Index, std::vector<std::string>);
    NaimarkDilation(DensityMatrix ancilla, Pvm pvm, Matrix completion, std::vector<std::string> labels, Index dim_s,
                    Index dim_a)
        : ancilla_(std::move(ancilla)),
          pvm_(std::move(pvm)),
          completion_(std::move(completion)),
          labels_(std::move(labels)),
          dim_s_(dim_s),
          dim_a_(dim_a) {
    }

    DensityMatrix ancilla_;
    Pvm pvm_;
    Matrix completion_;
    std::vector<std::string> labels_;
    Index dim_s_ = 0;
    Index dim_a_ = 0;
};

/// Validates the projectors (orthogonality, dimensions) and computes the
/// completion block.
inline NaimarkDilation make_dilation(DensityMatrix ancilla, std::vector<Matrix> projectors, Index dim_s, Index dim_a,
                                     std::vector<std::string> labels = {}) {
    if (ancilla.dim() != dim_a) {
        throw_dimension_mismatch("ancilla state has dimension " + std::to_string(ancilla.dim()) + ", expected " +
                                 std::to_string(dim_a));
    }
    for (const Matrix &q : projectors) {
        require_bipartite(q, dim_s, dim_a);
    }
    if (labels.empty()) {
        labels = default_labels(projectors.size());
    }
    if (labels.size() != projectors.size()) {
        throw_dimension_mismatch("dilation label count does not match projector count");
    }
    Pvm pvm = validate_pvm(std::move(projectors), kConstructionTolerance);
    Matrix completion = pvm.complement();
    if (pvm.complete()) {
        completion.setZero();
    } else {
        const double idem = max_abs_diff(completion * completion, completion);
        if (idem > kConstructionTolerance) {
            throw_violation("orthogonality", "completion block is not a projector", idem);
        }
    }
    return NaimarkDilation(std::move(ancilla), std::move(pvm), std::move(completion), std::move(labels), dim_s,
                           dim_a);
}

/// M_i = Tr_a((1 (x) sqrt(rho_a)) Q_i (1 (x) sqrt(rho_a))).
inline Povm reduce_to_povm(const NaimarkDilation &d) {
    const Matrix root = tensor_product(identity(d.dim_s()), sqrt_psd(d.ancilla_state().mat()));
    std::vector<Matrix> effects;
    effects.reserve(d.size());
    for (const Matrix &q : d.pvm().projectors()) {
        effects.push_back(hermitian_part(partial_trace_ancilla(root * q * root, d.dim_s(), d.dim_a())));
    }
    return validate_povm(std::move(effects), d.labels());
}

/// Largest entrywise deviation between two POVMs of equal shape.
inline double povm_distance(const Povm &a, const Povm &b) {
    if (a.size() != b.size() || a.dim() != b.dim()) {
        throw_dimension_mismatch("POVMs differ in shape");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, max_abs_diff(a.effect(i), b.effect(i)));
    }
    return worst;
}

/// Replaces a mixed ancilla sum_k p_k |k><k| by the purification
/// sum_k sqrt(p_k) |k>|k'> on H_a (x) H_a', with Q_i -> Q_i (x) 1_a'.
/// Pure ancillas are returned unchanged.
inline NaimarkDilation purify_ancilla(const NaimarkDilation &d) {
    if (d.ancilla_is_pure()) {
        return d;
    }
    const HermitianSpectrum spec = hermitian_eig(d.ancilla_state().mat());
    const Index rank = spec.rank();
    const Index da = d.dim_a();
    Vector psi = Vector::Zero(da * rank);
    for (Index k = 0; k < rank; ++k) {
        psi += std::sqrt(std::max(spec.eigenvalues(k), 0.0)) *
               tensor_product(Vector(spec.eigenvectors.col(k)), basis_ket(rank, k));
    }
    std::vector<Matrix> projectors;
    for (const Matrix &q : d.pvm().projectors()) {
        projectors.push_back(tensor_product(q, identity(rank)));
    }
    return make_dilation(DensityMatrix::pure(psi), std::move(projectors), d.dim_s(), da * rank, d.labels());
}

/// Operator blocks Gamma^i_{mn} = <w_m|_a Q_i |w_n>_a in an ancilla basis
/// {w_m} whose first element is the (pure) ancilla state.
struct GammaBlocks {
    std::vector<std::vector<std::vector<Matrix>>> blocks;  // [i][m][n]
    Matrix ancilla_basis;                                  // columns w_m

    std::size_t outcomes() const {
        return blocks.size();
    }
    Index ancilla_dim() const {
        return ancilla_basis.cols();
    }
    const Matrix &at(std::size_t i, Index m, Index n) const {
        return blocks.at(i).at(m).at(n);
    }

    /// max || Gamma^i_{nm}^dagger - Gamma^i_{mn} ||_F
    double hermiticity_residual() const {
        double worst = 0.0;
        for (const auto &g : blocks) {
            for (Index m = 0; m < ancilla_dim(); ++m) {
                for (Index n = 0; n < ancilla_dim(); ++n) {
                    worst = std::max(worst, (g[n][m].adjoint() - g[m][n]).norm());
                }
            }
        }
        return worst;
    }

    /// max || sum_l Gamma^i_{ml} Gamma^j_{ln} - delta_ij Gamma^i_{mn} ||_F
    double orthogonality_residual() const {
        double worst = 0.0;
        const Index da = ancilla_dim();
        for (std::size_t i = 0; i < outcomes(); ++i) {
            for (std::size_t j = 0; j < outcomes(); ++j) {
                for (Index m = 0; m < da; ++m) {
                    for (Index n = 0; n < da; ++n) {
                        Matrix acc = Matrix::Zero(blocks[i][0][0].rows(), blocks[i][0][0].cols());
                        for (Index l = 0; l < da; ++l) {
                            acc += blocks[i][m][l] * blocks[j][l][n];
                        }
                        if (i == j) {
                            acc -= blocks[i][m][n];
                        }
                        worst = std::max(worst, acc.norm());
                    }
                }
            }
        }
        return worst;
    }
};

/// Requires a pure ancilla; see purify_ancilla.
inline GammaBlocks extract_gamma_blocks(const NaimarkDilation &d) {
    if (!d.ancilla_is_pure()) {
        throw NlabError(ErrorKind::kInvariantViolation, "ancilla purity",
                        "block extraction needs a pure ancilla; purify it first");
    }
    const HermitianSpectrum spec = hermitian_eig(d.ancilla_state().mat());
    GammaBlocks out;
    out.ancilla_basis = basis_with_first(spec.eigenvectors.col(0));
    const Index ds = d.dim_s();
    const Index da = d.dim_a();
    const Matrix frame = tensor_product(identity(ds), out.ancilla_basis);
    for (const Matrix &q : d.pvm().projectors()) {
        const Matrix rotated = frame.adjoint() * q * frame;
        std::vector<std::vector<Matrix>> g(da, std::vector<Matrix>(da));
        for (Index m = 0; m < da; ++m) {
            for (Index n = 0; n < da; ++n) {
                g[m][n] = ancilla_block(rotated, ds, da, m, n);
            }
        }
        out.blocks.push_back(std::move(g));
    }
    return out;
}

/// N_{l|i} = Gamma^i_{l0} for l = 1 .. dim_a - 1, paired with the reduced
/// POVM. Mixed ancillas are purified first. Throws if the correction
/// condition residual exceeds 1e-8.
inline KrausCorrectionFamily extract_correction_family(const NaimarkDilation &dilation) {
    const NaimarkDilation d = purify_ancilla(dilation);
    const GammaBlocks gamma = extract_gamma_blocks(d);
    Povm povm = reduce_to_povm(d);
    std::vector<std::vector<Matrix>> corrections(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (Index l = 1; l < d.dim_a(); ++l) {
            corrections[i].push_back(gamma.at(i, l, 0));
        }
    }
    return make_correction_family(std::move(povm), std::move(corrections));
}

/// Builds Q_i = sum_{l,l'} N_{l|i} M_i^+ N_{l'|i}^dagger (x) |l><l'|_a with
/// ancilla |0>_a and dim_a = (largest l) + 1. The leftover 1 - sum_i Q_i is
/// kept as the dilation's completion block.
inline NaimarkDilation canonical_dilation_from_kraus(const KrausCorrectionFamily &k) {
    const double residual = correction_condition_residual(k);
    if (!(residual <= kCorrectionTolerance)) {
        throw_violation("correction condition", "family cannot be dilated", residual);
    }
    const Povm &povm = k.povm();
    const Index ds = povm.dim();
    const Index da = static_cast<Index>(k.max_index()) + 1;
    std::vector<Matrix> projectors;
    for (std::size_t i = 0; i < povm.size(); ++i) {
        // A_i = sum_l N_{l|i} (x) |l>_a, an isometry-like map H_s -> H_s (x) H_a.
        Matrix column = Matrix::Zero(ds * da, ds);
        for (Index l = 0; l < da; ++l) {
            const Matrix n = k.op(i, static_cast<std::size_t>(l));
            for (Index s = 0; s < ds; ++s) {
                column.row(s * da + l) = n.row(s);
            }
        }
        projectors.push_back(hermitian_part(column * pseudo_inverse_on_support(povm.effect(i)) * column.adjoint()));
    }
    const double orth = pvm_orthogonality_residual(projectors);
    if (orth > kConstructionTolerance) {
        throw_violation("orthogonality", "constructed projectors are not orthogonal", orth);
    }
    NaimarkDilation out =
        make_dilation(DensityMatrix::pure(basis_ket(da, 0)), std::move(projectors), ds, da, povm.labels());
    const double reduction = povm_distance(reduce_to_povm(out), povm);
    if (reduction > kConstructionTolerance) {
        throw_violation("reduction", "constructed dilation does not reduce to the POVM", reduction);
    }
    return out;
}

/// Correction family read off the positive square root of the block matrix
/// G_{ij} = delta_ij M_i - M_i M_j (which is PSD for any POVM):
/// N_{l|j} is block (l - 1, j) of sqrt(G).
inline KrausCorrectionFamily gram_correction_family(const Povm &povm) {
    const Index d = povm.dim();
    const Index n = static_cast<Index>(povm.size());
    Matrix gram(n * d, n * d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            Matrix block = -povm.effect(i) * povm.effect(j);
            if (i == j) {
                block += povm.effect(i);
            }
            gram.block(i * d, j * d, d, d) = block;
        }
    }
    const Matrix root = sqrt_psd(hermitian_part(gram));
    std::vector<std::vector<Matrix>> corrections(n);
    for (Index j = 0; j < n; ++j) {
        for (Index l = 0; l < n; ++l) {
            corrections[j].push_back(root.block(l * d, j * d, d, d));
        }
    }
    return make_correction_family(povm, std::move(corrections));
}

// ---------------------------------------------------------------------------
// Coupling (textbook) realizations.

/// A unitary coupling of the system to an ancilla prepared in a pure state,
/// followed by a projective readout. `pointers` are projectors on the joint
/// space; the usual readout is 1_s (x) |i><i|_a (see ancilla_pointers).
struct CouplingModel {
    Matrix unitary;
    Vector ancilla_ket;
    std::vector<Matrix> pointers;
    Index dim_s = 0;
    Index dim_a = 0;
    std::vector<std::string> labels;
};

/// {1_s (x) |i><i|_a}_i.
inline std::vector<Matrix> ancilla_pointers(Index dim_s, Index dim_a) {
    std::vector<Matrix> out;
    for (Index i = 0; i < dim_a; ++i) {
        out.push_back(tensor_product(identity(dim_s), basis_projector(dim_a, i)));
    }
    return out;
}

inline void validate_coupling(const CouplingModel &c) {
    require_bipartite(c.unitary, c.dim_s, c.dim_a);
    const double unit = unitarity_residual(c.unitary);
    if (unit > kUnitaryTolerance) {
        throw_violation("unitarity", "coupling is not unitary", unit);
    }
    if (c.ancilla_ket.size() != c.dim_a) {
        throw_dimension_mismatch("ancilla ket has dimension " + std::to_string(c.ancilla_ket.size()));
    }
    const double norm = std::abs(c.ancilla_ket.norm() - 1.0);
    if (norm > kUnitaryTolerance) {
        throw_violation("normalization", "ancilla ket is not normalized", norm);
    }
    for (const Matrix &p : c.pointers) {
        require_bipartite(p, c.dim_s, c.dim_a);
    }
    if (!c.labels.empty() && c.labels.size() != c.pointers.size()) {
        throw_dimension_mismatch("coupling label count does not match pointer count");
    }
    const Pvm pvm = validate_pvm(c.pointers);
    if (!pvm.complete()) {
        throw_violation("completeness", "pointer projectors do not sum to the identity",
                        pvm.complement().cwiseAbs().maxCoeff());
    }
}

/// Heisenberg-picture readout Q_{i|H} = U^dagger P_i U with ancilla
/// |ancilla_ket><ancilla_ket|.
inline NaimarkDilation dilation_from_coupling(const CouplingModel &c) {
    validate_coupling(c);
    std::vector<Matrix> projectors;
    for (const Matrix &p : c.pointers) {
        projectors.push_back(hermitian_part(c.unitary.adjoint() * p * c.unitary));
    }
    return make_dilation(DensityMatrix::pure(c.ancilla_ket), std::move(projectors), c.dim_s, c.dim_a, c.labels);
}

/// The coupling U_sa |psi>|0>_a = sum_i sqrt(M_i)|psi>|i>_a, completed to a
/// unitary on the orthogonal complement of its range (deterministically).
inline CouplingModel luders_coupling(const Povm &povm) {
    const Index ds = povm.dim();
    const Index da = static_cast<Index>(povm.size());
    const Index dim = ds * da;
    Matrix isometry = Matrix::Zero(dim, ds);
    for (Index i = 0; i < da; ++i) {
        const Matrix root = sqrt_psd(povm.effect(i));
        for (Index s = 0; s < ds; ++s) {
            isometry.row(s * da + i) = root.row(s);
        }
    }
    const HermitianSpectrum rest = hermitian_eig(identity(dim) - isometry * isometry.adjoint());
    Matrix u(dim, dim);
    Index next = 0;
    for (Index s = 0; s < ds; ++s) {
        for (Index a = 0; a < da; ++a) {
            u.col(s * da + a) = (a == 0) ? Vector(isometry.col(s)) : Vector(rest.eigenvectors.col(next++));
        }
    }
    CouplingModel c;
    c.unitary = std::move(u);
    c.ancilla_ket = basis_ket(da, 0);
    c.pointers = ancilla_pointers(ds, da);
    c.dim_s = ds;
    c.dim_a = da;
    c.labels = povm.labels();
    return c;
}

/// Haar-random coupling on dim_s * dim_a with ancilla |0> and pointers
/// 1_s (x) |i><i|_a.
inline CouplingModel random_coupling(Index dim_s, Index dim_a, std::uint64_t seed) {
    CouplingModel c;
    c.unitary = random_unitary(dim_s * dim_a, seed);
    c.ancilla_ket = basis_ket(dim_a, 0);
    c.pointers = ancilla_pointers(dim_s, dim_a);
    c.dim_s = dim_s;
    c.dim_a = dim_a;
    c.labels = default_labels(static_cast<std::size_t>(dim_a));
    return c;
}

/// Random complete PVM of `n_outcomes` nonempty blocks on dim_s * dim_a,
/// paired with a random ancilla state of the given rank (mixed when rank > 1).
inline NaimarkDilation random_dilation(Index dim_s, Index dim_a, Index n_outcomes, Index ancilla_rank,
                                       std::uint64_t seed) {
    const Index dim = dim_s * dim_a;
    if (n_outcomes < 1 || n_outcomes > dim) {
        throw_domain("outcome count", "need between 1 and " + std::to_string(dim) + " outcomes");
    }
    const Matrix u = random_unitary(dim, mix_seed(seed, 1));
    // Column k goes to outcome k for the first n_outcomes columns, then to a
    // seeded random outcome, so every block is nonempty.
    std::mt19937_64 rng(mix_seed(seed, 2));
    std::uniform_int_distribution<Index> pick(0, n_outcomes - 1);
    std::vector<Matrix> projectors(n_outcomes, Matrix::Zero(dim, dim));
    for (Index k = 0; k < dim; ++k) {
        const Index i = k < n_outcomes ? k : pick(rng);
        projectors[i] += ket_bra(u.col(k));
    }
    for (Matrix &q : projectors) {
        q = hermitian_part(q);
    }
    return make_dilation(random_density(dim_a, ancilla_rank, mix_seed(seed, 3)), std::move(projectors), dim_s,
                         dim_a);
}

/// Columns p_i when every pointer has the form 1_s (x) |p_i><p_i|_a; throws
/// otherwise.
inline Matrix ancilla_pointer_basis(const CouplingModel &c) {
    const Index ds = c.dim_s;
    const Index da = c.dim_a;
    Matrix basis(da, static_cast<Index>(c.pointers.size()));
    for (std::size_t i = 0; i < c.pointers.size(); ++i) {
        const Matrix &p = c.pointers[i];
        const Matrix anc = partial_trace_system(p, ds, da) / static_cast<double>(ds);
        const HermitianSpectrum spec = hermitian_eig(anc);
        const double mismatch =
            std::max(max_abs_diff(p, tensor_product(identity(ds), anc)), std::abs(real_trace(anc) - 1.0));
        if (mismatch > kPvmTolerance) {
            throw NlabError(ErrorKind::kInvariantViolation, "pointer form",
                            "pointer " + std::to_string(i) + " is not of the form 1_s (x) |p><p|_a", mismatch);
        }
        basis.col(static_cast<Index>(i)) = spec.eigenvectors.col(0);
    }
    return basis;
}

enum class EBlockConvention {
    kRowIndex,       // M_i = E_{i0}^dagger E_{i0}
    kColumnIndex,  // M_i = E_{0i} E_{0i}^dagger
};

inline const char *convention_name(EBlockConvention c) {
    return c == EBlockConvention::kRowIndex ? "row-index" : "column-index";
}

/// Blocks E_{ij} = <p_i|_a U^dagger |p_j>_a of the inverse coupling in the
/// ancilla pointer basis, together with the index convention under which
/// they reproduce the reduced POVM.
struct EBlocks {
    std::vector<std::vector<Matrix>> e;  // [i][j]
    EBlockConvention convention = EBlockConvention::kRowIndex;
    double residual = 0.0;  // POVM reproduction error under `convention`

    Matrix effect(std::size_t i, EBlockConvention c) const {
        if (c == EBlockConvention::kRowIndex) {
            return e[i][0].adjoint() * e[i][0];
        }
        return e[0][i] * e[0][i].adjoint();
    }
};

/// Requires pointers of the form 1_s (x) |p_i><p_i|_a with the ancilla ket as
/// p_0. Tries the row order first, then the column order.
inline EBlocks e_block_decomposition(const CouplingModel &c) {
    validate_coupling(c);
    const Index ds = c.dim_s;
    const Index da = c.dim_a;
    if (static_cast<Index>(c.pointers.size()) != da) {
        throw_dimension_mismatch("E blocks need one rank-one ancilla pointer per ancilla level");
    }
    Matrix basis = ancilla_pointer_basis(c);
    // Align the phase of p_0 with the ancilla ket.
    const Complex overlap = basis.col(0).dot(c.ancilla_ket);
    if (std::abs(std::abs(overlap) - 1.0) > kPurityTolerance) {
        throw NlabError(ErrorKind::kInvariantViolation, "pointer form",
                        "the ancilla state must be the first pointer state");
    }
    basis.col(0) *= overlap / std::abs(overlap);

    const Matrix frame = tensor_product(identity(ds), basis);
    const Matrix rotated = frame.adjoint() * c.unitary.adjoint() * frame;
    EBlocks out;
    out.e.assign(da, std::vector<Matrix>(da));
    for (Index i = 0; i < da; ++i) {
        for (Index j = 0; j < da; ++j) {
            out.e[i][j] = ancilla_block(rotated, ds, da, i, j);
        }
    }
    const Povm reduced = reduce_to_povm(dilation_from_coupling(c));
    for (EBlockConvention conv : {EBlockConvention::kRowIndex, EBlockConvention::kColumnIndex}) {
        double worst = 0.0;
        for (std::size_t i = 0; i < reduced.size(); ++i) {
            worst = std::max(worst, max_abs_diff(out.effect(i, conv), reduced.effect(i)));
        }
        if (worst <= kConstructionTolerance) {
            out.convention = conv;
            out.residual = worst;
            return out;
        }
    }
    throw NlabError(ErrorKind::kInvariantViolation, "E-block convention",
                    "neither index convention reproduces the reduced POVM");
}

}  // namespace nlab

#endif
