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

// Worked fixtures: the Ivanovic-Dieks-Peres unambiguous discrimination
// measurement with two couplings, and a seven-outcome qutrit POVM realized by
// nine product projectors with a maximally mixed ancilla.

#ifndef NLAB_SCENARIOS_HPP
#define NLAB_SCENARIOS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nlab/relations.hpp"

namespace nlab {

// ---------------------------------------------------------------------------
// IDP measurement.

/// Three-outcome qubit POVM that unambiguously discriminates
/// cos(theta)|0> +- sin(theta)|1>, tan(theta) = cos(beta):
/// M_0 = sin^2(beta)|0><0|, M_{1,2} = |psi_+-><psi_+-|,
/// |psi_+-> = (tan(theta)|0> +- |1>)/sqrt(2).
struct IdpFixture {
    double beta = 0.0;
    double theta = 0.0;
    Povm povm;
    CouplingModel coupling_qutrit;  // ancilla dimension 3
    CouplingModel coupling_qubit;   // ancilla dimension 2
    NaimarkDilation dilation_qutrit;
    NaimarkDilation dilation_qubit;

    /// The discriminated pure states, index 0 for "+", 1 for "-".
    Vector discriminated(int sign_index) const {
        Vector v(2);
        v << std::cos(theta), (sign_index == 0 ? 1.0 : -1.0) * std::sin(theta);
        return v;
    }
    Vector psi(int sign_index) const {
        Vector v(2);
        v << std::cos(beta), (sign_index == 0 ? 1.0 : -1.0);
        return v / std::sqrt(2.0);
    }

    /// Closed-form intrinsic branches:
    ///   J_0 = s^2 <0|rho|0> (s^2 |0><0| + c^2 |1><1|)
    ///   J_k = <psi|rho|psi> (|psi><psi| + (s^2/2) |1><1|),  psi = psi_+ or psi_-
    /// with s = sin(beta), c = cos(beta).
    std::vector<Matrix> closed_form(const DensityMatrix &rho) const {
        const double s2 = std::sin(beta) * std::sin(beta);
        const double c2 = std::cos(beta) * std::cos(beta);
        std::vector<Matrix> out;
        Matrix j0 = Matrix::Zero(2, 2);
        j0(0, 0) = s2;
        j0(1, 1) = c2;
        out.push_back(s2 * rho.mat()(0, 0).real() * j0);
        for (int k = 0; k < 2; ++k) {
            const Vector p = psi(k);
            const double weight = p.dot(rho.mat() * p).real();
            out.push_back(weight * (ket_bra(p) + 0.5 * s2 * basis_projector(2, 1)));
        }
        return out;
    }
};

namespace detail {

/// The inverse coupling U^dagger on qubit (x) qutrit as it is usually printed,
/// in ancilla-major order (row index a * 2 + s).
inline Matrix idp_qutrit_inverse_printed(double beta) {
    const double s = std::sin(beta);
    const double c = std::cos(beta);
    const double r = 1.0 / std::sqrt(2.0);
    Matrix m = Matrix::Zero(6, 6);
    m(0, 0) = s;
    m(0, 2) = c * r;
    m(0, 4) = c * r;
    m(1, 2) = r;
    m(1, 4) = -r;
    m(2, 1) = 1.0;
    m(3, 0) = -c;
    m(3, 2) = s * r;
    m(3, 4) = s * r;
    m(4, 3) = 1.0;
    m(5, 5) = 1.0;
    return m;
}

/// Two-qubit inverse coupling in ancilla-major order.
inline Matrix idp_qubit_inverse_printed(double beta) {
    const double s = std::sin(beta);
    const double c = std::cos(beta);
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = s;
    m(0, 3) = c;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 0) = -c;
    m(3, 3) = s;
    return m;
}

}  // namespace detail

/// beta must lie strictly inside (0, pi/2).
inline IdpFixture build_idp(double beta) {
    if (!(beta > 0.0 && beta < std::numbers::pi / 2.0)) {
        throw_domain("IDP angle", "beta must lie in the open interval (0, pi/2), got " + std::to_string(beta));
    }
    const std::vector<std::string> labels = {"0", "1", "2"};

    CouplingModel qutrit;
    qutrit.unitary = from_ancilla_slow(detail::idp_qutrit_inverse_printed(beta), 2, 3).adjoint();
    qutrit.ancilla_ket = basis_ket(3, 0);
    qutrit.pointers = ancilla_pointers(2, 3);
    qutrit.dim_s = 2;
    qutrit.dim_a = 3;
    qutrit.labels = labels;

    // Outcome 0 reads the ancilla in |0>; outcomes 1 and 2 read |1>_a together
    // with the system in |+> or |->.
    CouplingModel qubit;
    qubit.unitary = from_ancilla_slow(detail::idp_qubit_inverse_printed(beta), 2, 2).adjoint();
    qubit.ancilla_ket = basis_ket(2, 0);
    Vector plus(2), minus(2);
    plus << 1.0, 1.0;
    minus << 1.0, -1.0;
    qubit.pointers = {tensor_product(identity(2), basis_projector(2, 0)),
                      tensor_product(ket_bra(plus / std::sqrt(2.0)), basis_projector(2, 1)),
                      tensor_product(ket_bra(minus / std::sqrt(2.0)), basis_projector(2, 1))};
    qubit.dim_s = 2;
    qubit.dim_a = 2;
    qubit.labels = labels;

    const double s = std::sin(beta);
    const double c = std::cos(beta);
    Vector psi_plus(2), psi_minus(2);
    psi_plus << c / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    psi_minus << c / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    Povm povm = validate_povm({s * s * basis_projector(2, 0), ket_bra(psi_plus), ket_bra(psi_minus)}, labels);

    NaimarkDilation d_qutrit = dilation_from_coupling(qutrit);
    NaimarkDilation d_qubit = dilation_from_coupling(qubit);
    for (const NaimarkDilation *d : {&d_qutrit, &d_qubit}) {
        const double err = povm_distance(reduce_to_povm(*d), povm);
        if (err > kPovmTolerance) {
            throw_violation("reduction", "IDP coupling does not reduce to the IDP POVM", err);
        }
    }
    return IdpFixture{beta,
                      std::atan(c),
                      std::move(povm),
                      std::move(qutrit),
                      std::move(qubit),
                      std::move(d_qutrit),
                      std::move(d_qubit)};
}

// ---------------------------------------------------------------------------
// Seven-outcome POVM and repeatability.

/// Nine orthonormal product vectors |Phi_k> on qutrit (x) qutrit, grouped into
/// seven outcomes {0}, {1,2}, {3,4}, {5}, {6}, {7}, {8}; with ancilla 1/3 the
/// reduction is {a_i |phi_i><phi_i|} with a = (1, 2, 2, 1, 1, 1, 1)/3.
struct SevenOutcomeFixture {
    std::vector<Vector> phi;  // the seven system vectors
    std::vector<double> weights;
    std::vector<Vector> joint_vectors;  // the nine |Phi_k>
    NaimarkDilation fine;               // nine rank-one projectors, ancilla 1/3
    std::vector<std::size_t> grouping;  // fine index -> outcome
    Povm povm;                          // seven outcomes
    std::vector<std::string> labels;    // "1" .. "7"
};

namespace detail {

inline Vector qutrit_ket(double c0, double c1, double c2) {
    Vector v(3);
    v << c0, c1, c2;
    return v / v.norm();
}

}  // namespace detail

inline SevenOutcomeFixture build_seven_outcome() {
    using detail::qutrit_ket;
    const Vector k0 = qutrit_ket(1, 0, 0), k1 = qutrit_ket(0, 1, 0), k2 = qutrit_ket(0, 0, 1);
    const Vector p01 = qutrit_ket(1, 1, 0), m01 = qutrit_ket(1, -1, 0);
    const Vector p12 = qutrit_ket(0, 1, 1), m12 = qutrit_ket(0, 1, -1);

    std::vector<Vector> phi = {k1, k0, k2, p12, m12, p01, m01};
    std::vector<double> weights = {1.0 / 3, 2.0 / 3, 2.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3};
    std::vector<Vector> joint = {tensor_product(k1, k1),  tensor_product(k0, p01), tensor_product(k0, m01),
                                 tensor_product(k2, p12), tensor_product(k2, m12), tensor_product(p12, k0),
                                 tensor_product(m12, k0), tensor_product(p01, k2), tensor_product(m01, k2)};
    std::vector<std::size_t> grouping = {0, 1, 1, 2, 2, 3, 4, 5, 6};
    std::vector<std::string> labels;
    for (int i = 1; i <= 7; ++i) {
        labels.push_back(std::to_string(i));
    }

    std::vector<Matrix> projectors;
    std::vector<std::string> fine_labels;
    for (const Vector &v : joint) {
        projectors.push_back(ket_bra(v));
        fine_labels.push_back("Q" + std::to_string(fine_labels.size() + 1));
    }
    NaimarkDilation fine =
        make_dilation(DensityMatrix::maximally_mixed(3), std::move(projectors), 3, 3, std::move(fine_labels));

    std::vector<Matrix> effects;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        effects.push_back(weights[i] * ket_bra(phi[i]));
    }
    Povm povm = validate_povm(std::move(effects), labels);
    return SevenOutcomeFixture{std::move(phi),      std::move(weights), std::move(joint), std::move(fine),
                               std::move(grouping), std::move(povm),    std::move(labels)};
}

/// Sums fine effects (or projectors) into coarse outcomes.
inline std::vector<Matrix> group_operators(const std::vector<Matrix> &fine, const std::vector<std::size_t> &grouping) {
    if (fine.size() != grouping.size()) {
        throw_dimension_mismatch("grouping length does not match the number of fine outcomes");
    }
    const std::size_t n = *std::max_element(grouping.begin(), grouping.end()) + 1;
    std::vector<Matrix> out(n, Matrix::Zero(fine.front().rows(), fine.front().cols()));
    for (std::size_t k = 0; k < fine.size(); ++k) {
        out[grouping[k]] += fine[k];
    }
    return out;
}

/// Fine-grained effects Tr_a(Q_k (1 (x) sigma_a)) of a dilation's projectors
/// against an arbitrary ancilla state (no completeness check).
inline std::vector<Matrix> fine_effects(const NaimarkDilation &d, const DensityMatrix &ancilla) {
    const Matrix root = tensor_product(identity(d.dim_s()), sqrt_psd(ancilla.mat()));
    std::vector<Matrix> out;
    for (const Matrix &q : d.pvm().projectors()) {
        out.push_back(hermitian_part(partial_trace_ancilla(root * q * root, d.dim_s(), d.dim_a())));
    }
    return out;
}

struct RepeatabilityResult {
    Povm first_round;
    double outcome_probability = 0.0;
    DensityMatrix conditional_ancilla;
    std::vector<Matrix> second_round_fine;  // one per fine projector
    Povm second_round;
    std::vector<double> differences;  // ||M'_i - M_i||_F per outcome
    double max_difference = 0.0;
};

/// Measures the fine PVM on rho (x) rho_a, keeps the branches of the coarse
/// outcome `first_outcome`, takes the ancilla marginal of the normalized
/// result and reduces the same PVM against it.
inline RepeatabilityResult run_repeatability(const NaimarkDilation &fine, const std::vector<std::size_t> &grouping,
                                             const std::vector<std::string> &labels, const DensityMatrix &rho,
                                             std::size_t first_outcome) {
    if (rho.dim() != fine.dim_s()) {
        throw_dimension_mismatch("state dimension does not match the dilation");
    }
    const std::vector<Matrix> first_effects = group_operators(fine_effects(fine, fine.ancilla_state()), grouping);
    if (first_outcome >= first_effects.size()) {
        throw_domain("outcome", "no outcome with index " + std::to_string(first_outcome));
    }
    Povm first = validate_povm(first_effects, labels);

    const Matrix joint = tensor_product(rho.mat(), fine.ancilla_state().mat());
    Matrix conditioned = Matrix::Zero(joint.rows(), joint.cols());
    for (std::size_t k = 0; k < grouping.size(); ++k) {
        if (grouping[k] == first_outcome) {
            const Matrix &q = fine.pvm().projector(k);
            conditioned += q * joint * q;
        }
    }
    const double p = real_trace(conditioned);
    if (!(p > kZeroProbability)) {
        throw_domain("conditioning", "outcome " + labels.at(first_outcome) + " has zero probability");
    }
    DensityMatrix ancilla =
        DensityMatrix::from_unnormalized(hermitian_part(partial_trace_system(conditioned, fine.dim_s(), fine.dim_a())));
    std::vector<Matrix> second_fine = fine_effects(fine, ancilla);
    Povm second = validate_povm(group_operators(second_fine, grouping), labels);

    std::vector<double> diffs;
    double worst = 0.0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        diffs.push_back((second.effect(i) - first.effect(i)).norm());
        worst = std::max(worst, diffs.back());
    }
    return RepeatabilityResult{std::move(first),       p,
                               std::move(ancilla),     std::move(second_fine),
                               std::move(second),      std::move(diffs),
                               worst};
}

inline RepeatabilityResult run_repeatability(const SevenOutcomeFixture &f, std::size_t first_outcome,
                                             const DensityMatrix &rho = DensityMatrix::maximally_mixed(3)) {
    return run_repeatability(f.fine, f.grouping, f.labels, rho, first_outcome);
}

/// Commonly quoted second-round effects for the first outcome, one per fine
/// projector: |1><1|, |0><0|/2 twice, |2><2|/2 twice, then zeros.
inline std::vector<Matrix> seven_outcome_quoted_second_round() {
    std::vector<Matrix> out(9, Matrix::Zero(3, 3));
    out[0] = basis_projector(3, 1);
    out[1] = out[2] = 0.5 * basis_projector(3, 0);
    out[3] = out[4] = 0.5 * basis_projector(3, 2);
    return out;
}

/// One row per fine projector comparing the quoted second-round effect with
/// the effect computed from the true conditional ancilla state and from the
/// ancilla |0><0| (the post-measurement ancilla sometimes stated for the
/// first outcome).
struct RepeatabilityFinding {
    std::string projector;
    Matrix quoted;
    Matrix from_conditional;
    Matrix from_ancilla_zero;
    double deviation_conditional = 0.0;
    double deviation_ancilla_zero = 0.0;
};

inline std::vector<RepeatabilityFinding> seven_outcome_findings(const SevenOutcomeFixture &f,
                                                                const RepeatabilityResult &first_outcome_run) {
    const std::vector<Matrix> quoted = seven_outcome_quoted_second_round();
    const std::vector<Matrix> zero = fine_effects(f.fine, DensityMatrix::pure(basis_ket(3, 0)));
    std::vector<RepeatabilityFinding> out;
    for (std::size_t k = 0; k < quoted.size(); ++k) {
        RepeatabilityFinding row;
        row.projector = f.fine.labels()[k];
        row.quoted = quoted[k];
        row.from_conditional = first_outcome_run.second_round_fine[k];
        row.from_ancilla_zero = zero[k];
        row.deviation_conditional = (row.quoted - row.from_conditional).norm();
        row.deviation_ancilla_zero = (row.quoted - row.from_ancilla_zero).norm();
        out.push_back(std::move(row));
    }
    return out;
}

/// Qubit PVM {|0><0|, |1><1|} (x) 1_a with a pure ancilla; repeating it
/// reproduces the same POVM exactly.
inline NaimarkDilation repeatable_control_dilation() {
    return make_dilation(DensityMatrix::pure(basis_ket(2, 0)),
                         {tensor_product(basis_projector(2, 0), identity(2)),
                          tensor_product(basis_projector(2, 1), identity(2))},
                         2, 2);
}

}  // namespace nlab

#endif
