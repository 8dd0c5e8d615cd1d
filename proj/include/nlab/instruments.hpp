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

// State-update rules (quantum instruments).
//
// Every rule is first expressed as a linear map on arbitrary operators that
// returns one unnormalized branch per outcome; apply_* then evaluates it on a
// density matrix and checks trace bookkeeping.

#ifndef NLAB_INSTRUMENTS_HPP
#define NLAB_INSTRUMENTS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlab/dilation.hpp"

namespace nlab {

/// Below this weight a branch has no defined post-measurement state.
inline constexpr double kZeroProbability = 1e-12;

struct Branch {
    std::string label;
    Matrix state;  // unnormalized, Tr(state) == probability
    double probability = 0.0;

    /// Normalized post-measurement state; empty for a null branch.
    std::optional<DensityMatrix> normalized() const {
        if (probability <= kZeroProbability) {
            return std::nullopt;
        }
        return DensityMatrix::from_unnormalized(hermitian_part(state));
    }
};

struct InstrumentOutput {
    std::vector<Branch> branches;
    DensityMatrix average = DensityMatrix::maximally_mixed(1);

    OutcomeDistribution distribution() const {
        std::vector<double> probs;
        std::vector<std::string> labels;
        for (const Branch &b : branches) {
            probs.push_back(b.probability);
            labels.push_back(b.label);
        }
        return OutcomeDistribution::from_probabilities(std::move(probs), std::move(labels));
    }
};

/// Branch operators of an instrument for an arbitrary input operator.
using InstrumentMap = std::function<std::vector<Matrix>(const Matrix &)>;

inline InstrumentOutput assemble_output(const std::vector<Matrix> &states, const std::vector<std::string> &labels) {
    if (states.size() != labels.size()) {
        throw_dimension_mismatch("branch count does not match label count");
    }
    InstrumentOutput out;
    Matrix total = Matrix::Zero(states.front().rows(), states.front().cols());
    double sum = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        Branch b;
        b.label = labels[i];
        b.state = hermitian_part(states[i]);
        b.probability = real_trace(b.state);
        if (b.probability < -kProbabilityClip) {
            throw_violation("nonnegativity", "branch " + labels[i] + " has negative weight", -b.probability);
        }
        b.probability = std::max(b.probability, 0.0);
        sum += b.probability;
        total += b.state;
        out.branches.push_back(std::move(b));
    }
    if (std::abs(sum - 1.0) > kStateTolerance) {
        throw_violation("trace preservation", "branch weights sum to " + std::to_string(sum), std::abs(sum - 1.0));
    }
    out.average = DensityMatrix::from_matrix(total);
    return out;
}

// ---------------------------------------------------------------------------
// Branch maps.

/// X -> Q_i X Q_i.
inline InstrumentMap projective_map(const Pvm &q) {
    return [q](const Matrix &x) {
        std::vector<Matrix> out;
        for (const Matrix &p : q.projectors()) {
            out.push_back(p * x * p);
        }
        return out;
    };
}

/// X -> sqrt(M_i) X sqrt(M_i).
inline InstrumentMap luders_map(const Povm &m) {
    std::vector<Matrix> roots;
    for (const Matrix &e : m.effects()) {
        roots.push_back(sqrt_psd(e));
    }
    return [roots](const Matrix &x) {
        std::vector<Matrix> out;
        for (const Matrix &r : roots) {
            out.push_back(r * x * r);
        }
        return out;
    };
}

/// X -> Tr_a(U_i Q_i (X (x) rho_a) Q_i U_i^dagger); an empty `post` means
/// U_i = 1 for every outcome.
inline InstrumentMap general_map(const NaimarkDilation &d, const std::vector<Matrix> &post = {}) {
    std::vector<Matrix> ops;
    for (std::size_t i = 0; i < d.size(); ++i) {
        ops.push_back(post.empty() ? d.pvm().projector(i) : Matrix(post[i] * d.pvm().projector(i)));
    }
    const Matrix anc = d.ancilla_state().mat();
    const Index ds = d.dim_s();
    const Index da = d.dim_a();
    return [ops, anc, ds, da](const Matrix &x) {
        const Matrix joint = tensor_product(x, anc);
        std::vector<Matrix> out;
        for (const Matrix &k : ops) {
            out.push_back(partial_trace_ancilla(k * joint * k.adjoint(), ds, da));
        }
        return out;
    };
}

/// X -> M_i X M_i + sum_{l>=1} N_{l|i} X N_{l|i}^dagger.
inline InstrumentMap opsum_map(const KrausCorrectionFamily &k) {
    return [k](const Matrix &x) {
        std::vector<Matrix> out;
        for (std::size_t i = 0; i < k.povm().size(); ++i) {
            const Matrix &m = k.povm().effect(i);
            Matrix acc = m * x * m;
            for (const Matrix &n : k.corrections()[i]) {
                acc += n * x * n.adjoint();
            }
            out.push_back(std::move(acc));
        }
        return out;
    };
}

/// X -> Tr_a(P_i U (X (x) |a><a|) U^dagger P_i), the coupling-then-readout rule.
inline InstrumentMap coupling_map(const CouplingModel &c) {
    validate_coupling(c);
    std::vector<Matrix> ops;
    for (const Matrix &p : c.pointers) {
        ops.push_back(p * c.unitary);
    }
    const Matrix anc = ket_bra(c.ancilla_ket);
    const Index ds = c.dim_s;
    const Index da = c.dim_a;
    return [ops, anc, ds, da](const Matrix &x) {
        const Matrix joint = tensor_product(x, anc);
        std::vector<Matrix> out;
        for (const Matrix &k : ops) {
            out.push_back(partial_trace_ancilla(k * joint * k.adjoint(), ds, da));
        }
        return out;
    };
}

/// Choi operators sum_{jk} |j><k| (x) E_i(|j><k|), one per branch.
inline std::vector<Matrix> choi_matrices(const InstrumentMap &map, Index dim) {
    std::vector<Matrix> out;
    for (Index j = 0; j < dim; ++j) {
        for (Index k = 0; k < dim; ++k) {
            Matrix unit = Matrix::Zero(dim, dim);
            unit(j, k) = 1.0;
            const std::vector<Matrix> images = map(unit);
            if (out.empty()) {
                out.assign(images.size(), Matrix::Zero(dim * images.front().rows(), dim * images.front().cols()));
            }
            for (std::size_t i = 0; i < images.size(); ++i) {
                out[i] += tensor_product(unit, images[i]);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rules on density matrices.

namespace detail {

inline void require_dim(const DensityMatrix &rho, Index dim, const char *what) {
    if (rho.dim() != dim) {
        throw_dimension_mismatch(std::string(what) + " acts on dimension " + std::to_string(dim) +
                                 ", state has dimension " + std::to_string(rho.dim()));
    }
}

}  // namespace detail

inline InstrumentOutput apply_projective(const DensityMatrix &rho, const Pvm &q) {
    detail::require_dim(rho, q.dim(), "PVM");
    return assemble_output(projective_map(q)(rho.mat()), default_labels(q.size()));
}

inline InstrumentOutput apply_luders(const DensityMatrix &rho, const Povm &m) {
    detail::require_dim(rho, m.dim(), "POVM");
    return assemble_output(luders_map(m)(rho.mat()), m.labels());
}

/// Post-unitaries act on the joint space, one per outcome.
inline InstrumentOutput apply_general(const DensityMatrix &rho, const NaimarkDilation &d,
                                      const std::vector<Matrix> &post_unitaries) {
    detail::require_dim(rho, d.dim_s(), "dilation");
    if (post_unitaries.size() != d.size()) {
        throw_dimension_mismatch("need one post-unitary per outcome, got " + std::to_string(post_unitaries.size()));
    }
    for (std::size_t i = 0; i < post_unitaries.size(); ++i) {
        require_bipartite(post_unitaries[i], d.dim_s(), d.dim_a());
        const double r = unitarity_residual(post_unitaries[i]);
        if (r > kUnitaryTolerance) {
            throw_violation("unitarity", "post-unitary " + std::to_string(i) + " is not unitary", r);
        }
    }
    return assemble_output(general_map(d, post_unitaries)(rho.mat()), d.labels());
}

inline InstrumentOutput apply_intrinsic_trace(const DensityMatrix &rho, const NaimarkDilation &d) {
    detail::require_dim(rho, d.dim_s(), "dilation");
    return assemble_output(general_map(d)(rho.mat()), d.labels());
}

inline InstrumentOutput apply_intrinsic_opsum(const DensityMatrix &rho, const KrausCorrectionFamily &k) {
    detail::require_dim(rho, k.povm().dim(), "correction family");
    const double residual = correction_condition_residual(k);
    if (!(residual <= kCorrectionTolerance)) {
        throw_violation("correction condition", "family does not satisfy the correction condition", residual);
    }
    return assemble_output(opsum_map(k)(rho.mat()), k.povm().labels());
}

inline InstrumentOutput apply_textbook(const DensityMatrix &rho, const CouplingModel &c) {
    detail::require_dim(rho, c.dim_s, "coupling");
    return assemble_output(coupling_map(c)(rho.mat()), c.labels.empty() ? default_labels(c.pointers.size()) : c.labels);
}

/// Largest Frobenius distance between corresponding branches.
inline double branch_distance(const InstrumentOutput &a, const InstrumentOutput &b) {
    if (a.branches.size() != b.branches.size()) {
        throw_dimension_mismatch("instrument outputs differ in outcome count");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        worst = std::max(worst, (a.branches[i].state - b.branches[i].state).norm());
    }
    return worst;
}

}  // namespace nlab

#endif
