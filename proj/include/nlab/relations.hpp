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

// Numerical checks of the trade-offs between measurement uncertainty,
// randomness, information gain and intrinsic disturbance.
//
// Each check produces RelationReport rows. The margin is signed so that a
// nonnegative margin always means "holds": for lhs >= rhs it is lhs - rhs,
// for lhs <= rhs it is rhs - lhs, and for equalities it is lhs - rhs and the
// row passes when |margin| is within tolerance.

#ifndef NLAB_RELATIONS_HPP
#define NLAB_RELATIONS_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlab/infometrics.hpp"

namespace nlab {

inline constexpr double kRelationTolerance = 1e-8;
inline constexpr double kPathTolerance = 1e-9;

enum class RelationKind {
    kGreaterEqual,
    kLessEqual,
    kEqual,
};

struct RelationReport {
    std::string relation;
    std::uint64_t seed = 0;
    Index dim_s = 0;
    Index dim_a = 0;
    std::optional<double> alpha;
    std::string outcome;  // set for per-outcome relations
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
};

inline RelationReport make_report(std::string relation, RelationKind kind, MetricValue lhs, MetricValue rhs,
                                  double tolerance = kRelationTolerance) {
    RelationReport r;
    r.relation = std::move(relation);
    r.lhs = lhs.as_double();
    r.rhs = rhs.as_double();
    const double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
        case RelationKind::kGreaterEqual:
        case RelationKind::kLessEqual: {
            const MetricValue &big = kind == RelationKind::kGreaterEqual ? lhs : rhs;
            const MetricValue &small = kind == RelationKind::kGreaterEqual ? rhs : lhs;
            if (!big.finite && !small.finite) {
                r.margin = 0.0;
            } else if (!big.finite) {
                r.margin = inf;
            } else if (!small.finite) {
                r.margin = -inf;
                r.note = "finite side cannot dominate an infinite side";
            } else {
                r.margin = big.value - small.value;
            }
            r.pass = r.margin >= -tolerance;
            break;
        }
        case RelationKind::kEqual:
            if (!lhs.finite || !rhs.finite) {
                r.margin = (lhs.finite == rhs.finite) ? 0.0 : inf;
                r.note = "infinite value in an equality";
            } else {
                r.margin = lhs.value - rhs.value;
            }
            r.pass = std::abs(r.margin) <= tolerance;
            break;
    }
    return r;
}

inline RelationReport skipped_report(std::string relation, std::string why) {
    RelationReport r;
    r.relation = std::move(relation);
    r.pass = true;
    r.skipped = true;
    r.note = std::move(why);
    return r;
}

/// Everything the intrinsic-rule relations need for one (state, dilation)
/// pair. Both evaluation paths of the intrinsic rule are computed; building
/// the context fails when they disagree beyond 1e-9.
struct IntrinsicContext {
    DensityMatrix rho;
    NaimarkDilation dilation;
    KrausCorrectionFamily family;
    InstrumentOutput output;  // trace path
    double path_deviation = 0.0;

    const Povm &povm() const {
        return family.povm();
    }
    const DensityMatrix &post_average() const {
        return output.average;
    }
    OutcomeDistribution distribution() const {
        return output.distribution();
    }
};

inline IntrinsicContext make_context(const DensityMatrix &rho, const NaimarkDilation &d) {
    KrausCorrectionFamily family = extract_correction_family(d);
    InstrumentOutput by_trace = apply_intrinsic_trace(rho, d);
    const InstrumentOutput by_opsum = apply_intrinsic_opsum(rho, family);
    const double deviation = branch_distance(by_trace, by_opsum);
    if (!(deviation <= kPathTolerance)) {
        throw_violation("path equivalence", "trace and operator-sum evaluations disagree", deviation);
    }
    return IntrinsicContext{rho, d, std::move(family), std::move(by_trace), deviation};
}

namespace detail {

inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

inline RelationReport with_dims(RelationReport r, const IntrinsicContext &ctx) {
    r.dim_s = ctx.dilation.dim_s();
    r.dim_a = ctx.dilation.dim_a();
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Structural checks.

inline RelationReport check_correction_condition(const KrausCorrectionFamily &k) {
    RelationReport r =
        make_report("correction_condition", RelationKind::kEqual, {correction_condition_residual(k), true}, {0, true});
    r.dim_s = k.povm().dim();
    r.dim_a = static_cast<Index>(k.max_index()) + 1;
    return r;
}

inline RelationReport check_path_equivalence(const IntrinsicContext &ctx) {
    return detail::with_dims(
        make_report("path_equivalence", RelationKind::kEqual, {ctx.path_deviation, true}, {0, true}, kPathTolerance),
        ctx);
}

/// Family -> canonical dilation -> reduction and re-extraction. lhs is the
/// worst of the reduction error, the projector orthogonality residual and the
/// re-extracted correction residual.
inline RelationReport check_dilation_roundtrip(const KrausCorrectionFamily &k) {
    const NaimarkDilation d = canonical_dilation_from_kraus(k);
    const double reduction = povm_distance(reduce_to_povm(d), k.povm());
    const double orth = pvm_orthogonality_residual(d.all_projectors());
    const double condition = correction_condition_residual(extract_correction_family(d));
    RelationReport r = make_report("dilation_roundtrip", RelationKind::kEqual,
                                   {std::max({reduction, orth, condition}), true}, {0, true});
    r.dim_s = d.dim_s();
    r.dim_a = d.dim_a();
    r.note = "reduction=" + detail::sci(reduction) + " orthogonality=" + detail::sci(orth) +
             " condition=" + detail::sci(condition);
    return r;
}

// ---------------------------------------------------------------------------
// Intrinsic-disturbance relations.

/// S(rho (x) rho_a || sum_i Q_i (rho (x) rho_a) Q_i) >= S(rho || J^N(rho)).
inline RelationReport check_randomness_disturbance(const IntrinsicContext &ctx) {
    const DensityMatrix joint =
        DensityMatrix::from_matrix(tensor_product(ctx.rho.mat(), ctx.dilation.ancilla_state().mat()));
    const MetricValue randomness = intrinsic_randomness(joint, ctx.dilation.pvm());
    const MetricValue disturbance = quantum_relative_entropy(ctx.rho, ctx.post_average());
    return detail::with_dims(
        make_report("randomness_disturbance", RelationKind::kGreaterEqual, randomness, disturbance), ctx);
}

/// p_i^alpha <= Tr[(s^g rho s^g)^alpha] with s the normalized branch state;
/// at alpha = 1/2 also p_i <= F(rho, s).
inline std::vector<RelationReport> check_gentle_family(const IntrinsicContext &ctx, const std::vector<double> &alphas) {
    std::vector<RelationReport> out;
    for (const Branch &b : ctx.output.branches) {
        const std::optional<DensityMatrix> post = b.normalized();
        for (double alpha : alphas) {
            if (!(alpha >= 0.5 && alpha < 1.0)) {
                throw_domain("Renyi order", "gentle family needs alpha in [1/2, 1), got " + std::to_string(alpha));
            }
            RelationReport r = post ? make_report("gentle_family", RelationKind::kLessEqual,
                                                  {std::pow(b.probability, alpha), true},
                                                  {sandwiched_trace(ctx.rho, *post, alpha), true})
                                    : skipped_report("gentle_family", "zero-probability outcome");
            r.alpha = alpha;
            r.outcome = b.label;
            out.push_back(detail::with_dims(std::move(r), ctx));
            if (alpha == 0.5) {
                RelationReport w = post ? make_report("winter_form", RelationKind::kLessEqual, {b.probability, true},
                                                      fidelity(ctx.rho, *post))
                                        : skipped_report("winter_form", "zero-probability outcome");
                w.alpha = alpha;
                w.outcome = b.label;
                out.push_back(detail::with_dims(std::move(w), ctx));
            }
        }
    }
    return out;
}

/// H_{1/alpha}(P) >= D_alpha(rho || J^N(rho)) per alpha, plus the alpha -> 1
/// instance H(P) >= S(rho || J^N(rho)) reported with alpha = 1.
inline std::vector<RelationReport> check_uncertainty_disturbance(const IntrinsicContext &ctx,
                                                                 const std::vector<double> &alphas) {
    const OutcomeDistribution p = ctx.distribution();
    std::vector<RelationReport> out;
    for (double alpha : alphas) {
        if (!(alpha >= 0.5 && alpha < 1.0)) {
            throw_domain("Renyi order", "uncertainty relation needs alpha in [1/2, 1), got " + std::to_string(alpha));
        }
        RelationReport r = make_report("uncertainty_disturbance", RelationKind::kGreaterEqual,
                                       renyi_entropy(p, 1.0 / alpha),
                                       sandwiched_renyi_divergence(ctx.rho, ctx.post_average(), alpha));
        r.alpha = alpha;
        out.push_back(detail::with_dims(std::move(r), ctx));
    }
    RelationReport r = make_report("shannon_disturbance", RelationKind::kGreaterEqual, shannon_entropy(p),
                                   quantum_relative_entropy(ctx.rho, ctx.post_average()));
    r.alpha = 1.0;
    out.push_back(detail::with_dims(std::move(r), ctx));
    return out;
}

/// 1 - sum_i p_i^2 >= D_tr(rho, J^N(rho))^2.
inline RelationReport check_info_disturbance(const IntrinsicContext &ctx) {
    const double d = trace_distance(ctx.rho, ctx.post_average()).value;
    return detail::with_dims(make_report("info_disturbance", RelationKind::kGreaterEqual,
                                         invariant_information(ctx.distribution()), {d * d, true}),
                             ctx);
}

/// S(rho || J^N(rho)) >= H(P_B || P'_B) for a test POVM B applied to rho and
/// to J^N(rho).
inline RelationReport check_classical_randomness(const IntrinsicContext &ctx, const Povm &test) {
    const OutcomeDistribution before = born_probabilities(ctx.rho, test);
    const OutcomeDistribution after = born_probabilities(ctx.post_average(), test);
    return detail::with_dims(make_report("classical_randomness", RelationKind::kGreaterEqual,
                                         quantum_relative_entropy(ctx.rho, ctx.post_average()),
                                         classical_relative_entropy(before, after)),
                             ctx);
}

/// D_alpha(rho || J^N(rho)) must not decrease along an increasing alpha grid.
/// lhs is the largest decrease found, as a nonpositive number.
inline RelationReport check_divergence_monotonicity(const IntrinsicContext &ctx, std::vector<double> alphas,
                                                    double tolerance = 1e-9) {
    std::sort(alphas.begin(), alphas.end());
    double worst = 0.0;
    std::optional<MetricValue> previous;
    for (double alpha : alphas) {
        const MetricValue d = sandwiched_renyi_divergence(ctx.rho, ctx.post_average(), alpha);
        if (previous && previous->finite) {
            worst = std::min(worst, d.finite ? d.value - previous->value : 0.0);
        }
        previous = d;
    }
    return detail::with_dims(
        make_report("divergence_monotonicity", RelationKind::kGreaterEqual, {worst, true}, {0, true}, tolerance), ctx);
}

/// Splits J^N(rho) = lambda rho^eta + (1 - lambda) rho^etabar with
/// lambda rho^eta = sum_i M_i rho M_i; the trace distance to rho then lies in
/// [lambda d_eta - (1 - lambda) d0, lambda d_eta + (1 - lambda) d0], d0 = 1.
struct DisturbanceBand {
    double lambda = 0.0;
    double d_eta = 0.0;
    double d0 = 1.0;
    double lower = 0.0;
    double upper = 0.0;
    double actual = 0.0;  // D_tr(rho, J^N(rho))
};

inline DisturbanceBand disturbance_band(const IntrinsicContext &ctx) {
    Matrix diagonal = Matrix::Zero(ctx.rho.dim(), ctx.rho.dim());
    for (const Matrix &m : ctx.povm().effects()) {
        diagonal += m * ctx.rho.mat() * m;
    }
    DisturbanceBand band;
    band.lambda = std::clamp(real_trace(diagonal), 0.0, 1.0);
    band.d_eta = band.lambda > kZeroProbability
                     ? trace_distance(ctx.rho, DensityMatrix::from_unnormalized(hermitian_part(diagonal))).value
                     : 0.0;
    band.lower = band.lambda * band.d_eta - (1.0 - band.lambda) * band.d0;
    band.upper = band.lambda * band.d_eta + (1.0 - band.lambda) * band.d0;
    band.actual = trace_distance(ctx.rho, ctx.post_average()).value;
    return band;
}

/// lhs = actual distance, rhs = upper edge; margin is the distance to the
/// nearer edge.
inline RelationReport check_disturbance_band(const IntrinsicContext &ctx) {
    const DisturbanceBand band = disturbance_band(ctx);
    RelationReport r;
    r.relation = "disturbance_band";
    r.lhs = band.actual;
    r.rhs = band.upper;
    r.margin = std::min(band.actual - band.lower, band.upper - band.actual);
    r.pass = r.margin >= -kRelationTolerance;
    r.note = "lambda=" + detail::sci(band.lambda) + " lower=" + detail::sci(band.lower);
    return detail::with_dims(std::move(r), ctx);
}

// ---------------------------------------------------------------------------
// Coupling realization.

/// Information gain of the coupling rule plus the readout randomness equals
/// the outcome entropy; also G + S(rho || J^N(rho)) <= H(P) for the intrinsic
/// rule of the same realization. Pointers must be 1_s (x) |p_i><p_i|_a.
inline std::vector<RelationReport> check_balance(const DensityMatrix &rho, const CouplingModel &c) {
    validate_coupling(c);
    (void)ancilla_pointer_basis(c);
    const InstrumentOutput textbook = apply_textbook(rho, c);
    const MetricValue gain = groenewold_gain(rho, textbook);
    const MetricValue entropy = shannon_entropy(textbook.distribution());

    const Matrix joint = c.unitary * tensor_product(rho.mat(), ket_bra(c.ancilla_ket)) * c.unitary.adjoint();
    const MetricValue randomness =
        intrinsic_randomness(DensityMatrix::from_matrix(hermitian_part(joint)), validate_pvm(c.pointers));

    std::vector<RelationReport> out;
    RelationReport eq = make_report("balance", RelationKind::kEqual,
                                    {gain.value + randomness.as_double(), randomness.finite}, entropy);
    eq.dim_s = c.dim_s;
    eq.dim_a = c.dim_a;
    out.push_back(std::move(eq));

    const IntrinsicContext ctx = make_context(rho, dilation_from_coupling(c));
    const MetricValue disturbance = quantum_relative_entropy(rho, ctx.post_average());
    out.push_back(detail::with_dims(make_report("balance_corollary", RelationKind::kLessEqual,
                                                {gain.value + disturbance.as_double(), disturbance.finite}, entropy),
                                    ctx));
    return out;
}

// ---------------------------------------------------------------------------
// Entropic uncertainty.

/// Bases are the columns of two unitaries. Reports H(P_A) + H(P_B) >= -log2 c
/// with c = max |<a_i|b_j>|^2, and the intermediate step
/// H(P_A) >= H(P_B || P'_B) where P'_B is B measured after dephasing in A.
inline std::vector<RelationReport> maassen_uffink_witness(const DensityMatrix &rho, const Matrix &basis_a,
                                                          const Matrix &basis_b) {
    for (const Matrix *b : {&basis_a, &basis_b}) {
        if (b->rows() != rho.dim() || b->cols() != rho.dim()) {
            throw_dimension_mismatch("basis matrix must be " + std::to_string(rho.dim()) + "x" +
                                     std::to_string(rho.dim()));
        }
        const double r = unitarity_residual(*b);
        if (r > kUnitaryTolerance) {
            throw_violation("orthonormality", "basis columns are not orthonormal", r);
        }
    }
    auto rank_one_pvm = [](const Matrix &basis) {
        std::vector<Matrix> projectors;
        for (Index k = 0; k < basis.cols(); ++k) {
            projectors.push_back(ket_bra(basis.col(k)));
        }
        return validate_pvm(std::move(projectors));
    };
    const Pvm a = rank_one_pvm(basis_a);
    const Pvm b = rank_one_pvm(basis_b);
    const double c = (basis_a.adjoint() * basis_b).cwiseAbs2().maxCoeff();

    const OutcomeDistribution pa = born_probabilities(rho, a);
    const OutcomeDistribution pb = born_probabilities(rho, b);
    const DensityMatrix dephased = DensityMatrix::from_matrix(hermitian_part(dephase(rho.mat(), a)));
    const OutcomeDistribution pb_after = born_probabilities(dephased, b);

    std::vector<RelationReport> out;
    out.push_back(make_report("maassen_uffink", RelationKind::kGreaterEqual,
                              {shannon_entropy(pa).value + shannon_entropy(pb).value, true}, {-std::log2(c), true}));
    out.push_back(make_report("maassen_uffink_chain", RelationKind::kGreaterEqual, shannon_entropy(pa),
                              classical_relative_entropy(pb, pb_after)));
    for (RelationReport &r : out) {
        r.dim_s = rho.dim();
        r.dim_a = 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Joint measurability from a shared dilation.

/// Coarse-grains one fine PVM {Q_k} two ways, Q_A(x) = sum_{k: ga[k]=x} Q_k
/// and Q_B(y) likewise. Verifies that both coarse-grainings are PVMs whose
/// reductions are the marginals of the fine POVM, and that measuring A first
/// leaves B's statistics unchanged: Tr(Q_B(y) J^P_A(rho (x) rho_a)) =
/// Tr(rho M_B(y)) for each test state. lhs is the worst deviation.
inline RelationReport joint_nondisturbance_construction(const NaimarkDilation &d,
                                                        const std::vector<std::size_t> &group_a,
                                                        const std::vector<std::size_t> &group_b,
                                                        const std::vector<DensityMatrix> &test_states) {
    if (group_a.size() != d.size() || group_b.size() != d.size()) {
        throw_dimension_mismatch("grouping must assign every fine outcome");
    }
    auto coarse = [&d](const std::vector<std::size_t> &group) {
        const std::size_t n = *std::max_element(group.begin(), group.end()) + 1;
        std::vector<Matrix> projectors(n, Matrix::Zero(d.pvm().dim(), d.pvm().dim()));
        for (std::size_t k = 0; k < group.size(); ++k) {
            projectors[group[k]] += d.pvm().projector(k);
        }
        return make_dilation(d.ancilla_state(), std::move(projectors), d.dim_s(), d.dim_a());
    };
    const NaimarkDilation da = coarse(group_a);
    const NaimarkDilation db = coarse(group_b);
    const Povm fine = reduce_to_povm(d);
    const Povm ma = reduce_to_povm(da);
    const Povm mb = reduce_to_povm(db);

    double worst = 0.0;
    auto marginal_error = [&](const Povm &coarse_povm, const std::vector<std::size_t> &group) {
        for (std::size_t x = 0; x < coarse_povm.size(); ++x) {
            Matrix sum = Matrix::Zero(fine.dim(), fine.dim());
            for (std::size_t k = 0; k < group.size(); ++k) {
                if (group[k] == x) {
                    sum += fine.effect(k);
                }
            }
            worst = std::max(worst, max_abs_diff(sum, coarse_povm.effect(x)));
        }
    };
    marginal_error(ma, group_a);
    marginal_error(mb, group_b);

    for (const DensityMatrix &rho : test_states) {
        const Matrix joint = tensor_product(rho.mat(), d.ancilla_state().mat());
        const Matrix after_a = dephase(joint, da.pvm());
        for (std::size_t y = 0; y < mb.size(); ++y) {
            const double lhs = real_trace(db.pvm().projector(y) * after_a);
            const double rhs = real_trace(rho.mat() * mb.effect(y));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    RelationReport r = make_report("joint_nondisturbance", RelationKind::kEqual, {worst, true}, {0, true});
    r.dim_s = d.dim_s();
    r.dim_a = d.dim_a();
    return r;
}

}  // namespace nlab

#endif
