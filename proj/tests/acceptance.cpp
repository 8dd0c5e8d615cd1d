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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <Eigen/SVD>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "nlab/nlab.hpp"

namespace {

using namespace nlab;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

int g_failures = 0;

void report(const std::string &id, const std::function<void(Outcome &)> &body) {
    Outcome o;
    try {
        body(o);
    } catch (const std::exception &e) {
        o.pass = false;
        o.detail << " unexpected exception: " << e.what();
    }
    if (!o.pass) {
        ++g_failures;
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << o.detail.str() << std::endl;
}

void require(Outcome &o, bool ok, const std::string &what) {
    if (!ok) {
        o.pass = false;
        o.detail << " {" << what << "}";
    }
}

/// (sum of singular values of sqrt(rho) sqrt(sigma))^2, computed without the
/// library's fidelity routine.
double svd_fidelity(const Matrix &rho, const Matrix &sigma) {
    auto root = [](const Matrix &m) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        RealVector ev = es.eigenvalues();
        for (Index k = 0; k < ev.size(); ++k) {
            ev(k) = ev(k) > 1e-12 ? std::sqrt(ev(k)) : 0.0;
        }
        return Matrix(es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
    };
    const double nuclear = Eigen::JacobiSVD<Matrix>(root(rho) * root(sigma)).singularValues().sum();
    return nuclear * nuclear;
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(NLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// The 1000-POVM ensemble shared by the first two criteria.
struct EnsembleMember {
    Povm povm;
    DensityMatrix rho;
};

std::vector<EnsembleMember> povm_ensemble() {
    std::vector<EnsembleMember> out;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const std::uint64_t seed = mix_seed(2026, t);
        const Index dim = 2 + static_cast<Index>(t % 2);
        const Index n = 2 + static_cast<Index>((t / 2) % 4);
        out.push_back({random_povm(dim, n, seed), random_density(dim, 1 + static_cast<Index>(t % dim), seed + 1)});
    }
    return out;
}

const RelationReport *find_row(const std::vector<RelationReport> &rows, const std::string &id, double alpha,
                               const std::string &outcome) {
    for (const RelationReport &r : rows) {
        if (r.relation == id && r.alpha == alpha && r.outcome == outcome) {
            return &r;
        }
    }
    return nullptr;
}

NaimarkDilation computational_dilation(Index dim) {
    std::vector<Matrix> projectors;
    for (Index k = 0; k < dim; ++k) {
        projectors.push_back(basis_projector(dim, k));
    }
    return make_dilation(DensityMatrix::pure(basis_ket(1, 0)), projectors, dim, 1);
}

}  // namespace

int main() {
    const std::vector<EnsembleMember> ensemble = povm_ensemble();
    const double s = 1.0 / std::sqrt(2.0);
    const DensityMatrix plus = DensityMatrix::pure([&] {
        Vector v(2);
        v << s, s;
        return v;
    }());

    report("AC1 canonical dilation round trip", [&](Outcome &o) {
        const auto start = std::chrono::steady_clock::now();
        double worst_extract = 0.0, worst_orth = 0.0, worst_reduce = 0.0;
        for (const EnsembleMember &m : ensemble) {
            const NaimarkDilation d = canonical_dilation_from_kraus(gram_correction_family(m.povm));
            worst_reduce = std::max(worst_reduce, povm_distance(reduce_to_povm(d), m.povm));
            worst_orth = std::max(worst_orth, pvm_orthogonality_residual(d.all_projectors()));
            worst_extract = std::max(worst_extract, correction_condition_residual(extract_correction_family(d)));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.detail << " n=1000 extract_residual=" << worst_extract << " orthogonality=" << worst_orth
                 << " reduction=" << worst_reduce << " seconds=" << secs;
        require(o, worst_extract < 1e-8, "extraction residual");
        require(o, worst_orth < 1e-8, "orthogonality");
        require(o, worst_reduce < 1e-8, "reduction");
        require(o, secs < 60.0, "time budget");
    });

    report("AC2 intrinsic rule path equivalence", [&](Outcome &o) {
        double worst = 0.0;
        for (const EnsembleMember &m : ensemble) {
            const NaimarkDilation d = canonical_dilation_from_kraus(gram_correction_family(m.povm));
            const InstrumentOutput by_trace = apply_intrinsic_trace(m.rho, d);
            const InstrumentOutput by_opsum = apply_intrinsic_opsum(m.rho, extract_correction_family(d));
            worst = std::max(worst, branch_distance(by_trace, by_opsum));
        }
        o.detail << " n=1000 max_branch_deviation=" << worst;
        require(o, worst < 1e-9, "path deviation");
    });

    report("AC3 IDP closed forms", [&](Outcome &o) {
        double closed = 0.0, across = 0.0, unambiguity = 0.0;
        const double pi = std::numbers::pi;
        std::uint64_t seed = 0;
        for (double beta : {pi / 6, pi / 4, pi / 3}) {
            const IdpFixture f = build_idp(beta);
            for (int k = 0; k < 100; ++k, ++seed) {
                const DensityMatrix rho = random_density(2, 1 + (k % 2), mix_seed(77, seed));
                const InstrumentOutput six = apply_intrinsic_trace(rho, f.dilation_qutrit);
                const InstrumentOutput four = apply_intrinsic_trace(rho, f.dilation_qubit);
                const std::vector<Matrix> expected = f.closed_form(rho);
                for (std::size_t i = 0; i < expected.size(); ++i) {
                    closed = std::max(closed, (six.branches[i].state - expected[i]).cwiseAbs().maxCoeff());
                }
                across = std::max(across, branch_distance(six, four));
            }
            // |psi_+> never fires on the "-" state and vice versa.
            for (int sign = 0; sign < 2; ++sign) {
                const InstrumentOutput out = apply_intrinsic_trace(DensityMatrix::pure(f.discriminated(sign)),
                                                                   f.dilation_qutrit);
                unambiguity = std::max(unambiguity, out.branches[sign == 0 ? 2 : 1].probability);
            }
        }
        o.detail << " betas=pi/6,pi/4,pi/3 states=100 closed_form_dev=" << closed << " qutrit_vs_qubit=" << across
                 << " wrong_outcome_prob=" << unambiguity;
        require(o, closed < 1e-9, "closed form");
        require(o, across < 1e-9, "ancilla dimension independence");
        require(o, unambiguity < 1e-10, "unambiguity");
    });

    SweepConfig config;
    config.trials = 1000;
    config.seed = 1;
    const SweepResult sweep = run_sweep(config);

    report("AC4 randomness and gentle family", [&](Outcome &o) {
        double worst = std::numeric_limits<double>::infinity();
        std::size_t rows = 0;
        for (const RelationReport &r : sweep.reports) {
            if (r.skipped || is_equality_relation(r.relation) || r.relation == "divergence_monotonicity") {
                continue;
            }
            if (r.relation == "randomness_disturbance" || r.relation == "gentle_family" ||
                r.relation == "winter_form" || r.relation == "uncertainty_disturbance" ||
                r.relation == "shannon_disturbance" || r.relation == "info_disturbance" ||
                r.relation == "classical_randomness") {
                worst = std::min(worst, r.margin);
                ++rows;
            }
        }
        double witness = 0.0;
        Matrix diag = Matrix::Zero(2, 2);
        diag(0, 0) = 0.7;
        diag(1, 1) = 0.3;
        const IntrinsicContext eig = make_context(DensityMatrix::from_matrix(diag), computational_dilation(2));
        witness = std::max(witness, std::abs(check_randomness_disturbance(eig).margin));
        witness = std::max(witness, std::abs(check_randomness_disturbance(make_context(plus, computational_dilation(2))).margin));
        const IntrinsicContext pure = make_context(DensityMatrix::pure(random_ket(3, 5)), computational_dilation(3));
        const std::vector<RelationReport> gentle = check_gentle_family(pure, {0.5});
        for (const std::string label : {"0", "1", "2"}) {
            const RelationReport *r = find_row(gentle, "gentle_family", 0.5, label);
            require(o, r != nullptr, "missing gentle row");
            if (r) {
                witness = std::max(witness, std::abs(r->margin));
            }
        }
        o.detail << " trials=1000 rows=" << rows << " min_margin=" << worst << " saturation_max_abs=" << witness;
        require(o, rows > 0 && worst >= -1e-8, "inequality margins");
        require(o, witness <= 1e-9, "saturation witnesses");
    });

    report("AC5 balance identity", [&](Outcome &o) {
        double worst = 0.0;
        std::size_t rows = 0;
        for (const RelationReport &r : sweep.reports) {
            if (r.relation == "balance") {
                worst = std::max(worst, std::abs(r.margin));
                ++rows;
            }
        }
        CouplingModel cnot;
        cnot.unitary = Matrix::Zero(4, 4);
        cnot.unitary(0, 0) = cnot.unitary(1, 1) = cnot.unitary(2, 3) = cnot.unitary(3, 2) = 1.0;
        cnot.ancilla_ket = basis_ket(2, 0);
        cnot.pointers = ancilla_pointers(2, 2);
        cnot.dim_s = cnot.dim_a = 2;
        double hand = 0.0;
        for (const DensityMatrix &rho : {plus, DensityMatrix::maximally_mixed(2)}) {
            hand = std::max(hand, std::abs(check_balance(rho, cnot).front().margin));
        }
        o.detail << " couplings=" << rows << " max_abs_margin=" << worst << " hand_cases=" << hand;
        require(o, rows == 1000, "coupling count");
        require(o, worst <= 1e-8, "random couplings");
        require(o, hand <= 1e-10, "hand cases");
    });

    report("AC6 fidelity form of the gentle bound", [&](Outcome &o) {
        double vs_oracle = 0.0, squared = 0.0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const Index dim = 2 + static_cast<Index>(seed % 2);
            const IntrinsicContext ctx =
                make_context(random_density(dim, dim, seed), random_dilation(dim, 2, 3, 1 + seed % 2, seed));
            const std::vector<RelationReport> rows = check_gentle_family(ctx, {0.5});
            for (const Branch &b : ctx.output.branches) {
                const RelationReport *g = find_row(rows, "gentle_family", 0.5, b.label);
                const RelationReport *w = find_row(rows, "winter_form", 0.5, b.label);
                if (!g || !w || g->skipped) {
                    continue;
                }
                const double f = svd_fidelity(ctx.rho.mat(), b.state / b.probability);
                vs_oracle = std::max(vs_oracle, std::abs(w->rhs - f));
                squared = std::max(squared, std::abs(g->rhs * g->rhs - w->rhs));
            }
        }
        o.detail << " trials=200 fidelity_vs_svd=" << vs_oracle << " squared_half_vs_fidelity=" << squared;
        require(o, vs_oracle < 1e-9, "independent fidelity");
        require(o, squared < 1e-9, "alpha = 1/2 squared");
    });

    report("AC7 entropic uncertainty", [&](Outcome &o) {
        double worst = std::numeric_limits<double>::infinity(), chain = worst;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const Index dim = 2 + static_cast<Index>(seed % 2);
            const std::vector<RelationReport> rows =
                maassen_uffink_witness(random_density(dim, 1 + seed % dim, mix_seed(seed, 1)),
                                       random_unitary(dim, mix_seed(seed, 2)), random_unitary(dim, mix_seed(seed, 3)));
            worst = std::min(worst, rows[0].margin);
            chain = std::min(chain, rows[1].margin);
        }
        o.detail << " pairs=200 min_margin=" << worst << " chain_min_margin=" << chain;
        require(o, worst >= -1e-8, "bound");
        require(o, chain >= -1e-8, "chain");
    });

    report("AC8 disturbance band", [&](Outcome &o) {
        double worst = std::numeric_limits<double>::infinity();
        std::size_t rows = 0;
        for (const RelationReport &r : sweep.reports) {
            if (r.relation == "disturbance_band" && !r.skipped) {
                worst = std::min(worst, r.margin);
                ++rows;
            }
        }
        o.detail << " rows=" << rows << " min_slack=" << worst;
        require(o, rows == 1000, "row count");
        require(o, worst >= -1e-8, "band");
    });

    report("AC9 seven-outcome repeatability", [&](Outcome &o) {
        const SevenOutcomeFixture f = build_seven_outcome();
        const double reduction = povm_distance(validate_povm(group_operators(fine_effects(f.fine, f.fine.ancilla_state()),
                                                                             f.grouping),
                                                             f.labels),
                                               f.povm);
        const RepeatabilityResult first = run_repeatability(f, 0);
        o.detail << " reduction_error=" << reduction << " max_second_round_difference=" << first.max_difference;
        require(o, reduction < 1e-10, "reduction");
        require(o, first.max_difference > 0.1, "second round differs");
        for (const RepeatabilityFinding &row : seven_outcome_findings(f, first)) {
            o.detail << "\n       " << row.projector << " quoted_vs_conditional=" << row.deviation_conditional
                     << " quoted_vs_ancilla_zero=" << row.deviation_ancilla_zero;
        }
    });

    report("AC10 rejection paths", [&](Outcome &o) {
        const KrausCorrectionFamily broken = detail::broken_family(2, 3, 1e-3);
        const double residual = correction_condition_residual(broken);
        bool rejected = false;
        try {
            (void)canonical_dilation_from_kraus(broken);
        } catch (const NlabError &e) {
            rejected = e.kind() == ErrorKind::kInvariantViolation;
        }
        bool state_rejected = false;
        try {
            Matrix m = Matrix::Zero(2, 2);
            m(0, 0) = m(1, 1) = 0.6;
            (void)DensityMatrix::from_matrix(m);
        } catch (const NlabError &e) {
            state_rejected = e.kind() == ErrorKind::kInvariantViolation;
        }
        const int ok_code = run_cli("verify --trials 10");
        const int broken_code = run_cli("verify --trials 3 --inject-broken-kraus");
        o.detail << " broken_residual=" << residual << " family_rejected=" << rejected
                 << " state_rejected=" << state_rejected << " verify_exit=" << ok_code
                 << " verify_injected_exit=" << broken_code;
        require(o, std::abs(residual - 1e-3) < 1e-12 && rejected, "broken family");
        require(o, state_rejected, "non-unit trace");
        require(o, ok_code == 0 && broken_code == 3, "exit codes");
    });

    std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
