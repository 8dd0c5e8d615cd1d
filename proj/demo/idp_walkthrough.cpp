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

// Walks through unambiguous discrimination of two qubit states: builds the
// coupling, reduces it to a POVM, applies the intrinsic rule to a few inputs
// and checks the information-disturbance relations on each.
//
// Usage: nlab_demo [beta]   (default pi/3)

#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "nlab/nlab.hpp"

namespace {

using namespace nlab;

void print_matrix(const char *name, const Matrix &m) {
    std::printf("  %s =\n", name);
    for (Index r = 0; r < m.rows(); ++r) {
        std::printf("    ");
        for (Index c = 0; c < m.cols(); ++c) {
            std::printf(" %8.5f%+8.5fi", m(r, c).real(), m(r, c).imag());
        }
        std::printf("\n");
    }
}

void walk(const IdpFixture &f, const char *name, const DensityMatrix &rho) {
    std::printf("\ninput %s\n", name);
    const IntrinsicContext ctx = make_context(rho, f.dilation_qutrit);
    const std::vector<Matrix> expected = f.closed_form(rho);
    for (std::size_t i = 0; i < ctx.output.branches.size(); ++i) {
        const Branch &b = ctx.output.branches[i];
        std::printf("  outcome %s  p=%.6f  closed-form deviation=%.2e\n", b.label.c_str(), b.probability,
                    (b.state - expected[i]).norm());
    }
    print_matrix("J(rho)", ctx.post_average().mat());

    std::vector<RelationReport> rows = {check_randomness_disturbance(ctx), check_info_disturbance(ctx),
                                        check_disturbance_band(ctx)};
    for (RelationReport &r : check_uncertainty_disturbance(ctx, {0.5})) {
        rows.push_back(std::move(r));
    }
    for (const RelationReport &r : rows) {
        std::printf("  %-24s lhs=%.6f rhs=%.6f margin=%+.3e %s\n", r.relation.c_str(), r.lhs, r.rhs, r.margin,
                    r.pass ? "ok" : "VIOLATED");
    }
}

}  // namespace

int main(int argc, char **argv) {
    const double beta = argc > 1 ? std::atof(argv[1]) : std::numbers::pi / 3;
    try {
        const IdpFixture f = build_idp(beta);
        std::printf("beta=%.6f theta=%.6f\n", f.beta, f.theta);
        for (std::size_t i = 0; i < f.povm.size(); ++i) {
            print_matrix(("M_" + f.povm.labels()[i]).c_str(), f.povm.effect(i));
        }
        std::printf("qutrit ancilla reduction error %.2e\n", povm_distance(reduce_to_povm(f.dilation_qutrit), f.povm));
        std::printf("qubit ancilla reduction error  %.2e\n", povm_distance(reduce_to_povm(f.dilation_qubit), f.povm));

        const KrausCorrectionFamily family = extract_correction_family(f.dilation_qutrit);
        std::printf("extracted correction family: %zu levels, residual %.2e\n", family.max_index(),
                    correction_condition_residual(family));

        walk(f, "|0><0|", DensityMatrix::pure(basis_ket(2, 0)));
        walk(f, "discriminated +", DensityMatrix::pure(f.discriminated(0)));
        walk(f, "discriminated -", DensityMatrix::pure(f.discriminated(1)));
        walk(f, "1/2", DensityMatrix::maximally_mixed(2));
    } catch (const NlabError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
