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

#include "test_util.hpp"

namespace nlab {
namespace {

using testing::diag;
using testing::expect_error;
using testing::max_diff;

Povm unsharp_z() {
    return validate_povm({diag({0.75, 0.25}), diag({0.25, 0.75})});
}

void expect_choi_psd(const InstrumentMap &map, Index dim) {
    Matrix total_out = Matrix::Zero(dim, dim);
    for (const Matrix &c : choi_matrices(map, dim)) {
        EXPECT_LT(hermiticity_residual(c), 1e-12);
        EXPECT_GE(testing::oracle_eigenvalues(hermitian_part(c)).minCoeff(), -1e-10);
        // Tr over the output factor.
        total_out += testing::oracle_trace_ancilla(c, dim, dim).transpose();
    }
    // Trace preservation of the summed instrument: Tr_out(Choi) = 1.
    EXPECT_LT(max_diff(total_out, identity(dim)), 1e-10);
}

TEST(Luders, WorkedBranch) {
    const InstrumentOutput out = apply_luders(DensityMatrix::pure(basis_ket(2, 0)), unsharp_z());
    EXPECT_LT(max_diff(out.branches[0].state, 0.75 * basis_projector(2, 0)), 1e-15);
    EXPECT_NEAR(out.branches[0].probability, 0.75, 1e-15);
    EXPECT_NEAR(out.branches[1].probability, 0.25, 1e-15);
}

TEST(Projective, BranchesAndNullBranch) {
    const Pvm z = validate_pvm({basis_projector(2, 0), basis_projector(2, 1)});
    const InstrumentOutput out = apply_projective(DensityMatrix::pure(basis_ket(2, 0)), z);
    EXPECT_NEAR(out.branches[0].probability, 1.0, 1e-15);
    EXPECT_FALSE(out.branches[1].normalized().has_value());
    EXPECT_TRUE(out.branches[0].normalized().has_value());
}

TEST(Intrinsic, TraceAndOperatorSumPathsAgree) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const Index ds = 2 + seed % 2;
        const NaimarkDilation d = seed % 2 ? dilation_from_coupling(random_coupling(ds, 2 + seed % 3, seed))
                                           : random_dilation(ds, 2, 2 + seed % 3, 1 + (seed / 2) % 2, seed);
        const DensityMatrix rho = random_density(ds, 1 + seed % ds, seed + 1000);
        const InstrumentOutput a = apply_intrinsic_trace(rho, d);
        const InstrumentOutput b = apply_intrinsic_opsum(rho, extract_correction_family(d));
        EXPECT_LT(branch_distance(a, b), 1e-9);
    }
}

TEST(Intrinsic, WeightIdentityIsBornRule) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Povm m = random_povm(3, 2 + seed % 3, seed);
        const KrausCorrectionFamily k = gram_correction_family(m);
        const DensityMatrix rho = random_density(3, 2, seed);
        const InstrumentOutput out = apply_intrinsic_opsum(rho, k);
        for (std::size_t i = 0; i < m.size(); ++i) {
            EXPECT_NEAR(out.branches[i].probability, real_trace(m.effect(i) * rho.mat()), 1e-12);
        }
    }
}

TEST(Intrinsic, ProjectiveLimit) {
    const Pvm q = validate_pvm({basis_projector(3, 0) + basis_projector(3, 2), basis_projector(3, 1)});
    const Povm m = validate_povm(q.projectors());
    const NaimarkDilation d = canonical_dilation_from_kraus(gram_correction_family(m));
    const DensityMatrix rho = random_density(3, 3, 4);
    EXPECT_LT(branch_distance(apply_intrinsic_trace(rho, d), apply_projective(rho, q)), 1e-10);
}

TEST(Intrinsic, ChoiOperatorsArePositive) {
    const NaimarkDilation d = random_dilation(2, 3, 3, 2, 8);
    expect_choi_psd(general_map(d), 2);
    expect_choi_psd(opsum_map(extract_correction_family(d)), 2);
    expect_choi_psd(luders_map(random_povm(3, 3, 2)), 3);
    expect_choi_psd(coupling_map(random_coupling(2, 2, 6)), 2);
}

TEST(Textbook, LudersCouplingGivesLudersRule) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Povm m = random_povm(2, 3, seed);
        const DensityMatrix rho = random_density(2, 2, seed);
        EXPECT_LT(branch_distance(apply_textbook(rho, luders_coupling(m)), apply_luders(rho, m)), 1e-12);
    }
}

TEST(Textbook, SameStatisticsAsIntrinsic) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const CouplingModel c = random_coupling(2, 3, seed);
        const DensityMatrix rho = random_density(2, 1, seed);
        const InstrumentOutput t = apply_textbook(rho, c);
        const InstrumentOutput j = apply_intrinsic_trace(rho, dilation_from_coupling(c));
        for (std::size_t i = 0; i < t.branches.size(); ++i) {
            EXPECT_NEAR(t.branches[i].probability, j.branches[i].probability, 1e-12);
        }
    }
}

TEST(General, IdentityPostUnitariesGiveIntrinsic) {
    const NaimarkDilation d = random_dilation(2, 2, 3, 1, 3);
    const DensityMatrix rho = random_density(2, 2, 3);
    const std::vector<Matrix> ids(d.size(), identity(4));
    EXPECT_LT(branch_distance(apply_general(rho, d, ids), apply_intrinsic_trace(rho, d)), 1e-14);
    std::vector<Matrix> bad = ids;
    bad[0](0, 0) = 2.0;
    expect_error([&] { apply_general(rho, d, bad); }, ErrorKind::kInvariantViolation);
    expect_error([&] { apply_general(rho, d, {identity(4)}); }, ErrorKind::kDimensionMismatch);
}

TEST(Rules, DimensionMismatchAndBrokenFamily) {
    expect_error([] { apply_luders(DensityMatrix::maximally_mixed(3), unsharp_z()); },
                 ErrorKind::kDimensionMismatch);
    const Povm m = unsharp_z();
    std::vector<std::vector<Matrix>> corr;
    for (const Matrix &e : m.effects()) corr.push_back({sqrt_psd(e - e * e)});
    const KrausCorrectionFamily naive = make_correction_family_unchecked(m, corr);
    EXPECT_EQ(expect_error([&] { apply_intrinsic_opsum(DensityMatrix::maximally_mixed(2), naive); },
                           ErrorKind::kInvariantViolation)
                  .invariant(),
              "correction condition");
}

TEST(Rules, AverageStateIsNormalized) {
    const InstrumentOutput out = apply_intrinsic_trace(random_density(3, 2, 1), random_dilation(3, 2, 4, 2, 1));
    EXPECT_NEAR(real_trace(out.average.mat()), 1.0, 1e-12);
}

}  // namespace
}  // namespace nlab
