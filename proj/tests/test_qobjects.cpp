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

TEST(DensityMatrix, AcceptsValidStates) {
    const DensityMatrix rho = DensityMatrix::from_matrix(diag({0.75, 0.25}));
    EXPECT_EQ(rho.dim(), 2);
    EXPECT_NEAR(rho.purity(), 0.625, 1e-15);
    EXPECT_NEAR(DensityMatrix::maximally_mixed(4).purity(), 0.25, 1e-15);
    EXPECT_NEAR(DensityMatrix::pure(testing::ket({1.0, 1.0})).purity(), 1.0, 1e-15);
}

TEST(DensityMatrix, RejectsNonUnitTrace) {
    const NlabError e = expect_error([] { DensityMatrix::from_matrix(diag({0.6, 0.6})); },
                                     ErrorKind::kInvariantViolation);
    EXPECT_EQ(e.invariant(), "unit trace");
    EXPECT_NEAR(e.residual(), 0.2, 1e-12);
}

TEST(DensityMatrix, RejectsNegativeAndNonHermitian) {
    EXPECT_EQ(expect_error([] { DensityMatrix::from_matrix(diag({1.5, -0.5})); }, ErrorKind::kInvariantViolation)
                  .invariant(),
              "positivity");
    Matrix m = diag({0.5, 0.5});
    m(0, 1) = 0.1;
    EXPECT_EQ(expect_error([&] { DensityMatrix::from_matrix(m); }, ErrorKind::kInvariantViolation).invariant(),
              "hermiticity");
    expect_error([] { DensityMatrix::from_matrix(Matrix::Zero(2, 3)); }, ErrorKind::kDimensionMismatch);
    expect_error([] { DensityMatrix::from_unnormalized(Matrix::Zero(2, 2)); }, ErrorKind::kDomain);
}

TEST(DensityMatrix, RandomStatesAreValid) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DensityMatrix rho = random_density(3, 1 + seed % 3, seed);
        EXPECT_NEAR(real_trace(rho.mat()), 1.0, 1e-12);
        EXPECT_GE(hermitian_eig(rho.mat()).smallest(), -1e-12);
        EXPECT_EQ(hermitian_eig(rho.mat()).rank(), static_cast<Index>(1 + seed % 3));
    }
}

TEST(RandomGenerators, SeedDeterminism) {
    EXPECT_EQ(max_diff(random_unitary(3, 42), random_unitary(3, 42)), 0.0);
    EXPECT_GT(max_diff(random_unitary(3, 42), random_unitary(3, 43)), 1e-3);
    EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
    EXPECT_LT(unitarity_residual(random_unitary(5, 9)), 1e-13);
}

TEST(Povm, ValidatesInvariants) {
    const Povm m = validate_povm({diag({0.75, 0.25}), diag({0.25, 0.75})}, {"a", "b"});
    EXPECT_EQ(m.size(), 2u);
    EXPECT_EQ(m.labels()[1], "b");
    EXPECT_EQ(expect_error([] { validate_povm({diag({0.5, 0.5}), diag({0.25, 0.5})}); },
                           ErrorKind::kInvariantViolation)
                  .invariant(),
              "completeness");
    EXPECT_EQ(expect_error([] { validate_povm({diag({1.2, 1.0}), diag({-0.2, 0.0})}); },
                           ErrorKind::kInvariantViolation)
                  .invariant(),
              "positivity");
    expect_error([] { validate_povm({identity(2), Matrix::Zero(3, 3)}); }, ErrorKind::kDimensionMismatch);
}

TEST(Povm, RandomPovmsSumToIdentity) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Povm m = random_povm(2 + seed % 2, 2 + seed % 4, seed);
        Matrix total = Matrix::Zero(m.dim(), m.dim());
        for (const Matrix &e : m.effects()) {
            total += e;
            EXPECT_GE(testing::oracle_eigenvalues(e).minCoeff(), -1e-12);
        }
        EXPECT_LT(max_diff(total, identity(m.dim())), 1e-12);
    }
}

TEST(Pvm, OrthogonalityAndComplement) {
    const Pvm q = validate_pvm({basis_projector(3, 0), basis_projector(3, 2)});
    EXPECT_FALSE(q.complete());
    EXPECT_LT(max_diff(q.complement(), basis_projector(3, 1)), 1e-15);
    Matrix plus = Matrix::Constant(2, 2, 0.5);
    EXPECT_GT(pvm_orthogonality_residual({basis_projector(2, 0), plus}), 0.1);
    expect_error([&] { validate_pvm({basis_projector(2, 0), plus}); }, ErrorKind::kInvariantViolation);
}

TEST(BornRule, ProbabilitiesSumToOne) {
    const DensityMatrix rho = DensityMatrix::pure(testing::ket({1.0, 0.0}));
    const Povm m = validate_povm({diag({0.75, 0.25}), diag({0.25, 0.75})});
    const OutcomeDistribution p = born_probabilities(rho, m);
    EXPECT_NEAR(p[0], 0.75, 1e-15);
    EXPECT_NEAR(p[1], 0.25, 1e-15);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const OutcomeDistribution q = born_probabilities(random_density(3, 2, seed), random_povm(3, 4, seed));
        double total = 0.0;
        for (double x : q.probs()) {
            EXPECT_GE(x, 0.0);
            total += x;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(CorrectionFamily, NaiveLudersCorrectionsViolateCrossTerms) {
    // N_{1|i} = sqrt(M_i - M_i^2) satisfies the diagonal terms but not the
    // off-diagonal ones for a non-projective POVM.
    const Povm m = validate_povm({diag({0.75, 0.25}), diag({0.25, 0.75})});
    std::vector<std::vector<Matrix>> corr;
    for (const Matrix &e : m.effects()) corr.push_back({sqrt_psd(e - e * e)});
    const double residual = correction_condition_residual(m, corr);
    // Cross term: N1^dag N2 = 3/16 * I; required -M1 M2 = -3/16 * I.
    EXPECT_NEAR(residual, std::sqrt(2.0) * 6.0 / 16.0, 1e-12);
    const NlabError e = expect_error([&] { make_correction_family(m, corr); }, ErrorKind::kInvariantViolation);
    EXPECT_EQ(e.invariant(), "correction condition");
}

TEST(CorrectionFamily, ProjectiveHasNoCorrections) {
    const Povm m = validate_povm({basis_projector(2, 0), basis_projector(2, 1)});
    const KrausCorrectionFamily k = make_correction_family(m, {{}, {}});
    EXPECT_EQ(k.max_index(), 0u);
    EXPECT_EQ(correction_condition_residual(k), 0.0);
    EXPECT_LT(max_diff(k.op(1, 0), basis_projector(2, 1)), 1e-15);
    EXPECT_EQ(max_diff(k.op(1, 3), Matrix::Zero(2, 2)), 0.0);
}

TEST(CorrectionFamily, PrunedDropsZeroLevels) {
    const Povm m = validate_povm({basis_projector(2, 0), basis_projector(2, 1)});
    const Matrix z = Matrix::Zero(2, 2);
    const KrausCorrectionFamily k = make_correction_family(m, {{z, z}, {z}});
    EXPECT_EQ(k.max_index(), 2u);
    EXPECT_EQ(k.pruned().max_index(), 0u);
}

TEST(CorrectionFamily, ShapeMismatchRejected) {
    const Povm m = validate_povm({basis_projector(2, 0), basis_projector(2, 1)});
    expect_error([&] { make_correction_family(m, {{}}); }, ErrorKind::kDimensionMismatch);
    expect_error([&] { make_correction_family(m, {{identity(3)}, {}}); }, ErrorKind::kDimensionMismatch);
}

}  // namespace
}  // namespace nlab
