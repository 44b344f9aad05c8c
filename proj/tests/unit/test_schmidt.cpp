// Copyright 2026 The qmarg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmarg/lemmas.hpp"
#include "qmarg/schmidt.hpp"
#include "test_util.hpp"

namespace qmarg {
namespace {

using testing::ghz_family_oracle;
using testing::ghz_state;

const double kHalf = 1 / std::sqrt(2.0);

PureState zero_bell() {
  return PureState(3, testing::add(testing::ket("000"), testing::ket("011"), kHalf, kHalf));
}

struct FamilyMember {
  int n;
  cplx a, b, z;
};

// A spread of GHZ family members used as the compatible-omega corpus.
std::vector<FamilyMember> family_corpus() {
  std::vector<FamilyMember> out;
  SplitMix64 rng(404);
  for (int n = 3; n <= 5; ++n)
    for (int s = 0; s < 6; ++s) {
      const double w = (s == 0) ? 0.5 : 0.1 + 0.8 * rng.uniform();
      const cplx a = std::polar(std::sqrt(w), 2 * std::numbers::pi * rng.uniform());
      const cplx b = std::polar(std::sqrt(1 - w), 2 * std::numbers::pi * rng.uniform());
      const cplx z = (s == 1) ? cplx(0.0) : std::polar(0.95 * std::sqrt(rng.uniform()), 2 * std::numbers::pi * rng.uniform());
      out.push_back({n, a, b, z});
    }
  return out;
}

TEST(SchmidtSplit, BellPairIsMaximallyEntangled) {
  const auto s = schmidt_split(ghz_state(2, kHalf, kHalf), 1);
  EXPECT_NEAR(s.q[0], 0.5, 1e-14);
  EXPECT_NEAR(s.q[1], 0.5, 1e-14);
  EXPECT_FALSE(s.product());
}

TEST(SchmidtSplit, ProductAcrossQubitOne) {
  const auto s = schmidt_split(zero_bell(), 1);
  EXPECT_NEAR(s.q[0], 1.0, 1e-14);
  EXPECT_NEAR(s.q[1], 0.0, 1e-14);
  EXPECT_TRUE(s.product());
  EXPECT_TRUE(s.alpha[1].empty());
  EXPECT_LE(distance(reconstruct(s), zero_bell().amps()), 1e-14);
}

TEST(SchmidtSplit, UnbalancedGhzEveryQubit) {
  const auto psi = ghz_state(3, std::sqrt(0.8), std::sqrt(0.2));
  for (int j = 1; j <= 3; ++j) {
    const auto s = schmidt_split(psi, j);
    EXPECT_NEAR(s.q[0], 0.8, 1e-14);
    EXPECT_NEAR(s.q[1], 0.2, 1e-14);
    EXPECT_NEAR(std::abs(s.alpha[0][0]), 1.0, 1e-14);
  }
}

TEST(SchmidtSplit, HaarReconstructionProperty) {
  for (int n = 3; n <= 4; ++n)
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto psi = haar_random_state(n, derive_seed(55, seed));
      for (int j = 1; j <= n; ++j) {
        const auto s = schmidt_split(psi, j);
        ASSERT_NEAR(s.q[0] + s.q[1], 1.0, 1e-10);
        ASSERT_GE(s.q[0], s.q[1]);
        ASSERT_GE(s.q[1], -1e-12);
        ASSERT_LE(distance(reconstruct(s), psi.amps()), 1e-9);
        ASSERT_LE(std::abs(inner(s.alpha[0], s.alpha[1])), 1e-10);
        ASSERT_LE(std::abs(inner(s.chi[0], s.chi[1])), 1e-10);
        for (const auto& a : s.alpha) {
          // Largest-magnitude component is real and positive.
          const std::size_t big = std::abs(a[0]) >= std::abs(a[1]) ? 0 : 1;
          ASSERT_LE(std::abs(a[big].imag()), 1e-15);
          ASSERT_GT(a[big].real(), 0.0);
        }
      }
    }
}

TEST(SchmidtSplit, RejectsSingleQubit) {
  EXPECT_THROW(schmidt_split(PureState(1, CVector{1.0, 0.0}), 1), InvalidInput);
  EXPECT_THROW(schmidt_split(ghz_state(3, kHalf, kHalf), 4), InvalidInput);
}

TEST(Purify, PureProjectorNeedsOneEnvironmentDimension) {
  const auto psi = haar_random_state(3, 5);
  const auto p = purify(DensityMatrix::projector(psi));
  EXPECT_EQ(p.env_dim, 1u);
  EXPECT_NEAR(std::abs(inner(p.omega, psi.amps())), 1.0, 1e-12);
}

TEST(Purify, MaximallyMixedQubit) {
  const auto p = purify(DensityMatrix(Matrix::identity(2) * cplx(0.5)));
  EXPECT_EQ(p.env_dim, 2u);
  EXPECT_LE(frobenius_distance(reduced_system(p), Matrix::identity(2) * cplx(0.5)), 1e-12);
}

TEST(Purify, DiagonalGhzMixture) {
  const Matrix w = ghz_family_oracle(3, std::sqrt(0.8), std::sqrt(0.2), 0.0);
  const auto p = purify(DensityMatrix(w));
  EXPECT_EQ(p.env_dim, 2u);
  EXPECT_LE(frobenius_distance(reduced_system(p), w), 1e-12);
}

TEST(Purify, RejectsNonPsd) {
  Matrix m = Matrix::identity(2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  EXPECT_THROW(purify(DensityMatrix(m)), InvalidInput);
}

TEST(EnvVectors, PureOmegaHasNoCrossTerms) {
  const auto psi = haar_random_state(3, 21);
  const auto p = purify(DensityMatrix::projector(psi));
  for (int j = 1; j <= 3; ++j) {
    const auto env = extract_env_vectors(p, psi, j);
    EXPECT_LE(norm(env.e(0, 1)), 1e-12);
    EXPECT_LE(norm(env.e(1, 0)), 1e-12);
    EXPECT_NEAR(norm(env.e(0, 0)), 1.0, 1e-12);
    EXPECT_NEAR(norm(env.e(1, 1)), 1.0, 1e-12);
  }
}

TEST(EnvVectors, DiagonalGhzMixtureSecondRelation) {
  const auto psi = ghz_state(3, std::sqrt(0.8), std::sqrt(0.2));
  const auto p = purify(DensityMatrix(ghz_family_oracle(3, std::sqrt(0.8), std::sqrt(0.2), 0.0)));
  const auto env = extract_env_vectors(p, psi, 1);
  EXPECT_LE(env_residuals(env).second_env_relation, 1e-9);
}

TEST(EnvVectors, RejectsIncompatiblePurification) {
  const auto psi = ghz_state(3, kHalf, kHalf);
  const auto p = purify(DensityMatrix::projector(testing::w_state(3)));
  try {
    extract_env_vectors(p, psi, 1);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("qubit"), std::string::npos) << e.what();
  }
}

TEST(EnvVectors, ProductSplitKeepsOnlyTheDefinedRow) {
  const auto psi = zero_bell();
  const auto p = purify(DensityMatrix::projector(psi));
  const auto env = extract_env_vectors(p, psi, 1);
  EXPECT_TRUE(env.product());
  EXPECT_TRUE(env.big_e[1].empty());
  EXPECT_TRUE(env.omega_split[1].empty());
  EXPECT_FALSE(env.e(0, 0).empty());
  EXPECT_LE(env_residuals(env).max(), 1e-12);
  // The main constraint needs both alpha vectors at the split qubit.
  const auto other = extract_env_vectors(p, psi, 2);
  EXPECT_THROW(main_constraint_residual(env, other, psi, MultiIndex::from_flat(3, 0)), InvalidInput);
}

TEST(EnvVectors, AllRelationsHoldOnGhzFamilies) {
  double worst_env = 0.0, worst_main = 0.0;
  for (const auto& m : family_corpus()) {
    const auto psi = ghz_state(m.n, m.a, m.b);
    const auto p = purify(DensityMatrix(ghz_family_oracle(m.n, m.a, m.b, m.z)));
    std::vector<EnvVectors> envs;
    for (int j = 1; j <= m.n; ++j) {
      envs.push_back(extract_env_vectors(p, psi, j));
      worst_env = std::max(worst_env, env_residuals(envs.back()).max());
    }
    worst_main = std::max(worst_main, max_main_constraint_residual(envs, psi));
  }
  EXPECT_LE(worst_env, 1e-9);
  EXPECT_LE(worst_main, 1e-9);
}

TEST(EnvVectors, SingleIndexMatchesSweep) {
  const auto psi = ghz_state(3, std::sqrt(0.3), cplx(0, std::sqrt(0.7)));
  const auto p = purify(DensityMatrix(ghz_family_oracle(3, std::sqrt(0.3), cplx(0, std::sqrt(0.7)), 0.4)));
  const auto e1 = extract_env_vectors(p, psi, 1), e3 = extract_env_vectors(p, psi, 3);
  for (std::size_t f = 0; f < 8; ++f)
    EXPECT_LE(main_constraint_residual(e1, e3, psi, MultiIndex::from_flat(3, f)), 1e-12);
  EXPECT_THROW(main_constraint_residual(e1, e1, psi, MultiIndex::from_flat(3, 0)), InvalidInput);
}

TEST(EnvVectors, PureOmegaMainConstraintIsExact) {
  const auto psi = haar_random_state(4, 8);
  const auto p = purify(DensityMatrix::projector(psi));
  std::vector<EnvVectors> envs;
  for (int j = 1; j <= 4; ++j) envs.push_back(extract_env_vectors(p, psi, j));
  EXPECT_LE(max_main_constraint_residual(envs, psi), 1e-12);
}

TEST(EnvVectors, PerturbedPurificationBreaksTheMainConstraint) {
  const auto psi = ghz_state(3, std::sqrt(0.7), std::sqrt(0.3));
  auto p = purify(DensityMatrix(ghz_family_oracle(3, std::sqrt(0.7), std::sqrt(0.3), 0.2)));
  // exp(i eps H) for a random Hermitian H on the joint space.
  SplitMix64 rng(99);
  const auto eig = hermitian_eig(testing::random_hermitian(p.omega.size(), rng));
  Matrix phase(eig.size(), eig.size());
  for (std::size_t k = 0; k < eig.size(); ++k) phase(k, k) = std::polar(1.0, 0.1 * eig.values[k]);
  p.omega = (eig.vectors * phase * eig.vectors.adjoint()).apply(p.omega);
  std::vector<EnvVectors> envs;
  for (int j = 1; j <= 3; ++j) envs.push_back(extract_env_vectors(p, psi, j, false));
  EXPECT_GT(max_main_constraint_residual(envs, psi), 1e-3);
}

TEST(Lemmas, HoldAcrossTheFamilyCorpus) {
  LemmaTally l1, l2, l3, l4;
  auto add = [](LemmaTally& into, const LemmaTally& t) {
    into.applicable += t.applicable;
    into.held += t.held;
    into.worst = std::max(into.worst, t.worst);
  };
  for (const auto& m : family_corpus()) {
    const auto psi = ghz_state(m.n, m.a, m.b);
    const auto ctx = make_proof_context(purify(DensityMatrix(ghz_family_oracle(m.n, m.a, m.b, m.z))), psi);
    add(l1, check_lemma1(ctx));
    add(l2, check_lemma2(ctx));
    add(l3, check_lemma3(ctx));
    add(l4, check_lemma4(ctx));
  }
  EXPECT_TRUE(l1.ok()) << l1.worst;
  EXPECT_TRUE(l2.ok()) << l2.worst;
  EXPECT_TRUE(l3.ok()) << l3.worst;
  EXPECT_TRUE(l4.ok()) << l4.worst;
  // Unbalanced GHZ states have many vanishing coefficients, so lemmas 2 and 3 get exercised.
  EXPECT_GT(l3.applicable, 0u);
}

TEST(Lemmas, FirstLemmaOnPureOmega) {
  // With a pure omega every cross vector vanishes, so the hypothesis holds for every (j, i).
  const auto psi = haar_random_state(3, 12);
  const auto ctx = make_proof_context(purify(DensityMatrix::projector(psi)), psi);
  const auto t = check_lemma1(ctx);
  EXPECT_EQ(t.applicable, 6u);
  EXPECT_TRUE(t.ok());
}

TEST(ProductSplitTest, Examples) {
  EXPECT_TRUE(product_split_test(zero_bell(), 1, 1e-8));
  EXPECT_FALSE(product_split_test(zero_bell(), 2, 1e-8));
  EXPECT_FALSE(product_split_test(ghz_state(3, kHalf, kHalf), 1, 1e-8));
  EXPECT_FALSE(product_split_test(testing::w_state(3), 1, 1e-8));
  EXPECT_NEAR(schmidt_split(testing::w_state(3), 1).q[1], 1.0 / 3.0, 1e-14);
}

TEST(ProductSplitTest, AgreesWithConstructionOnRandomStates) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    const int j = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    const auto single = haar_random_state(1, rng.next());
    const auto rest = haar_random_state(n - 1, rng.next());
    const PureState prod(n, insert_qubit(rest.amps(), single.amps(), n, j));
    EXPECT_TRUE(product_split_test(prod, j, 1e-8));
    EXPECT_FALSE(product_split_test(haar_random_state(n, rng.next()), j, 1e-8));
  }
}

}  // namespace
}  // namespace qmarg
