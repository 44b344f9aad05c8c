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

#include "qmarg/qstate.hpp"
#include "test_util.hpp"

namespace qmarg {
namespace {

using testing::random_hermitian;

Matrix mat2(cplx a, cplx b, cplx c, cplx d) {
  Matrix m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

TEST(HermitianEig, IdentityHasUnitSpectrum) {
  const auto e = hermitian_eig(Matrix::identity(2));
  ASSERT_EQ(e.values.size(), 2u);
  EXPECT_NEAR(e.values[0], 1.0, 1e-15);
  EXPECT_NEAR(e.values[1], 1.0, 1e-15);
}

TEST(HermitianEig, RankOneProjector) {
  const auto e = hermitian_eig(mat2(0.5, 0.5, 0.5, 0.5));
  EXPECT_NEAR(e.values[0], 0.0, 1e-15);
  EXPECT_NEAR(e.values[1], 1.0, 1e-15);
}

TEST(HermitianEig, TwoLevelFormulaCase) {
  // [[1/2 + z, u], [u, 1/2 - z]] with z = 0.3, u = 0.4: 1/2 -+ sqrt(0.16 + 0.09).
  const auto e = hermitian_eig(mat2(0.8, 0.4, 0.4, 0.2));
  EXPECT_NEAR(e.values[0], 0.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
}

TEST(HermitianEig, ComplexOffDiagonal) {
  // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
  const auto e = hermitian_eig(mat2(2.0, cplx(0, 1), cplx(0, -1), 2.0));
  EXPECT_NEAR(e.values[0], 1.0, 1e-14);
  EXPECT_NEAR(e.values[1], 3.0, 1e-14);
}

TEST(HermitianEig, RejectsNonHermitian) {
  try {
    hermitian_eig(mat2(1.0, 0.5, 0.0, 1.0));
    FAIL() << "expected rejection";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("asymmetry 0.5"), std::string::npos) << e.what();
  }
}

TEST(HermitianEig, RandomReconstructionAndOrthonormality) {
  SplitMix64 rng(2024);
  double worst_res = 0.0, worst_orth = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.next() % 16;
    const Matrix m = random_hermitian(d, rng);
    const auto e = hermitian_eig(m);
    for (std::size_t k = 1; k < d; ++k) ASSERT_LE(e.values[k - 1], e.values[k]);
    const double res = frobenius_distance(reconstruct(e), m);
    const double orth = frobenius_distance(e.vectors.adjoint() * e.vectors, Matrix::identity(d));
    ASSERT_LE(res, 1e-10 * static_cast<double>(d)) << "dim " << d;
    ASSERT_LE(orth, 1e-10) << "dim " << d;
    worst_res = std::max(worst_res, res / static_cast<double>(d));
    worst_orth = std::max(worst_orth, orth);
  }
  RecordProperty("worst_residual_per_dim", std::to_string(worst_res));
  RecordProperty("worst_orthonormality", std::to_string(worst_orth));
}

TEST(HermitianEig, HandlesDimension64) {
  SplitMix64 rng(5);
  const Matrix m = random_hermitian(64, rng);
  const auto e = hermitian_eig(m);
  EXPECT_LE(frobenius_distance(reconstruct(e), m), 1e-10 * 64);
}

TEST(NumericRank, Examples) {
  EXPECT_EQ(numeric_rank(Matrix::outer(testing::ket("0"), testing::ket("0"))), 1u);
  EXPECT_EQ(numeric_rank(Matrix::identity(8) * cplx(1.0 / 8)), 8u);
  const cplx a = std::sqrt(0.8), b = std::sqrt(0.2), z = 0.5;
  // Oracle: the only nonzero block is [[|a|^2, z a b*], [.., |b|^2]], whose
  // eigenvalues (1 -+ sqrt((|a|^2-|b|^2)^2 + 4|z|^2|ab|^2)) / 2 are both positive.
  const double disc = std::sqrt(std::pow(0.8 - 0.2, 2) + 4 * 0.25 * 0.16);
  ASSERT_GT((1 - disc) / 2, 1e-3);
  EXPECT_EQ(numeric_rank(testing::ghz_family_oracle(3, a, b, z)), 2u);
}

TEST(NumericRank, RejectsNonPsdAndBadThreshold) {
  EXPECT_THROW(numeric_rank(mat2(1.0, 0.0, 0.0, -0.1)), InvalidInput);
  EXPECT_THROW(numeric_rank(Matrix::identity(2), 0.0), InvalidInput);
}

TEST(NumericRank, MonotoneInThreshold) {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.next() % 8;
    Matrix g = random_hermitian(d, rng);
    Matrix psd = g * g.adjoint();
    std::size_t prev = d + 1;
    for (double t = 1e-12; t < 1e3; t *= 3.7) {
      const std::size_t r = numeric_rank(psd, t);
      EXPECT_LE(r, prev);
      prev = r;
    }
  }
}

TEST(NumericRank, PureProjectorsHaveRankOne) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto psi = haar_random_state(1 + static_cast<int>(seed % 5), seed);
    EXPECT_EQ(numeric_rank(psi.projector_matrix()), 1u);
  }
}

TEST(PsdTest, AgreesWithSpectrum) {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + rng.next() % 10;
    const Matrix m = random_hermitian(d, rng);
    const double slack = 0.5 * rng.uniform();
    const double lo = hermitian_eig(m).values.front();
    if (std::abs(lo + slack) < 1e-9) continue;
    EXPECT_EQ(psd_within(m, slack), lo > -slack);
  }
}

TEST(SplitMix64, ReferenceStream) {
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(g.next(), 0x6E789E6AA1B965F4ULL);
}

TEST(HaarRandomState, NormalizedAndDeterministic) {
  const auto a = haar_random_state(3, 42);
  const auto b = haar_random_state(3, 42);
  EXPECT_NEAR(norm(a.amps()), 1.0, 1e-12);
  EXPECT_EQ(a.amps(), b.amps());
  const auto c = haar_random_state(3, 43);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) diff = std::max(diff, std::abs(a[i] - c[i]));
  EXPECT_GT(diff, 1e-6);
  EXPECT_THROW(haar_random_state(0, 1), InvalidInput);
}

TEST(RandomUnitary, IsUnitary) {
  SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Matrix u = random_unitary2(rng);
    EXPECT_LE(frobenius_distance(u * u.adjoint(), Matrix::identity(2)), 1e-14);
  }
}

TEST(MultiIndex, ComplementIsAnInvolutionExhaustively) {
  for (int n = 1; n <= 6; ++n)
    for (std::size_t f = 0; f < dim_of(n); ++f) {
      const auto idx = MultiIndex::from_flat(n, f);
      ASSERT_EQ(idx.flat(), f);
      ASSERT_EQ(idx.bits().size(), static_cast<std::size_t>(n));
      for (int j = 1; j <= n; ++j) {
        const auto c = idx.complemented(j);
        ASSERT_NE(c, idx);
        ASSERT_EQ(c.hamming(idx), 1);
        ASSERT_EQ(c.complemented(j), idx);
      }
    }
}

TEST(MultiIndex, QubitOneIsMostSignificant) {
  const auto idx = MultiIndex::from_flat(3, 0b100);
  EXPECT_EQ(idx[1], 1u);
  EXPECT_EQ(idx[2], 0u);
  EXPECT_EQ(idx.to_string(), "100");
  EXPECT_THROW(MultiIndex(2, {0, 2}), InvalidInput);
  EXPECT_THROW(idx.complemented(4), InvalidInput);
}

TEST(BitHelpers, InsertRemoveRoundTrip) {
  for (int n = 2; n <= 5; ++n)
    for (int j = 1; j <= n; ++j)
      for (std::size_t f = 0; f < dim_of(n); ++f) {
        const unsigned b = get_bit(f, n, j);
        ASSERT_EQ(insert_bit(remove_bit(f, n, j), n, j, b), f);
      }
}

TEST(PauliWord, MatchesKroneckerProductAndIsHermitianUnitary) {
  const Matrix paulis[4] = {Matrix::identity(2), mat2(0, 1, 1, 0), mat2(0, cplx(0, -1), cplx(0, 1), 0),
                            mat2(1, 0, 0, -1)};
  for (int n = 1; n <= 3; ++n) {
    const std::size_t count = static_cast<std::size_t>(std::pow(4, n));
    for (std::size_t code = 0; code < count; ++code) {
      std::vector<Pauli> letters;
      Matrix oracle = Matrix::identity(1);
      std::size_t c = code;
      for (int q = 0; q < n; ++q) {
        const int l = static_cast<int>(c % 4);
        c /= 4;
        letters.push_back(static_cast<Pauli>(l));
        oracle = kron(oracle, paulis[l]);
      }
      const PauliWord w(letters);
      const Matrix m = w.matrix();
      ASSERT_LE(frobenius_distance(m, oracle), 1e-15) << w.to_string();
      ASSERT_LE(m.max_asymmetry(), 0.0);
      ASSERT_LE(frobenius_distance(m * m, Matrix::identity(dim_of(n))), 1e-15);
      if (w.weight() > 0) ASSERT_EQ(m.trace(), cplx(0.0));
      else ASSERT_EQ(m.trace(), cplx(static_cast<double>(dim_of(n))));
    }
  }
  EXPECT_EQ(PauliWord::parse("XIZ").weight(), 2);
  EXPECT_THROW(PauliWord::parse("XQ"), InvalidInput);
}

TEST(States, PureStateRejectsUnnormalized) {
  EXPECT_THROW(PureState(1, CVector{1.0, 1.0}), InvalidInput);
  EXPECT_THROW(PureState(2, CVector{1.0, 0.0}), InvalidInput);
  EXPECT_NO_THROW(PureState(CVector{1.0, 0.0}));
}

TEST(States, DensityMatrixInvariants) {
  EXPECT_NO_THROW(DensityMatrix(Matrix::identity(4) * cplx(0.25)));
  EXPECT_THROW(DensityMatrix(Matrix::identity(4) * cplx(0.3)), InvalidInput);           // trace
  EXPECT_THROW(DensityMatrix(mat2(0.5, 0.1, 0.2, 0.5)), InvalidInput);                 // Hermitian
  EXPECT_THROW(DensityMatrix(mat2(1.1, 0.0, 0.0, -0.1)), InvalidInput);                // PSD
  EXPECT_THROW(DensityMatrix(Matrix::identity(3) * cplx(1.0 / 3)), InvalidInput);      // not 2^n
}

TEST(QubitOps, InsertAndContractAreInverse) {
  const auto chi = haar_random_state(3, 11);
  const CVector x{cplx(0.6, 0.0), cplx(0.0, 0.8)};
  for (int j = 1; j <= 4; ++j) {
    const auto v = insert_qubit(chi.amps(), x, 4, j);
    const auto back = contract_slot(v, x, 4, j);
    EXPECT_LE(distance(back, chi.amps()), 1e-15);
    const auto xb = contract_rest(v, chi.amps(), 4, j);
    EXPECT_LE(distance(xb, x), 1e-15);
  }
}

TEST(QubitOps, LocalConjugationMatchesKronecker) {
  SplitMix64 rng(8);
  const auto us = random_local_unitaries(3, rng);
  const Matrix big = kron(kron(us[0], us[1]), us[2]);
  const Matrix rho = haar_random_state(3, 2).projector_matrix();
  EXPECT_LE(frobenius_distance(conjugate_local(rho, us), big * rho * big.adjoint()), 1e-14);
  const auto psi = haar_random_state(3, 4);
  EXPECT_LE(distance(apply_local(psi.amps(), us), big.apply(psi.amps())), 1e-14);
}

}  // namespace
}  // namespace qmarg
