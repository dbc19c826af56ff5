// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <vector>

#include "fdrelay/matrix_core.hpp"
#include "fdrelay/validation.hpp"
#include "test_support.hpp"

namespace fdrelay {
namespace {

using testing::max_abs;

TEST(Vec, StacksColumns) {
  CMatrix a(2, 2);
  a << 1, 3, 2, 4;
  const CVector v = vec(a);
  ASSERT_EQ(v.size(), 4);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(v(i), Complex(i + 1, 0));
}

TEST(Vec, IdentityAndRoundtrip) {
  const CVector v = vec(CMatrix::Identity(2, 2));
  EXPECT_EQ(v(0), Complex(1, 0));
  EXPECT_EQ(v(1), Complex(0, 0));
  EXPECT_EQ(v(2), Complex(0, 0));
  EXPECT_EQ(v(3), Complex(1, 0));

  auto rng = SeededRng::substream(3, {1});
  for (auto [r, c] : std::vector<std::pair<int, int>>{{3, 3}, {2, 5}, {1, 4}}) {
    const CMatrix a = rng.complex_gaussian(r, c);
    EXPECT_EQ(mat(vec(a), r, c), a);  // bitwise
  }
}

TEST(Vec, MatRejectsWrongLength) {
  EXPECT_THROW(mat(CVector::Zero(5), 2, 2), DimensionMismatch);
}

TEST(Kron, IdentityFactorGivesBlockDiagonal) {
  auto rng = SeededRng::substream(4, {1});
  const CMatrix b = rng.complex_gaussian(3, 3);
  const CMatrix k = kron(CMatrix::Identity(2, 2), b);
  EXPECT_EQ(k.block(0, 0, 3, 3), b);
  EXPECT_EQ(k.block(3, 3, 3, 3), b);
  EXPECT_EQ(max_abs(k.block(0, 3, 3, 3)), 0.0);
  EXPECT_EQ(max_abs(k.block(3, 0, 3, 3)), 0.0);
}

TEST(Kron, ScalarFactor) {
  auto rng = SeededRng::substream(5, {1});
  const CMatrix b = rng.complex_gaussian(2, 3);
  CMatrix two(1, 1);
  two(0, 0) = 2.0;
  EXPECT_LE(max_abs(kron(two, b) - 2.0 * b), 0.0);
}

TEST(Kron, MixedProductAndTraceProperties) {
  auto rng = SeededRng::substream(6, {1});
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    const CMatrix a = rng.complex_gaussian(n, n);
    const CMatrix b = rng.complex_gaussian(n, n);
    const CMatrix c = rng.complex_gaussian(n, n);
    const CMatrix d = rng.complex_gaussian(n, n);
    EXPECT_LE(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
    EXPECT_LE(std::abs(kron(a, b).trace() - a.trace() * b.trace()), 1e-12);
  }
}

TEST(Kron, VecIdentityBehindTheSolver) {
  // vec(A X B) = (B^T kron A) vec(X)
  auto rng = SeededRng::substream(7, {1});
  const CMatrix a = rng.complex_gaussian(3, 3);
  const CMatrix x = rng.complex_gaussian(3, 3);
  const CMatrix b = rng.complex_gaussian(3, 3);
  EXPECT_LE((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm(), 1e-12);
}

TEST(SolveLinear, IdentitySystem) {
  auto rng = SeededRng::substream(8, {1});
  const CVector b = rng.complex_gaussian(4, 1);
  EXPECT_EQ(solve_linear(CMatrix::Identity(4, 4), b), b);
}

TEST(SolveLinear, ResidualOnRandomSystems) {
  auto rng = SeededRng::substream(9, {1});
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix k = rng.complex_gaussian(9, 9) + 3.0 * CMatrix::Identity(9, 9);
    const CVector b = rng.complex_gaussian(9, 1);
    const CVector x = solve_linear(k, b);
    EXPECT_LE((k * x - b).norm(), 1e-10);
  }
}

TEST(SolveLinear, SingularAndShapeErrors) {
  EXPECT_THROW(solve_linear(CMatrix::Zero(3, 3), CVector::Ones(3)),
               SingularSystem);
  CMatrix rank_one = CVector::Ones(3) * CVector::Ones(3).transpose();
  EXPECT_THROW(solve_linear(rank_one, CVector::Ones(3)), SingularSystem);
  EXPECT_THROW(solve_linear(CMatrix::Identity(3, 2), CVector::Ones(3)),
               DimensionMismatch);
  EXPECT_THROW(solve_linear(CMatrix::Identity(3, 3), CVector::Ones(2)),
               DimensionMismatch);
}

TEST(InverseHpd, InvertsAndRejectsIndefinite) {
  auto rng = SeededRng::substream(10, {1});
  const CMatrix g = rng.complex_gaussian(4, 4);
  const CMatrix a = g * g.adjoint() + CMatrix::Identity(4, 4);
  EXPECT_LE(max_abs(inverse_hpd(a) * a - CMatrix::Identity(4, 4)), 1e-12);
  EXPECT_THROW(inverse_hpd(-CMatrix::Identity(2, 2)), SingularSystem);
}

TEST(ChainTraceExpectation, HandValues) {
  const std::vector<CMatrix> two(2, CMatrix::Identity(2, 2));
  EXPECT_DOUBLE_EQ(chain_trace_expectation(two, 1.0), 4.0);
  const std::vector<CMatrix> three(3, CMatrix::Identity(2, 2));
  EXPECT_DOUBLE_EQ(chain_trace_expectation(three, 0.5), 2.0);
}

TEST(ChainTraceExpectation, RejectsShortOrRaggedLists) {
  const std::vector<CMatrix> one(1, CMatrix::Identity(2, 2));
  EXPECT_THROW(chain_trace_expectation(one, 1.0), std::invalid_argument);
  const std::vector<CMatrix> ragged{CMatrix::Identity(2, 2),
                                    CMatrix::Identity(3, 3)};
  EXPECT_THROW(chain_trace_expectation(ragged, 1.0), std::exception);
}

TEST(ChainTraceExpectation, AgreesWithSampledMean) {
  auto rng = SeededRng::substream(11, {1});
  std::vector<CMatrix> v;
  for (int j = 0; j < 3; ++j) v.push_back(rng.complex_gaussian(3, 3));
  const double exact = chain_trace_expectation(v, 0.2);
  const long long n = 100000;
  const McEstimate mc = chain_trace_mc_oracle(v, 0.2, n, 11);
  EXPECT_LE(mc.relative_error(exact), 5.0 / std::sqrt(double(n)))
      << "mc=" << mc.mean << " exact=" << exact;
  EXPECT_LE(std::abs(mc.z_score(exact)), 4.0);
}

TEST(Hermitian, Defect) {
  CMatrix a(2, 2);
  a << 1, Complex(0, 1), Complex(0, -1), 2;
  EXPECT_TRUE(is_hermitian(a));
  a(0, 1) = 5;
  EXPECT_FALSE(is_hermitian(a));
  EXPECT_FALSE(is_hermitian(CMatrix::Zero(2, 3)));
}

}  // namespace
}  // namespace fdrelay
