#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rowdae/linalg.hpp"
#include "rowdae/tableau.hpp"

using namespace rowdae;

namespace {

DenseMatrix permuted(const DenseMatrix& a, const std::vector<std::size_t>& perm) {
  DenseMatrix p(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) p(i, j) = a(perm[i], j);
  }
  return p;
}

DenseMatrix lower_of(const LUFactorization& lu) {
  const std::size_t n = lu.size();
  DenseMatrix l = DenseMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) l(i, j) = lu.factors(i, j);
  }
  return l;
}

DenseMatrix upper_of(const LUFactorization& lu) {
  const std::size_t n = lu.size();
  DenseMatrix u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) u(i, j) = lu.factors(i, j);
  }
  return u;
}

double max_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  }
  return d;
}

DenseMatrix hilbert(std::size_t n) {
  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
  }
  return h;
}

}  // namespace

TEST(LuFactor, IdentityHasTrivialFactors) {
  const auto lu = lu_factor(DenseMatrix::identity(3));
  EXPECT_EQ(lu.factors, DenseMatrix::identity(3));
  EXPECT_EQ(lu.pivots, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(LuFactor, PermutationMatrixSolve) {
  const auto lu = lu_factor(DenseMatrix{{0, 1}, {1, 0}});
  const auto x = lu_solve(lu, Vector{1, 2});
  EXPECT_DOUBLE_EQ(x[0], 2.0);
  EXPECT_DOUBLE_EQ(x[1], 1.0);
}

TEST(LuFactor, HilbertReconstructs) {
  const auto a = hilbert(4);
  const auto lu = lu_factor(a);
  EXPECT_LE(max_diff(permuted(a, lu.pivots), matmul(lower_of(lu), upper_of(lu))), 1e-10);
}

TEST(LuFactor, RandomReconstructsToRelativeRoundoff) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(8, 8);
  for (double& v : a.data()) v = u(rng);
  const auto lu = lu_factor(a);
  EXPECT_LE(max_diff(permuted(a, lu.pivots), matmul(lower_of(lu), upper_of(lu))),
            1e-12 * a.max_abs());
}

TEST(LuFactor, SingularMatrixThrows) {
  EXPECT_THROW(lu_factor(DenseMatrix{{1, 2}, {2, 4}}), SingularMatrix);
  EXPECT_THROW(lu_factor(DenseMatrix(3, 3)), SingularMatrix);
}

TEST(LuFactor, PivotBelowRelativeThresholdIsSingular) {
  EXPECT_THROW(lu_factor(DenseMatrix{{1.0, 0.0}, {0.0, 1e-15}}), SingularMatrix);
  EXPECT_NO_THROW(lu_factor(DenseMatrix{{1.0, 0.0}, {0.0, 1e-13}}));
}

TEST(LuFactor, NonFiniteInputThrows) {
  EXPECT_THROW(lu_factor(DenseMatrix{{NAN, 0.0}, {0.0, 1.0}}), NonFiniteState);
}

TEST(LuFactor, NonSquareThrows) {
  EXPECT_THROW(lu_factor(DenseMatrix(2, 3)), DimensionMismatch);
}

TEST(LuSolve, IdentityReturnsRhs) {
  const auto x = lu_solve(lu_factor(DenseMatrix::identity(3)), Vector{1, -2, 3});
  EXPECT_EQ(x, (Vector{1, -2, 3}));
}

TEST(LuSolve, Diagonal) {
  const auto x = lu_solve(lu_factor(DenseMatrix{{2, 0}, {0, 4}}), Vector{2, 8});
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(LuSolve, RecoversChosenSolution) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(10, 10);
  for (double& v : a.data()) v = u(rng);
  for (std::size_t i = 0; i < 10; ++i) a(i, i) += 4.0;
  Vector xs(10);
  for (double& v : xs) v = u(rng);
  const auto b = matvec(a, xs);
  const auto x = lu_solve(lu_factor(a), b);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(x[i], xs[i], 1e-9);
  auto r = matvec(a, x);
  for (std::size_t i = 0; i < 10; ++i) r[i] -= b[i];
  EXPECT_LE(norm2(r), 1e-10 * norm2(b));
}

TEST(LuSolve, WrongLengthThrows) {
  EXPECT_THROW(lu_solve(lu_factor(DenseMatrix::identity(2)), Vector{1, 2, 3}), DimensionMismatch);
}

TEST(Invert, Scalar) {
  const auto inv = invert(DenseMatrix{{0.15}});
  EXPECT_NEAR(inv(0, 0), 1.0 / 0.15, 1e-14);
}

TEST(Invert, UnitLowerTriangularStaysTriangular) {
  const DenseMatrix a{{1, 0, 0}, {2, 1, 0}, {-3, 0.5, 1}};
  const auto inv = invert(a);
  EXPECT_EQ(inv(0, 1), 0.0);
  EXPECT_EQ(inv(0, 2), 0.0);
  EXPECT_EQ(inv(1, 2), 0.0);
  EXPECT_LE(max_diff(matmul(a, inv), DenseMatrix::identity(3)), 1e-14);
}

TEST(Invert, Tsit5daBetaTimesWIsIdentity) {
  const auto t = tsit5da();
  const auto w = invert(t.beta());
  EXPECT_LE(max_diff(matmul(t.beta(), w), DenseMatrix::identity(t.stages())), 1e-9);
}

TEST(Invert, GeneralMatrix) {
  const DenseMatrix a{{4, 1, 2}, {1, 3, 0}, {2, 0, 5}};
  EXPECT_LE(max_diff(matmul(a, invert(a)), DenseMatrix::identity(3)), 1e-10);
}

TEST(Invert, SingularThrows) {
  EXPECT_THROW(invert(DenseMatrix{{1, 0}, {1, 0}}), SingularMatrix);
  EXPECT_THROW(invert(DenseMatrix{{1, 2}, {2, 4}}), SingularMatrix);
}

TEST(VectorOps, Basics) {
  EXPECT_EQ(hadamard(Vector{1, 2}, Vector{3, 4}), (Vector{3, 8}));
  EXPECT_DOUBLE_EQ(dot(Vector{1, 2}, Vector{3, 4}), 11.0);
  EXPECT_DOUBLE_EQ(norm_inf(Vector{1, -5, 2}), 5.0);
  EXPECT_EQ(vecmat(Vector{1, 1}, DenseMatrix{{1, 2}, {3, 4}}), (Vector{4, 6}));
  EXPECT_THROW(dot(Vector{1}, Vector{1, 2}), DimensionMismatch);
}
