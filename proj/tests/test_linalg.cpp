#include <apsolve/linalg.hpp>
#include <apsolve/matrix_market.hpp>
#include <apsolve/problems.hpp>
#include <apsolve/qr.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bridge.hpp"
#include "oracles.hpp"

using namespace apsolve;

namespace {

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double orthonormality_defect(const DenseMatrix& q) {
  const DenseMatrix qtq = multiply(q.transpose(), q);
  return max_abs_diff(qtq, DenseMatrix::identity(q.cols()));
}

double reconstruction_error(const QrFactors& f, const DenseMatrix& m) {
  const DenseMatrix qr = multiply(f.q, f.r);
  double num = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) num += (qr(i, j) - m(i, j)) * (qr(i, j) - m(i, j));
  return std::sqrt(num) / m.frobenius_norm();
}

DenseMatrix random_dense(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

}  // namespace

TEST(Spmv, IdentityReturnsInput) {
  const Vector v{1, 2, 3};
  EXPECT_EQ(spmv(CsrMatrix::identity(3), v), v);
}

TEST(Spmv, TridiagOnConstantVector) {
  EXPECT_EQ(spmv(gen_tridiag(-1, 2, -1, 3), Vector{1, 1, 1}), (Vector{1, 0, 1}));
}

TEST(Spmv, DenseTwoByTwo) {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(spmv(a, Vector{1, 1}), (Vector{3, 7}));
}

TEST(Spmv, DimensionMismatchThrows) {
  EXPECT_THROW(spmv(CsrMatrix::identity(3), Vector{1, 2}), DimensionError);
  EXPECT_THROW(transpose_spmv(CsrMatrix::identity(3), Vector{1, 2}), DimensionError);
}

TEST(TransposeSpmv, Examples) {
  EXPECT_EQ(transpose_spmv(CsrMatrix::identity(3), Vector{1, 2, 3}), (Vector{1, 2, 3}));
  EXPECT_EQ(transpose_spmv(DenseMatrix::from_rows({{1, 2}, {3, 4}}), Vector{1, 1}), (Vector{4, 6}));
  EXPECT_EQ(transpose_spmv(DenseMatrix(3, 2), Vector{1, 2, 3}), (Vector{0, 0}));
}

TEST(Spmv, CsrMatchesDensifiedCopy) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::bernoulli_distribution keep(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 15; ++i)
      for (std::size_t j = 0; j < 11; ++j)
        if (keep(rng)) t.push_back({i, j, u(rng)});
    const CsrMatrix csr = CsrMatrix::from_triplets(15, 11, t);
    const DenseMatrix dense = csr.to_dense();
    const oracle::Vec v = oracle::random_vector(11, rng);
    const Vector ys = spmv(csr, v);
    const Vector yd = spmv(dense, v);
    const oracle::Vec yo = oracle::matvec(bridge::to_rows(dense), v);
    ASSERT_EQ(ys.size(), yd.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
      EXPECT_NEAR(ys[i], yd[i], 1e-14 * (1.0 + std::abs(yd[i])));
      EXPECT_NEAR(ys[i], yo[i], 1e-14 * (1.0 + std::abs(yo[i])));
    }
  }
}

TEST(CsrMatrix, RejectsBrokenInvariants) {
  EXPECT_THROW(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), InvalidMatrix);            // row_ptr too short
  EXPECT_THROW(CsrMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 2.0}), InvalidMatrix);    // unsorted columns
  EXPECT_THROW(CsrMatrix(1, 2, {0, 1}, {2}, {1.0}), InvalidMatrix);            // column out of range
  EXPECT_THROW(CsrMatrix(1, 2, {0, 1}, {0}, {0.0}), InvalidMatrix);            // stored zero
  EXPECT_THROW(CsrMatrix(1, 2, {0, 1}, {0}, {std::nan("")}), InvalidMatrix);  // non-finite
  EXPECT_NO_THROW(CsrMatrix(2, 2, {0, 1, 2}, {1, 0}, {1.0, 2.0}));
}

TEST(CsrMatrix, TripletsSumDuplicatesAndDropZeros) {
  const CsrMatrix m = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 1, 1.0}, {1, 1, -1.0}});
  EXPECT_EQ(m.nnz(), 1u);
  EXPECT_EQ(m.to_dense()(0, 0), 3.0);
}

TEST(DenseMatrix, RejectsNonFinite) {
  EXPECT_THROW(DenseMatrix(1, 1, Vector{INFINITY}), InvalidMatrix);
  EXPECT_THROW(DenseMatrix(2, 2, Vector{1, 2, 3}), InvalidMatrix);
}

TEST(HouseholderQr, IdentityGivesIdentity) {
  const QrFactors f = householder_qr(DenseMatrix::identity(3));
  EXPECT_LE(max_abs_diff(f.q, DenseMatrix::identity(3)), 1e-15);
  EXPECT_LE(max_abs_diff(f.r, DenseMatrix::identity(3)), 1e-15);
}

TEST(HouseholderQr, SingleColumn) {
  const QrFactors f = householder_qr(DenseMatrix(2, 1, Vector{3, 4}));
  EXPECT_NEAR(std::abs(f.q(0, 0)), 0.6, 1e-15);
  EXPECT_NEAR(std::abs(f.q(1, 0)), 0.8, 1e-15);
  EXPECT_NEAR(std::abs(f.r(0, 0)), 5.0, 1e-15);
}

TEST(HouseholderQr, RandomReconstructsAndIsOrthonormal) {
  std::mt19937_64 rng(11);
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{4, 2}, {10, 10}, {40, 7}, {25, 25}}) {
    const DenseMatrix m = random_dense(r, c, rng);
    const QrFactors f = householder_qr(m);
    EXPECT_LE(orthonormality_defect(f.q), 1e-12);
    EXPECT_LE(reconstruction_error(f, m), 1e-12);
    for (std::size_t i = 0; i < f.r.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(f.r(i, j), 0.0);
  }
}

TEST(HouseholderQr, RankDeficientReportsColumn) {
  const DenseMatrix m = DenseMatrix::from_rows({{1, 2, 1}, {2, 4, 0}, {3, 6, 1}});
  try {
    householder_qr(m);
    FAIL() << "expected RankDeficient";
  } catch (const RankDeficient& e) {
    EXPECT_EQ(e.column(), 1u);
    EXPECT_FALSE(e.block().has_value());
  }
}

TEST(HouseholderQr, PivotedFindsRank) {
  std::mt19937_64 rng(3);
  DenseMatrix m = random_dense(12, 5, rng);
  for (std::size_t i = 0; i < 12; ++i) {
    m(i, 3) = m(i, 0) + 2 * m(i, 1);
    m(i, 4) = -m(i, 2);
  }
  const PivotedQr f = householder_qr_pivoted(m);
  EXPECT_EQ(f.rank, 3u);
  EXPECT_LE(orthonormality_defect(f.q), 1e-12);
  // Kept columns are reproduced by Q R.
  const DenseMatrix qr = multiply(f.q, f.r);
  for (std::size_t j = 0; j < f.rank; ++j)
    for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(qr(i, j), m(i, f.perm[j]), 1e-12);
}

TEST(TriangularSolve, Examples) {
  EXPECT_EQ(tri_upper_solve(DenseMatrix::identity(3), Vector{1, 2, 3}), (Vector{1, 2, 3}));
  const DenseMatrix r = DenseMatrix::from_rows({{2, 1}, {0, 3}});
  const Vector y = tri_upper_solve(r, Vector{4, 3});
  EXPECT_DOUBLE_EQ(y[0], 1.5);
  EXPECT_DOUBLE_EQ(y[1], 1.0);
  const Vector z = tri_upper_transpose_solve(r, Vector{4, 5});  // [[2,0],[1,3]] z = (4,5)
  EXPECT_DOUBLE_EQ(z[0], 2.0);
  EXPECT_DOUBLE_EQ(z[1], 1.0);
}

TEST(TriangularSolve, ZeroDiagonalThrows) {
  const DenseMatrix r = DenseMatrix::from_rows({{1, 1}, {0, 0}});
  try {
    tri_upper_solve(r, Vector{1, 1});
    FAIL();
  } catch (const SingularTriangular& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_THROW(tri_upper_transpose_solve(r, Vector{1, 1}), SingularTriangular);
}

TEST(TriangularSolve, BackwardAccurateUpToCondition1e8) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30;
    DenseMatrix r(n, n);
    // Diagonal spread sets the conditioning to about 1e8.
    for (std::size_t i = 0; i < n; ++i) {
      r(i, i) = std::pow(10.0, -8.0 * static_cast<double>(i) / (n - 1));
      for (std::size_t j = i + 1; j < n; ++j) r(i, j) = 1e-9 * u(rng);
    }
    const oracle::Vec b = oracle::random_vector(n, rng);
    const Vector y = tri_upper_solve(r, b);
    const oracle::Vec ry = oracle::matvec(bridge::to_rows(r), y);
    EXPECT_LE(oracle::norm(oracle::sub(ry, b)), 1e-12 * oracle::norm(b));
    const Vector z = tri_upper_transpose_solve(r, b);
    const oracle::Vec rtz = oracle::matvec(oracle::transpose(bridge::to_rows(r)), z);
    EXPECT_LE(oracle::norm(oracle::sub(rtz, b)), 1e-12 * oracle::norm(b));
  }
}

TEST(DenseSolve, MatchesGaussianElimination) {
  std::mt19937_64 rng(17);
  const oracle::Mat a = oracle::random_well_conditioned(15, rng);
  const oracle::Vec b = oracle::random_vector(15, rng);
  const Vector x = dense_solve(bridge::to_dense(a), b);
  const oracle::Vec xo = oracle::gauss_solve(a, b);
  EXPECT_LE(oracle::norm(oracle::sub(x, xo)), 1e-12 * oracle::norm(xo));
}

TEST(CholeskySolve, SolvesSpdAndRejectsIndefinite) {
  const DenseMatrix a = DenseMatrix::from_rows({{4, 1}, {1, 3}});
  const Vector x = cholesky_solve(a, Vector{1, 2});
  EXPECT_NEAR(4 * x[0] + x[1], 1.0, 1e-15);
  EXPECT_NEAR(x[0] + 3 * x[1], 2.0, 1e-15);
  EXPECT_THROW(cholesky_solve(DenseMatrix::from_rows({{1, 2}, {2, 1}}), Vector{1, 1}), SingularSystem);
}

TEST(MatrixMarket, CoordinateRoundTrip) {
  const CsrMatrix a = gen_tridiag(-1, 2, -1.05, 7);
  std::stringstream ss;
  write_matrix_market(ss, a);
  const Matrix back = read_matrix_market(ss);
  ASSERT_TRUE(back.is_sparse());
  EXPECT_EQ(*back.as_csr(), a);
}

TEST(MatrixMarket, ArrayRoundTrip) {
  const DenseMatrix h = gen_hilbert(4);
  std::stringstream ss;
  write_matrix_market(ss, h);
  const Matrix back = read_matrix_market(ss);
  ASSERT_FALSE(back.is_sparse());
  EXPECT_EQ(*back.as_dense(), h);
}

TEST(MatrixMarket, SymmetricCoordinateExpands) {
  std::stringstream ss(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 2.0\n2 1 -1.0\n");
  const DenseMatrix d = read_matrix_market(ss).to_dense();
  EXPECT_EQ(d, DenseMatrix::from_rows({{2, -1}, {-1, 0}}));
}

TEST(MatrixMarket, RejectsGarbage) {
  std::stringstream bad_banner("hello\n1 1 1\n");
  EXPECT_THROW(read_matrix_market(bad_banner), InvalidMatrix);
  std::stringstream bad_index("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
  EXPECT_THROW(read_matrix_market(bad_index), InvalidMatrix);
  std::stringstream truncated("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n");
  EXPECT_THROW(read_matrix_market(truncated), InvalidMatrix);
}

TEST(VectorIo, RoundTripIsExact) {
  const Vector v{1.0 / 3.0, -2.5e-300, 7.0, std::exp(3.5)};
  std::stringstream ss;
  write_vector(ss, v);
  EXPECT_EQ(read_vector(ss), v);
}
