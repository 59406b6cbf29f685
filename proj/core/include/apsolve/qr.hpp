#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "apsolve/linalg.hpp"

namespace apsolve {

inline constexpr double kDefaultRankTol = 1e-12;

/// Thin factorization M = Q R with Q (rows x cols) orthonormal and R
/// (cols x cols) upper triangular.
struct QrFactors {
  DenseMatrix q;
  DenseMatrix r;
};

/// Householder QR without pivoting. Throws RankDeficient(j) when
/// |R[j,j]| < rank_tol * ||M||_F. rank_tol = 0 disables the check.
QrFactors householder_qr(const DenseMatrix& m, double rank_tol = kDefaultRankTol);

/// Column-pivoted Householder QR truncated at the numerical rank:
/// M[:, perm[0..rank)] = Q R with Q (rows x rank) and R (rank x rank).
/// Columns perm[rank..) were judged dependent.
struct PivotedQr {
  DenseMatrix q;
  DenseMatrix r;
  std::vector<std::size_t> perm;
  std::size_t rank = 0;
};

PivotedQr householder_qr_pivoted(const DenseMatrix& m, double rank_tol = kDefaultRankTol);

/// Solve R y = b, R upper triangular. Throws SingularTriangular(j) for a zero
/// or negligible diagonal entry.
Vector tri_upper_solve(const DenseMatrix& r, std::span<const double> b);
/// Solve R^T y = b.
Vector tri_upper_transpose_solve(const DenseMatrix& r, std::span<const double> b);

/// Solve a symmetric positive definite system. Throws SingularSystem if the
/// matrix is not numerically positive definite.
Vector cholesky_solve(const DenseMatrix& spd, std::span<const double> b);

/// Square dense solve through unpivoted Householder QR, no rank check.
Vector dense_solve(const DenseMatrix& a, std::span<const double> b);

}  // namespace apsolve
