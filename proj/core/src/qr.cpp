#include "apsolve/qr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace apsolve {

namespace {

// Column-major scratch copy; Householder works column by column.
struct ColMajor {
  std::size_t rows;
  std::size_t cols;
  Vector a;

  explicit ColMajor(const DenseMatrix& m) : rows(m.rows()), cols(m.cols()), a(m.rows() * m.cols()) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) a[j * rows + i] = m(i, j);
  }

  double* col(std::size_t j) { return a.data() + j * rows; }
};

// Reflector I - 2 v v^T acting on rows [k, rows); v has unit norm or is zero.
struct Reflector {
  std::size_t k;
  Vector v;

  void apply(double* x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * x[k + i];
    if (s == 0.0) return;
    s *= 2.0;
    for (std::size_t i = 0; i < v.size(); ++i) x[k + i] -= s * v[i];
  }
};

// Build the reflector that zeroes x[k+1..) of column x; returns the new x[k].
double make_reflector(const double* x, std::size_t k, std::size_t rows, Reflector& h) {
  h.k = k;
  h.v.assign(x + k, x + rows);
  const double xn = norm2(h.v);
  if (xn == 0.0) {
    h.v.clear();
    return 0.0;
  }
  const double alpha = h.v[0] >= 0.0 ? -xn : xn;
  h.v[0] -= alpha;
  const double vn = norm2(h.v);
  if (vn == 0.0) {
    h.v.clear();
    return x[k];
  }
  for (double& e : h.v) e /= vn;
  return alpha;
}

DenseMatrix form_thin_q(const std::vector<Reflector>& hs, std::size_t rows, std::size_t ncols) {
  ColMajor q(DenseMatrix(rows, ncols));
  for (std::size_t j = 0; j < ncols; ++j) q.col(j)[j] = 1.0;
  for (std::size_t k = hs.size(); k-- > 0;) {
    if (hs[k].v.empty()) continue;
    for (std::size_t j = 0; j < ncols; ++j) hs[k].apply(q.col(j));
  }
  DenseMatrix out(rows, ncols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < ncols; ++j) out(i, j) = q.a[j * rows + i];
  return out;
}

// Make diag(R) nonnegative by flipping matching columns of Q.
void normalize_signs(DenseMatrix& q, DenseMatrix& r) {
  for (std::size_t k = 0; k < r.rows(); ++k) {
    if (r(k, k) >= 0.0) continue;
    for (std::size_t j = k; j < r.cols(); ++j) r(k, j) = -r(k, j);
    for (std::size_t i = 0; i < q.rows(); ++i) q(i, k) = -q(i, k);
  }
}

bool negligible_pivot(double d) { return !(std::abs(d) > std::numeric_limits<double>::min()); }

void check_triangular(const DenseMatrix& r, std::size_t n) {
  if (r.rows() != r.cols()) throw DimensionError("triangular solve: matrix is not square");
  if (n != r.rows()) throw DimensionError("triangular solve: rhs length mismatch");
}

}  // namespace

QrFactors householder_qr(const DenseMatrix& m, double rank_tol) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows < cols) throw DimensionError("householder_qr: needs rows >= cols");
  const double threshold = rank_tol * m.frobenius_norm();

  ColMajor w(m);
  std::vector<Reflector> hs(cols);
  DenseMatrix r(cols, cols);
  for (std::size_t k = 0; k < cols; ++k) {
    const double diag = make_reflector(w.col(k), k, rows, hs[k]);
    if (rank_tol > 0.0 && !(std::abs(diag) > threshold)) throw RankDeficient(k);
    r(k, k) = diag;
    if (hs[k].v.empty()) continue;
    for (std::size_t j = k + 1; j < cols; ++j) hs[k].apply(w.col(j));
  }
  for (std::size_t k = 0; k < cols; ++k)
    for (std::size_t j = k + 1; j < cols; ++j) r(k, j) = w.col(j)[k];

  QrFactors f{form_thin_q(hs, rows, cols), std::move(r)};
  normalize_signs(f.q, f.r);
  return f;
}

PivotedQr householder_qr_pivoted(const DenseMatrix& m, double rank_tol) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const double threshold = rank_tol * m.frobenius_norm();

  ColMajor w(m);
  std::vector<std::size_t> perm(cols);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<Reflector> hs;
  const std::size_t steps = std::min(rows, cols);
  std::size_t rank = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    // Norms are recomputed rather than downdated; the snapshot matrices are narrow.
    std::size_t best = k;
    double best_norm = -1.0;
    for (std::size_t j = k; j < cols; ++j) {
      const double nj = norm2(std::span<const double>(w.col(j) + k, rows - k));
      if (nj > best_norm) {
        best_norm = nj;
        best = j;
      }
    }
    if (!(best_norm > threshold) || best_norm == 0.0) break;
    if (best != k) {
      std::swap_ranges(w.col(k), w.col(k) + rows, w.col(best));
      std::swap(perm[k], perm[best]);
    }
    Reflector h;
    const double diag = make_reflector(w.col(k), k, rows, h);
    w.col(k)[k] = diag;
    for (std::size_t i = k + 1; i < rows; ++i) w.col(k)[i] = 0.0;
    if (!h.v.empty())
      for (std::size_t j = k + 1; j < cols; ++j) h.apply(w.col(j));
    hs.push_back(std::move(h));
    ++rank;
  }

  PivotedQr out;
  out.rank = rank;
  out.perm = std::move(perm);
  out.r = DenseMatrix(rank, rank);
  for (std::size_t k = 0; k < rank; ++k)
    for (std::size_t j = k; j < rank; ++j) out.r(k, j) = w.col(j)[k];
  out.q = form_thin_q(hs, rows, rank);
  normalize_signs(out.q, out.r);
  return out;
}

Vector tri_upper_solve(const DenseMatrix& r, std::span<const double> b) {
  const std::size_t n = b.size();
  check_triangular(r, n);
  Vector y(b.begin(), b.end());
  for (std::size_t i = n; i-- > 0;) {
    if (negligible_pivot(r(i, i))) throw SingularTriangular(i);
    double s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= r(i, j) * y[j];
    y[i] = s / r(i, i);
  }
  return y;
}

Vector tri_upper_transpose_solve(const DenseMatrix& r, std::span<const double> b) {
  const std::size_t n = b.size();
  check_triangular(r, n);
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (negligible_pivot(r(i, i))) throw SingularTriangular(i);
    double s = y[i];
    for (std::size_t j = 0; j < i; ++j) s -= r(j, i) * y[j];
    y[i] = s / r(i, i);
  }
  return y;
}

Vector cholesky_solve(const DenseMatrix& spd, std::span<const double> b) {
  const std::size_t n = spd.rows();
  if (spd.cols() != n) throw DimensionError("cholesky_solve: matrix is not square");
  if (b.size() != n) throw DimensionError("cholesky_solve: rhs length mismatch");
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = spd(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw SingularSystem("cholesky_solve: not positive definite at pivot " + std::to_string(j));
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = spd(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
    y[i] /= l(i, i);
  }
  return y;
}

Vector dense_solve(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() != a.cols()) throw DimensionError("dense_solve: matrix is not square");
  if (b.size() != a.rows()) throw DimensionError("dense_solve: rhs length mismatch");
  const QrFactors f = householder_qr(a, 0.0);
  Vector qtb(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) qtb[j] += f.q(i, j) * b[i];
  return tri_upper_solve(f.r, qtb);
}

}  // namespace apsolve
