#include "apsolve/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace apsolve {

RankDeficient::RankDeficient(std::size_t column, std::optional<std::size_t> block)
    : Error(block ? "rank deficient at column " + std::to_string(column) + " of block " +
                        std::to_string(*block)
                  : "rank deficient at column " + std::to_string(column)),
      column_(column),
      block_(block) {}

SingularTriangular::SingularTriangular(std::size_t index)
    : Error("singular triangular factor at diagonal " + std::to_string(index)), index_(index) {}

SingularModifiedGram::SingularModifiedGram(double condition_estimate)
    : Error("rank-one modified Gram matrix is singular (condition estimate " +
            std::to_string(condition_estimate) + ")"),
      condition_estimate_(condition_estimate) {}

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  // Scaled accumulation so tiny/huge vectors (Hilbert residuals) do not underflow.
  double scale_v = 0.0;
  double ssq = 1.0;
  for (double v : a) {
    if (v == 0.0) continue;
    const double av = std::abs(v);
    if (scale_v < av) {
      ssq = 1.0 + ssq * (scale_v / av) * (scale_v / av);
      scale_v = av;
    } else {
      ssq += (av / scale_v) * (av / scale_v);
    }
  }
  return scale_v * std::sqrt(ssq);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_length(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "subtract");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// DenseMatrix
// ---------------------------------------------------------------------------

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw InvalidMatrix("DenseMatrix: non-finite fill value");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vector entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw InvalidMatrix("DenseMatrix: expected " + std::to_string(rows * cols) + " entries, got " +
                        std::to_string(data_.size()));
  }
  if (!all_finite(data_)) throw InvalidMatrix("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Vector data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidMatrix("DenseMatrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::frobenius_norm() const { return norm2(data_); }

DenseMatrix DenseMatrix::row_block(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) throw DimensionError("DenseMatrix::row_block: range out of bounds");
  Vector data(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
              data_.begin() + static_cast<std::ptrdiff_t>(end * cols_));
  return DenseMatrix(end - begin, cols_, std::move(data));
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto crow = c.row(i);
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// CsrMatrix
// ---------------------------------------------------------------------------

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, Vector values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1) throw InvalidMatrix("CsrMatrix: row_ptr must have rows+1 entries");
  if (row_ptr_.front() != 0) throw InvalidMatrix("CsrMatrix: row_ptr[0] must be 0");
  if (row_ptr_.back() != values_.size() || col_idx_.size() != values_.size()) {
    throw InvalidMatrix("CsrMatrix: row_ptr[rows] must equal nnz");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw InvalidMatrix("CsrMatrix: row_ptr not nondecreasing");
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw InvalidMatrix("CsrMatrix: column index out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) {
        throw InvalidMatrix("CsrMatrix: column indices not strictly increasing in row " +
                            std::to_string(i));
      }
      if (values_[k] == 0.0) throw InvalidMatrix("CsrMatrix: explicit zero stored");
      if (!std::isfinite(values_[k])) throw InvalidMatrix("CsrMatrix: non-finite value");
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw InvalidMatrix("from_triplets: index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  Vector values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  std::size_t k = 0;
  while (k < triplets.size()) {
    const std::size_t r = triplets[k].row;
    const std::size_t c = triplets[k].col;
    double sum = 0.0;
    while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) sum += triplets[k++].value;
    if (sum != 0.0) {
      col_idx.push_back(c);
      values.push_back(sum);
      ++row_ptr[r + 1];
    }
  }
  for (std::size_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& m) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) t.push_back({i, j, m(i, j)});
  return from_triplets(m.rows(), m.cols(), std::move(t));
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<std::size_t> row_ptr(n + 1);
  std::vector<std::size_t> col_idx(n);
  for (std::size_t i = 0; i <= n; ++i) row_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) col_idx[i] = i;
  return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), Vector(n, 1.0));
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
  return d;
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

std::size_t Matrix::rows() const noexcept {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

std::size_t Matrix::cols() const noexcept {
  return std::visit([](const auto& m) { return m.cols(); }, storage_);
}

std::size_t Matrix::nnz() const noexcept {
  if (const auto* csr = as_csr()) return csr->nnz();
  const auto& d = std::get<DenseMatrix>(storage_);
  return static_cast<std::size_t>(
      std::count_if(d.data().begin(), d.data().end(), [](double v) { return v != 0.0; }));
}

void Matrix::multiply(std::span<const double> v, std::span<double> out) const {
  if (v.size() != cols()) throw DimensionError("spmv: matrix has " + std::to_string(cols()) +
                                               " columns, vector has " + std::to_string(v.size()));
  if (out.size() != rows()) throw DimensionError("spmv: output length mismatch");
  if (const auto* csr = as_csr()) {
    const auto& rp = csr->row_ptr();
    const auto& ci = csr->col_idx();
    const auto& val = csr->values();
    for (std::size_t i = 0; i < csr->rows(); ++i) {
      double s = 0.0;
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += val[k] * v[ci[k]];
      out[i] = s;
    }
    return;
  }
  const auto& d = std::get<DenseMatrix>(storage_);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto row = d.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < d.cols(); ++j) s += row[j] * v[j];
    out[i] = s;
  }
}

void Matrix::multiply_transpose(std::span<const double> v, std::span<double> out) const {
  if (v.size() != rows()) throw DimensionError("transpose_spmv: matrix has " + std::to_string(rows()) +
                                               " rows, vector has " + std::to_string(v.size()));
  if (out.size() != cols()) throw DimensionError("transpose_spmv: output length mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  if (const auto* csr = as_csr()) {
    const auto& rp = csr->row_ptr();
    const auto& ci = csr->col_idx();
    const auto& val = csr->values();
    for (std::size_t i = 0; i < csr->rows(); ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) out[ci[k]] += val[k] * vi;
    }
    return;
  }
  const auto& d = std::get<DenseMatrix>(storage_);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const auto row = d.row(i);
    for (std::size_t j = 0; j < d.cols(); ++j) out[j] += row[j] * vi;
  }
}

std::pair<std::size_t, std::size_t> Matrix::column_hull(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows()) throw DimensionError("column_hull: row range out of bounds");
  if (const auto* csr = as_csr()) {
    std::size_t lo = csr->cols();
    std::size_t hi = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t a = csr->row_ptr()[i];
      const std::size_t b = csr->row_ptr()[i + 1];
      if (a == b) continue;
      lo = std::min(lo, csr->col_idx()[a]);
      hi = std::max(hi, csr->col_idx()[b - 1] + 1);
    }
    if (lo >= hi) return {0, 0};
    return {lo, hi};
  }
  return {0, cols()};
}

DenseMatrix Matrix::dense_block(std::size_t begin, std::size_t end, std::size_t col_begin,
                                std::size_t col_end) const {
  if (begin > end || end > rows() || col_begin > col_end || col_end > cols()) {
    throw DimensionError("dense_block: range out of bounds");
  }
  DenseMatrix out(end - begin, col_end - col_begin);
  if (const auto* csr = as_csr()) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t k = csr->row_ptr()[i]; k < csr->row_ptr()[i + 1]; ++k) {
        const std::size_t j = csr->col_idx()[k];
        if (j >= col_begin && j < col_end) out(i - begin, j - col_begin) = csr->values()[k];
      }
    }
    return out;
  }
  const auto& d = std::get<DenseMatrix>(storage_);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = col_begin; j < col_end; ++j) out(i - begin, j - col_begin) = d(i, j);
  return out;
}

DenseMatrix Matrix::to_dense() const {
  if (const auto* csr = as_csr()) return csr->to_dense();
  return std::get<DenseMatrix>(storage_);
}

Vector spmv(const Matrix& a, std::span<const double> v) {
  Vector out(a.rows());
  a.multiply(v, out);
  return out;
}

Vector transpose_spmv(const Matrix& a, std::span<const double> v) {
  Vector out(a.cols());
  a.multiply_transpose(v, out);
  return out;
}

}  // namespace apsolve
