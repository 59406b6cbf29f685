#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "apsolve/errors.hpp"

namespace apsolve {

using Vector = std::vector<double>;

// ---------------------------------------------------------------------------
// Vector helpers. All of them require equal lengths and throw DimensionError
// otherwise.
// ---------------------------------------------------------------------------
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

/// Dense real matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Takes ownership of row-major `entries`; entries.size() must equal rows*cols
  /// and every entry must be finite.
  DenseMatrix(std::size_t rows, std::size_t cols, Vector entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  DenseMatrix transpose() const;
  double frobenius_norm() const;

  /// Rows [begin, end) as a new matrix.
  DenseMatrix row_block(std::size_t begin, std::size_t end) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix in canonical form: column indices strictly
/// increasing within a row and no stored zeros.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Validates the canonical-form invariants; throws InvalidMatrix on violation.
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, Vector values);

  /// Duplicates are summed and resulting zeros dropped.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static CsrMatrix from_dense(const DenseMatrix& m);
  static CsrMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
  const Vector& values() const noexcept { return values_; }

  DenseMatrix to_dense() const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  Vector values_;
};

/// Either storage format behind one read-only contract. Every solver takes a
/// Matrix, so a CsrMatrix or DenseMatrix converts implicitly.
class Matrix {
 public:
  Matrix(CsrMatrix m) : storage_(std::move(m)) {}    // NOLINT(google-explicit-constructor)
  Matrix(DenseMatrix m) : storage_(std::move(m)) {}  // NOLINT(google-explicit-constructor)

  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;
  std::size_t nnz() const noexcept;
  bool is_sparse() const noexcept { return std::holds_alternative<CsrMatrix>(storage_); }

  const CsrMatrix* as_csr() const noexcept { return std::get_if<CsrMatrix>(&storage_); }
  const DenseMatrix* as_dense() const noexcept { return std::get_if<DenseMatrix>(&storage_); }

  /// out = A v (out is overwritten).
  void multiply(std::span<const double> v, std::span<double> out) const;
  /// out = A^T v (out is overwritten).
  void multiply_transpose(std::span<const double> v, std::span<double> out) const;

  /// Half-open column range [first, last) touched by rows [begin, end).
  /// Empty rows give first == last.
  std::pair<std::size_t, std::size_t> column_hull(std::size_t begin, std::size_t end) const;

  /// Dense copy of rows [begin, end) restricted to columns [col_begin, col_end).
  DenseMatrix dense_block(std::size_t begin, std::size_t end, std::size_t col_begin,
                          std::size_t col_end) const;

  DenseMatrix to_dense() const;

 private:
  std::variant<CsrMatrix, DenseMatrix> storage_;
};

/// A v, accumulated row by row in index order.
Vector spmv(const Matrix& a, std::span<const double> v);
/// A^T v
Vector transpose_spmv(const Matrix& a, std::span<const double> v);

}  // namespace apsolve
