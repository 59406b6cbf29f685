#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace apsolve {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed matrix data (non-finite entries, bad CSR structure, parse failures).
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Householder QR found |R[j,j]| below the rank tolerance. When raised while
/// factorizing a row block, `block()` names the offending block.
class RankDeficient : public Error {
 public:
  explicit RankDeficient(std::size_t column, std::optional<std::size_t> block = std::nullopt);

  std::size_t column() const noexcept { return column_; }
  std::optional<std::size_t> block() const noexcept { return block_; }

 private:
  std::size_t column_;
  std::optional<std::size_t> block_;
};

class SingularTriangular : public Error {
 public:
  explicit SingularTriangular(std::size_t index);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

/// optimal_combination: |alpha| >= 1, the two unit directions are parallel.
class DegenerateDirections : public Error {
 public:
  using Error::Error;
};

/// optimal_combination: b1 == alpha * b2.
class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

/// The right-hand side is zero, so x = 0 solves the system.
class TrivialSolution : public Error {
 public:
  using Error::Error;
};

/// A^T b = 0 with b != 0; no projection of x can be formed from the rows.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class DegenerateStep : public Error {
 public:
  using Error::Error;
};

/// The rank-one modified Gram matrix is numerically singular, i.e. the unit
/// direction lies in the row space of the block.
class SingularModifiedGram : public Error {
 public:
  explicit SingularModifiedGram(double condition_estimate);
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

}  // namespace apsolve
