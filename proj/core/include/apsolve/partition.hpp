#pragma once

#include <cstddef>
#include <vector>

#include "apsolve/linalg.hpp"

namespace apsolve {

struct RowBlockRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const RowBlockRange&, const RowBlockRange&) = default;
};

struct RowBlockPartition {
  std::vector<RowBlockRange> ranges;
  bool overlapped = false;
  std::size_t n_rows = 0;

  std::size_t size() const noexcept { return ranges.size(); }
};

/// Consecutive row ranges of length <= block_size. Overlapped partitions
/// advance by block_size - block_size/2, so neighbours share block_size/2
/// rows; the last block may be shorter. Throws PartitionError unless
/// 1 <= block_size <= n_rows.
RowBlockPartition make_partition(std::size_t n_rows, std::size_t block_size, bool overlapped);

/// Unions of adjacent blocks of the disjoint partition: [B_i; B_{i+1}] for
/// i = 0..k-2. Requires at least two base blocks.
RowBlockPartition make_pair_partition(std::size_t n_rows, std::size_t block_size);

/// Thin QR of one block's transposed rows, restricted to the columns the block
/// touches: A[rows, col_begin:col_end]^T = q r, q is (col_end-col_begin) x m.
struct BlockFactor {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;
  DenseMatrix q;
  DenseMatrix r;

  std::size_t rows() const noexcept { return row_end - row_begin; }
  std::size_t hull() const noexcept { return col_end - col_begin; }
};

struct BlockFactorization {
  RowBlockPartition partition;
  std::size_t n_cols = 0;
  std::vector<BlockFactor> blocks;

  std::size_t size() const noexcept { return blocks.size(); }
};

/// Throws RankDeficient with the block index attached when a block's rows are
/// numerically dependent.
BlockFactorization factorize_blocks(const Matrix& a, const RowBlockPartition& partition);

}  // namespace apsolve
