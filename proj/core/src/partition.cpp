#include "apsolve/partition.hpp"

#include <algorithm>
#include <string>

#include "apsolve/qr.hpp"

namespace apsolve {

RowBlockPartition make_partition(std::size_t n_rows, std::size_t block_size, bool overlapped) {
  if (block_size == 0 || block_size > n_rows) {
    throw PartitionError("block size " + std::to_string(block_size) + " must lie in [1, " +
                         std::to_string(n_rows) + "]");
  }
  RowBlockPartition p;
  p.overlapped = overlapped;
  p.n_rows = n_rows;
  const std::size_t stride = overlapped ? block_size - block_size / 2 : block_size;
  for (std::size_t s = 0;; s += stride) {
    p.ranges.push_back({s, std::min(s + block_size, n_rows)});
    if (s + block_size >= n_rows) break;
  }
  return p;
}

RowBlockPartition make_pair_partition(std::size_t n_rows, std::size_t block_size) {
  const RowBlockPartition base = make_partition(n_rows, block_size, false);
  if (base.size() < 2) {
    throw PartitionError("pairing needs at least two blocks; block size " + std::to_string(block_size) +
                         " covers all " + std::to_string(n_rows) + " rows");
  }
  RowBlockPartition p;
  p.overlapped = true;
  p.n_rows = n_rows;
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    p.ranges.push_back({base.ranges[i].begin, base.ranges[i + 1].end});
  }
  return p;
}

BlockFactorization factorize_blocks(const Matrix& a, const RowBlockPartition& partition) {
  if (partition.n_rows != a.rows()) {
    throw DimensionError("partition covers " + std::to_string(partition.n_rows) +
                         " rows, matrix has " + std::to_string(a.rows()));
  }
  BlockFactorization bf;
  bf.partition = partition;
  bf.n_cols = a.cols();
  bf.blocks.reserve(partition.size());
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const auto [begin, end] = partition.ranges[i];
    const auto [c0, c1] = a.column_hull(begin, end);
    // Fewer touched columns than rows means the rows cannot be independent.
    if (c1 - c0 < end - begin) throw RankDeficient(c1 - c0, i);
    BlockFactor f;
    f.row_begin = begin;
    f.row_end = end;
    f.col_begin = c0;
    f.col_end = c1;
    try {
      QrFactors qr = householder_qr(a.dense_block(begin, end, c0, c1).transpose());
      f.q = std::move(qr.q);
      f.r = std::move(qr.r);
    } catch (const RankDeficient& e) {
      throw RankDeficient(e.column(), i);
    }
    bf.blocks.push_back(std::move(f));
  }
  return bf;
}

}  // namespace apsolve
