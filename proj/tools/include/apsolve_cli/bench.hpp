#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "apsolve_cli/csv.hpp"

namespace apsolve::cli {

struct BenchScale {
  double factor = 1.0;
  bool small = false;  // "small": factor 0.5, and the two-size Hilbert sweep
};

/// Accepts a positive number or "small".
BenchScale parse_scale(const std::string& s);

struct BenchOptions {
  BenchScale scale;
  std::size_t threads = 1;  // further capped by BENCH_THREADS
};

struct BenchTable {
  std::string name;
  CsvRow header;  // last column is always "status"
  std::vector<CsvRow> rows;
};

const std::vector<std::string>& bench_names();

/// Rows whose solver throws are kept, with "FAILED: <message>" as status.
BenchTable run_bench(const std::string& name, const BenchOptions& opts);

std::size_t effective_threads(std::size_t requested);

}  // namespace apsolve::cli
