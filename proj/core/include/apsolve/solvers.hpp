#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "apsolve/linalg.hpp"

namespace apsolve {

enum class ApVersion { V1, V2 };

struct SolverConfig {
  double tol = 1e-7;
  std::size_t max_outer = 100000;
  std::size_t block_size = 20;
  bool overlapped = true;
  ApVersion ap_version = ApVersion::V2;
  std::size_t inner_sweeps_M = 60;
  std::vector<std::size_t> delta = {10, 20, 30, 40, 50, 60};
  // AP sweeps per projection. Unset means 1 for PAP and ceil(n / block_size)
  // for APAP, whose snapshots need well-developed projections.
  std::optional<std::size_t> sweeps_per_projection;

  /// Throws InvalidArgument on tol <= 0, block_size == 0, M == 0, an empty
  /// delta or delta not inside [1, M].
  void validate() const;
};

/// Running sums that give x^T x_k without knowing x.
struct ScalarLedger {
  std::vector<double> c_seq;    // c_i = e_{i-1}^T p_i
  std::vector<double> tau_seq;  // tau_i = x_{i-1}^T p_i
  double l_running = 0.0;

  void record(double c, double tau);
  /// Sum of both sequences recomputed from scratch.
  double recomputed() const;
};

/// Ledger value against x^T x_i computed from a known solution.
struct LedgerCheck {
  std::size_t outer = 0;
  std::size_t inner = 0;
  double ledger = 0.0;
  double direct = 0.0;
};

enum class Termination { Converged, MaxIters, Breakdown };

struct SolveReport {
  Vector solution;
  std::size_t outer_iters = 0;
  std::size_t inner_iters_total = 0;  // AP projections (PAP/APAP), Arnoldi steps (GMRES), sweeps (Jacobi)
  std::size_t total_sweeps = 0;       // block sweeps over A
  std::vector<double> residual_history;       // running ||r||/||b|| after each outer step
  std::vector<double> true_residual_history;  // ||b - A y||/||b|| recomputed after each outer step
  std::vector<double> error_history;          // ||y - x||/||x||, when x was supplied
  std::vector<double> inner_residual_history; // per inner step, solver specific
  std::vector<LedgerCheck> ledger_checks;
  ScalarLedger last_ledger;
  std::size_t dropped_snapshot_columns = 0;
  std::size_t fallback_steps = 0;
  double wall_time = 0.0;  // seconds
  Termination termination = Termination::MaxIters;
  std::string reason;
};

std::string to_string(Termination t);
std::string to_string(ApVersion v);

/// ||b - A x|| / ||b||; plain ||b - A x|| when b = 0.
double relative_residual(const Matrix& a, std::span<const double> x, std::span<const double> b);
/// ||x - exact|| / ||exact||; plain ||x - exact|| when exact = 0.
double relative_error(std::span<const double> x, std::span<const double> exact);

/// y <- y + AP(r), r <- r - A AP(r) until ||r|| <= tol ||b||.
SolveReport pap_solve(const Matrix& a, std::span<const double> b, const SolverConfig& cfg,
                      const std::optional<Vector>& exact_x = std::nullopt);

/// Each outer step runs M accumulated projections on the current residual
/// system, keeps the partial sums at the indices in delta, and adds the
/// projection of the residual-system solution onto their span.
SolveReport apap_solve(const Matrix& a, std::span<const double> b, const SolverConfig& cfg,
                       const std::optional<Vector>& exact_x = std::nullopt);

}  // namespace apsolve
