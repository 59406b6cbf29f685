#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "apsolve/linalg.hpp"
#include "apsolve/solvers.hpp"

namespace apsolve {

struct GmresConfig {
  std::size_t restart_m = 8;
  std::size_t max_outer = 1000;
  double tol = 1e-7;
};

/// Restarted GMRES(m): modified Gram-Schmidt Arnoldi, Givens rotations on the
/// Hessenberg least-squares problem. residual_history holds the true relative
/// residual after each cycle, inner_residual_history the implicit one after
/// each Arnoldi step.
SolveReport gmres_solve(const Matrix& a, std::span<const double> b, const GmresConfig& cfg,
                        const std::optional<Vector>& exact_x = std::nullopt);

struct BlockJacobiConfig {
  std::size_t block_size = 20;
  std::vector<double> omega;  // one weight per block; empty means 1 for every block
  std::size_t max_iters = 10000;
  double tol = 1e-7;
};

/// x <- x + omega_i D_i^{-1} r_i over disjoint diagonal blocks D_i of A.
/// A singular diagonal block ends the solve with Termination::Breakdown.
SolveReport block_jacobi_solve(const Matrix& a, std::span<const double> b, const BlockJacobiConfig& cfg,
                               const std::optional<Vector>& exact_x = std::nullopt);

}  // namespace apsolve
