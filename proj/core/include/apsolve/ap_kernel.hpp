#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "apsolve/linalg.hpp"
#include "apsolve/partition.hpp"

namespace apsolve {

// Every routine here works with a target x that is known only through
// A x = b. A projection p of x onto a subspace comes with c = x^T p, which for
// an orthogonal projection equals ||p||^2.

struct Projection {
  Vector p;
  double c = 0.0;
};

struct ApState {
  Vector p;
  double c = 0.0;
  std::vector<double> norm_history;  // ||p|| after each block step
  std::size_t fallbacks = 0;         // steps that needed the explicit [p, A_i^T] QR
  std::size_t stagnant_blocks = 0;   // steps skipped because A_i p already matched b_i
};

/// Step whose increment is below this fraction of ||p|| counts as stagnant.
inline constexpr double kStagnationTol = 1e-14;
/// 1 - ||Q^T u||^2 below this switches a step to the explicit QR fallback.
inline constexpr double kModifiedGramTol = 1e-14;
/// Condition estimate above which ap_step_rank1 reports a singular modified Gram.
inline constexpr double kModifiedGramCondLimit = 1e14;

struct CombinationResult {
  double s = 0.0;
  double f_s = 0.0;
};

/// Best coefficient s for v1 + s v2 given unit v1, v2 with v1.v2 = alpha and
/// b_k = x.v_k, and the resulting projection length |x.(v1+s v2)|/||v1+s v2||.
/// Requires |b1| >= |b2|.
CombinationResult optimal_combination(double b1, double b2, double alpha);

/// Orthogonal projection of x onto the row space of block i, from A_i x = rhs_i.
Projection project_onto_block(const BlockFactorization& bf, std::size_t i, std::span<const double> rhs_i);

/// Scaled A^T b. Throws TrivialSolution for b = 0 and SingularSystem for A^T b = 0.
Projection initial_projection(const Matrix& a, std::span<const double> b);

/// One pass over all blocks: p <- projection of x onto span{p, A_i^T}.
ApState ap_v2_sweep(const BlockFactorization& bf, std::span<const double> b, ApState state);

/// initial_projection followed by `sweeps` calls to ap_v2_sweep.
ApState accumulated_projection(const Matrix& a, const BlockFactorization& bf, std::span<const double> b,
                               std::size_t sweeps = 1);

struct ApV1Result {
  Vector p;
  double alpha = 0.0;        // x^T p
  std::size_t dropped = 0;   // dependent pair projections left out of the glue step
};

/// Project onto each pair block independently, then onto the span of those
/// projections. `pairs` should come from make_pair_partition.
ApV1Result ap_v1(const BlockFactorization& pairs, std::span<const double> b);

// Reference single-step constructions on a dense block (m x n, full row
// rank). Used to cross-check the sweep; both solve normal equations.

struct DirectStep {
  Vector p_next;
  double c_next = 0.0;
  double alpha = 0.0;
  double norm_sq_recurrence = 0.0;  // ||p_next||^2 from the closed-form recurrence
};

/// p_next = alpha p + block^T u. Throws DegenerateStep when p is (nearly) in
/// the block's row space.
DirectStep ap_step_direct(std::span<const double> p, double c, const DenseMatrix& block,
                          std::span<const double> rhs);

struct Rank1Step {
  Vector p_next;
  double c_next = 0.0;
  double norm_growth = 0.0;  // quadratic form for ||p_next||^2 - ||p||^2
  double condition_estimate = 1.0;
};

/// Orthogonalizes the block rows against u = p/||p|| and projects the rest.
/// Throws SingularModifiedGram when the condition estimate exceeds
/// kModifiedGramCondLimit.
Rank1Step ap_step_rank1(std::span<const double> p, double c, const DenseMatrix& block,
                        std::span<const double> rhs);

/// Condition estimate of Abar Abar^T, Abar = block (I - u u^T), taken from the
/// diagonal of R in Abar^T = Q R. Infinite when a diagonal entry is zero.
double modified_gram_condition(std::span<const double> u, const DenseMatrix& block);

}  // namespace apsolve
