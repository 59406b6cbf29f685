#include "apsolve/baselines.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "apsolve/partition.hpp"
#include "apsolve/qr.hpp"

namespace apsolve {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_square(const Matrix& a, std::span<const double> b, const std::optional<Vector>& exact_x) {
  if (a.rows() != a.cols()) throw DimensionError("solver needs a square matrix");
  if (b.size() != a.rows()) throw DimensionError("rhs length differs from matrix size");
  if (exact_x && exact_x->size() != a.cols()) throw DimensionError("exact solution length mismatch");
}

// Returns ||b - A x|| and leaves the residual in r.
double residual_into(const Matrix& a, std::span<const double> x, std::span<const double> b, Vector& r) {
  a.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

}  // namespace

SolveReport gmres_solve(const Matrix& a, std::span<const double> b, const GmresConfig& cfg,
                        const std::optional<Vector>& exact_x) {
  if (cfg.restart_m == 0) throw InvalidArgument("restart_m must be at least 1");
  if (!(cfg.tol > 0.0)) throw InvalidArgument("tol must be positive");
  check_square(a, b, exact_x);
  const auto t0 = Clock::now();
  const std::size_t n = a.cols();
  const std::size_t m = cfg.restart_m;
  SolveReport rep;
  rep.solution.assign(n, 0.0);
  const double bn = norm2(b);
  const double scale_b = bn > 0.0 ? bn : 1.0;

  Vector r(n);
  double beta = residual_into(a, rep.solution, b, r);
  if (beta <= cfg.tol * scale_b) {
    rep.termination = Termination::Converged;
    rep.wall_time = seconds_since(t0);
    return rep;
  }

  std::vector<Vector> v(m + 1, Vector(n));
  DenseMatrix h(m + 1, m);
  Vector cs(m), sn(m), g(m + 1);
  Vector w(n);

  while (rep.outer_iters < cfg.max_outer) {
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::size_t k = 0;
    bool happy = false;
    for (std::size_t j = 0; j < m; ++j) {
      a.multiply(v[j], w);
      const double wn0 = norm2(w);
      for (std::size_t i = 0; i <= j; ++i) {
        h(i, j) = dot(w, v[i]);
        axpy(-h(i, j), v[i], w);
      }
      h(j + 1, j) = norm2(w);
      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double hjj = h(j, j);
      const double hj1 = h(j + 1, j);
      happy = hj1 <= 1e-14 * wn0;
      const double rho = std::hypot(hjj, hj1);
      cs[j] = rho > 0.0 ? hjj / rho : 1.0;
      sn[j] = rho > 0.0 ? hj1 / rho : 0.0;
      if (!happy) {
        for (std::size_t i = 0; i < n; ++i) v[j + 1][i] = w[i] / hj1;
      }
      h(j, j) = rho;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      k = j + 1;
      ++rep.inner_iters_total;
      const double implicit = std::abs(g[j + 1]) / scale_b;
      rep.inner_residual_history.push_back(implicit);
      if (!std::isfinite(implicit) || happy || implicit <= cfg.tol) break;
    }

    // y = H[:k,:k]^{-1} g[:k], x += V y
    Vector y(k);
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t c = i + 1; c < k; ++c) s -= h(i, c) * y[c];
      y[i] = h(i, i) != 0.0 ? s / h(i, i) : 0.0;
    }
    for (std::size_t j = 0; j < k; ++j) axpy(y[j], v[j], rep.solution);
    ++rep.outer_iters;
    rep.total_sweeps = rep.inner_iters_total;

    beta = residual_into(a, rep.solution, b, r);
    rep.residual_history.push_back(beta / scale_b);
    rep.true_residual_history.push_back(beta / scale_b);
    if (exact_x) rep.error_history.push_back(relative_error(rep.solution, *exact_x));
    if (!std::isfinite(beta)) {
      rep.termination = Termination::Breakdown;
      rep.reason = "non-finite residual";
      break;
    }
    if (beta <= cfg.tol * scale_b) {
      rep.termination = Termination::Converged;
      break;
    }
    if (happy) {
      // Exact Krylov solution already taken; a nonzero true residual means A is singular.
      rep.termination = Termination::Breakdown;
      rep.reason = "Krylov space exhausted without convergence";
      break;
    }
  }
  rep.wall_time = seconds_since(t0);
  return rep;
}

SolveReport block_jacobi_solve(const Matrix& a, std::span<const double> b, const BlockJacobiConfig& cfg,
                               const std::optional<Vector>& exact_x) {
  if (!(cfg.tol > 0.0)) throw InvalidArgument("tol must be positive");
  check_square(a, b, exact_x);
  const auto t0 = Clock::now();
  const std::size_t n = a.cols();
  const RowBlockPartition part = make_partition(n, cfg.block_size, false);
  if (!cfg.omega.empty() && cfg.omega.size() != part.size()) {
    throw InvalidArgument("omega has " + std::to_string(cfg.omega.size()) + " weights for " +
                          std::to_string(part.size()) + " blocks");
  }
  for (double w : cfg.omega) {
    if (!(w > 0.0)) throw InvalidArgument("omega weights must be positive");
  }

  SolveReport rep;
  rep.solution.assign(n, 0.0);
  std::vector<QrFactors> diag;
  diag.reserve(part.size());
  for (std::size_t i = 0; i < part.size(); ++i) {
    const auto [s, e] = part.ranges[i];
    try {
      diag.push_back(householder_qr(a.dense_block(s, e, s, e)));
    } catch (const RankDeficient&) {
      rep.termination = Termination::Breakdown;
      rep.reason = "singular diagonal block " + std::to_string(i);
      rep.wall_time = seconds_since(t0);
      return rep;
    }
  }

  const double bn = norm2(b);
  const double scale_b = bn > 0.0 ? bn : 1.0;
  Vector r(n);
  double rn = residual_into(a, rep.solution, b, r);
  while (rn > cfg.tol * scale_b && rep.outer_iters < cfg.max_iters) {
    for (std::size_t i = 0; i < part.size(); ++i) {
      const auto [s, e] = part.ranges[i];
      const QrFactors& f = diag[i];
      Vector qtr(e - s, 0.0);
      for (std::size_t row = s; row < e; ++row) axpy(r[row], f.q.row(row - s), qtr);
      const Vector d = tri_upper_solve(f.r, qtr);
      const double w = cfg.omega.empty() ? 1.0 : cfg.omega[i];
      for (std::size_t row = s; row < e; ++row) rep.solution[row] += w * d[row - s];
    }
    ++rep.outer_iters;
    rn = residual_into(a, rep.solution, b, r);
    rep.residual_history.push_back(rn / scale_b);
    rep.true_residual_history.push_back(rn / scale_b);
    if (exact_x) rep.error_history.push_back(relative_error(rep.solution, *exact_x));
    if (!std::isfinite(rn)) {
      rep.termination = Termination::Breakdown;
      rep.reason = "non-finite residual";
      break;
    }
  }
  rep.inner_iters_total = rep.outer_iters;
  rep.total_sweeps = rep.outer_iters;
  if (rep.termination != Termination::Breakdown && rn <= cfg.tol * scale_b) {
    rep.termination = Termination::Converged;
  }
  rep.wall_time = seconds_since(t0);
  return rep;
}

}  // namespace apsolve
