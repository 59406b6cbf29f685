#include "apsolve/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "apsolve/ap_kernel.hpp"
#include "apsolve/partition.hpp"
#include "apsolve/qr.hpp"

namespace apsolve {

namespace {

constexpr std::size_t kMaxZeroProjections = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// AP(r) for a fixed matrix and configuration; owns the block factors.
class Projector {
 public:
  Projector(const Matrix& a, const SolverConfig& cfg, std::size_t default_sweeps)
      : a_(a), version_(cfg.ap_version), sweeps_(cfg.sweeps_per_projection.value_or(default_sweeps)) {
    if (version_ == ApVersion::V2) {
      bf_ = factorize_blocks(a, make_partition(a.rows(), cfg.block_size, cfg.overlapped));
    } else {
      bf_ = factorize_blocks(a, make_pair_partition(a.rows(), cfg.block_size));
    }
  }

  std::size_t sweeps() const noexcept { return version_ == ApVersion::V2 ? sweeps_ : 1; }
  std::size_t fallbacks() const noexcept { return fallbacks_; }

  // Zero projection when r = 0 or A^T r = 0; the caller decides what that means.
  Projection operator()(std::span<const double> r) {
    if (version_ == ApVersion::V1) {
      ApV1Result res = ap_v1(bf_, r);
      return {std::move(res.p), res.alpha};
    }
    try {
      ApState st = accumulated_projection(a_, bf_, r, sweeps_);
      fallbacks_ += st.fallbacks;
      return {std::move(st.p), st.c};
    } catch (const TrivialSolution&) {
    } catch (const SingularSystem&) {
    }
    return {Vector(a_.cols(), 0.0), 0.0};
  }

 private:
  const Matrix& a_;
  ApVersion version_;
  std::size_t sweeps_;
  BlockFactorization bf_;
  std::size_t fallbacks_ = 0;
};

void check_system(const Matrix& a, std::span<const double> b, const std::optional<Vector>& exact_x) {
  if (a.rows() != a.cols()) throw DimensionError("solver needs a square matrix");
  if (b.size() != a.rows()) throw DimensionError("rhs length differs from matrix size");
  if (exact_x && exact_x->size() != a.cols()) throw DimensionError("exact solution length mismatch");
  if (!all_finite(b)) throw InvalidArgument("rhs has non-finite entries");
}

void record_outer(SolveReport& rep, const Matrix& a, std::span<const double> b0, double b0n,
                  std::span<const double> r, const std::optional<Vector>& exact_x) {
  const double rn = norm2(r);
  rep.residual_history.push_back(b0n > 0.0 ? rn / b0n : rn);
  rep.true_residual_history.push_back(relative_residual(a, rep.solution, b0));
  if (exact_x) rep.error_history.push_back(relative_error(rep.solution, *exact_x));
}

bool converged(double rn, double b0n, double tol) { return rn <= tol * (b0n > 0.0 ? b0n : 1.0); }

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (block_size == 0) throw InvalidArgument("block_size must be at least 1");
  if (inner_sweeps_M == 0) throw InvalidArgument("M must be at least 1");
  if (delta.empty()) throw InvalidArgument("delta must not be empty");
  for (std::size_t d : delta) {
    if (d < 1 || d > inner_sweeps_M) {
      throw InvalidArgument("delta index " + std::to_string(d) + " outside [1, " +
                            std::to_string(inner_sweeps_M) + "]");
    }
  }
  if (sweeps_per_projection && *sweeps_per_projection == 0) {
    throw InvalidArgument("sweeps_per_projection must be at least 1");
  }
}

void ScalarLedger::record(double c, double tau) {
  c_seq.push_back(c);
  tau_seq.push_back(tau);
  l_running += c + tau;
}

double ScalarLedger::recomputed() const {
  double s = 0.0;
  for (double c : c_seq) s += c;
  for (double t : tau_seq) s += t;
  return s;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxIters: return "MaxIters";
    case Termination::Breakdown: return "Breakdown";
  }
  return "Unknown";
}

std::string to_string(ApVersion v) { return v == ApVersion::V1 ? "v1" : "v2"; }

double relative_residual(const Matrix& a, std::span<const double> x, std::span<const double> b) {
  Vector r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double bn = norm2(b);
  const double rn = norm2(r);
  return bn > 0.0 ? rn / bn : rn;
}

double relative_error(std::span<const double> x, std::span<const double> exact) {
  const double en = norm2(exact);
  const double d = norm2(subtract(x, exact));
  return en > 0.0 ? d / en : d;
}

SolveReport pap_solve(const Matrix& a, std::span<const double> b, const SolverConfig& cfg,
                      const std::optional<Vector>& exact_x) {
  cfg.validate();
  check_system(a, b, exact_x);
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.solution.assign(a.cols(), 0.0);
  const double b0n = norm2(b);
  Vector r(b.begin(), b.end());
  Vector ap(a.rows());

  if (converged(b0n, b0n, cfg.tol)) {
    rep.termination = Termination::Converged;
    rep.wall_time = seconds_since(t0);
    return rep;
  }
  Projector project(a, cfg, 1);
  std::size_t zero_run = 0;
  while (rep.outer_iters < cfg.max_outer) {
    const Projection p = project(r);
    ++rep.outer_iters;
    ++rep.inner_iters_total;
    rep.total_sweeps += project.sweeps();
    if (norm2(p.p) == 0.0) {
      if (++zero_run >= kMaxZeroProjections) {
        rep.termination = Termination::Breakdown;
        rep.reason = "SingularSystem: zero projection of a nonzero residual";
        break;
      }
    } else {
      zero_run = 0;
    }
    axpy(1.0, p.p, rep.solution);
    a.multiply(p.p, ap);
    axpy(-1.0, ap, r);
    record_outer(rep, a, b, b0n, r, exact_x);
    const double rn = norm2(r);
    if (!std::isfinite(rn)) {
      rep.termination = Termination::Breakdown;
      rep.reason = "non-finite residual";
      break;
    }
    if (converged(rn, b0n, cfg.tol)) {
      rep.termination = Termination::Converged;
      break;
    }
  }
  rep.fallback_steps = project.fallbacks();
  rep.wall_time = seconds_since(t0);
  return rep;
}

SolveReport apap_solve(const Matrix& a, std::span<const double> b, const SolverConfig& cfg,
                       const std::optional<Vector>& exact_x) {
  cfg.validate();
  check_system(a, b, exact_x);
  const auto t0 = Clock::now();
  SolveReport rep;
  const std::size_t n = a.cols();
  rep.solution.assign(n, 0.0);
  const double b0n = norm2(b);
  Vector rhs(b.begin(), b.end());

  if (converged(b0n, b0n, cfg.tol)) {
    rep.termination = Termination::Converged;
    rep.wall_time = seconds_since(t0);
    return rep;
  }

  std::vector<std::size_t> delta = cfg.delta;
  std::sort(delta.begin(), delta.end());
  delta.erase(std::unique(delta.begin(), delta.end()), delta.end());

  const std::size_t auto_sweeps = (a.rows() + cfg.block_size - 1) / cfg.block_size;
  Projector project(a, cfg, auto_sweeps);
  const std::size_t m_steps = cfg.inner_sweeps_M;
  Vector r(n), x_acc(n), ap(a.rows());
  std::optional<Vector> target;  // exact solution of the current residual system

  while (rep.outer_iters < cfg.max_outer) {
    if (exact_x) target = subtract(*exact_x, rep.solution);
    r = rhs;
    std::fill(x_acc.begin(), x_acc.end(), 0.0);
    ScalarLedger ledger;
    DenseMatrix h(n, delta.size());
    Vector l_snap(delta.size());
    std::size_t next_snap = 0;

    for (std::size_t i = 1; i <= m_steps; ++i) {
      const Projection p = project(r);
      ledger.record(p.c, dot(x_acc, p.p));
      axpy(1.0, p.p, x_acc);
      a.multiply(p.p, ap);
      axpy(-1.0, ap, r);
      rep.inner_residual_history.push_back(norm2(r) / b0n);
      if (next_snap < delta.size() && delta[next_snap] == i) {
        for (std::size_t k = 0; k < n; ++k) h(k, next_snap) = x_acc[k];
        l_snap[next_snap] = ledger.l_running;
        if (target) rep.ledger_checks.push_back({rep.outer_iters + 1, i, ledger.l_running, dot(*target, x_acc)});
        ++next_snap;
      }
    }
    rep.inner_iters_total += m_steps;
    rep.total_sweeps += m_steps * project.sweeps();
    ++rep.outer_iters;

    // v = projection of the residual-system solution onto ran(H), using H^T x = L.
    const PivotedQr qr = householder_qr_pivoted(h);
    rep.dropped_snapshot_columns += delta.size() - qr.rank;
    rep.last_ledger = std::move(ledger);
    if (qr.rank == 0) {
      rep.termination = Termination::Breakdown;
      rep.reason = "DegenerateSnapshots: every snapshot column is numerically zero";
      break;
    }
    Vector lp(qr.rank);
    for (std::size_t j = 0; j < qr.rank; ++j) lp[j] = l_snap[qr.perm[j]];
    const Vector t = tri_upper_transpose_solve(qr.r, lp);
    Vector v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = dot(qr.q.row(k), t);

    axpy(1.0, v, rep.solution);
    a.multiply(v, ap);
    axpy(-1.0, ap, rhs);
    record_outer(rep, a, b, b0n, rhs, exact_x);
    const double rn = norm2(rhs);
    if (!std::isfinite(rn)) {
      rep.termination = Termination::Breakdown;
      rep.reason = "non-finite residual";
      break;
    }
    if (converged(rn, b0n, cfg.tol)) {
      rep.termination = Termination::Converged;
      break;
    }
  }
  rep.fallback_steps = project.fallbacks();
  rep.wall_time = seconds_since(t0);
  return rep;
}

}  // namespace apsolve
