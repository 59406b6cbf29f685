#include "apsolve/ap_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "apsolve/qr.hpp"

namespace apsolve {

namespace {

// rt = R^{-T} rhs, so that Q rt is the block projection and ||rt||^2 = x^T p.
Vector reduced_rhs(const BlockFactor& f, std::span<const double> rhs) {
  if (rhs.size() != f.rows()) {
    throw DimensionError("block rhs has length " + std::to_string(rhs.size()) + ", block has " +
                         std::to_string(f.rows()) + " rows");
  }
  return tri_upper_transpose_solve(f.r, rhs);
}

// p[hull] += Q y
void add_q_times(const BlockFactor& f, std::span<const double> y, std::span<double> p) {
  const std::size_t m = f.rows();
  for (std::size_t h = 0; h < f.hull(); ++h) {
    const auto qrow = f.q.row(h);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += qrow[j] * y[j];
    p[f.col_begin + h] += s;
  }
}

void plain_projection(const BlockFactor& f, std::span<const double> b_i, ApState& st) {
  const Vector rt = reduced_rhs(f, b_i);
  std::fill(st.p.begin(), st.p.end(), 0.0);
  add_q_times(f, rt, st.p);
  st.c = dot(rt, rt);
}

// Block rows A_i^T expanded to all n columns, rebuilt from the cached factors.
DenseMatrix full_block_transpose(const BlockFactor& f, std::size_t n) {
  DenseMatrix t(n, f.rows());
  for (std::size_t h = 0; h < f.hull(); ++h) {
    const auto qrow = f.q.row(h);
    for (std::size_t j = 0; j < f.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += qrow[k] * f.r(k, j);
      t(f.col_begin + h, j) = s;
    }
  }
  return t;
}

// Projection onto span{p, A_i^T} through a fresh QR of the stacked columns.
void fallback_step(const BlockFactor& f, std::span<const double> b_i, ApState& st) {
  ++st.fallbacks;
  const std::size_t n = st.p.size();
  const std::size_t m = f.rows();
  if (m >= n) {
    // A full-rank block with n rows already spans R^n, p included.
    plain_projection(f, b_i, st);
    return;
  }
  const DenseMatrix t = full_block_transpose(f, n);
  DenseMatrix w(n, m + 1);
  for (std::size_t i = 0; i < n; ++i) {
    w(i, 0) = st.p[i];
    for (std::size_t j = 0; j < m; ++j) w(i, j + 1) = t(i, j);
  }
  QrFactors qr;
  try {
    qr = householder_qr(w);
  } catch (const RankDeficient&) {
    // p already lies in ran(A_i^T); the block projection is the answer.
    plain_projection(f, b_i, st);
    return;
  }
  Vector rhs(m + 1);
  rhs[0] = st.c;
  std::copy(b_i.begin(), b_i.end(), rhs.begin() + 1);
  const Vector y = tri_upper_transpose_solve(qr.r, rhs);
  for (std::size_t i = 0; i < n; ++i) st.p[i] = dot(qr.q.row(i), y);
  st.c = dot(st.p, st.p);
}

void block_step(const BlockFactor& f, std::span<const double> b_i, ApState& st) {
  const double pn = norm2(st.p);
  if (pn == 0.0) {
    plain_projection(f, b_i, st);
    return;
  }
  const std::size_t m = f.rows();
  const std::size_t c0 = f.col_begin;
  const std::size_t c1 = f.col_end;

  // w = Q^T u, u = p/||p||
  Vector w(m, 0.0);
  for (std::size_t h = 0; h < f.hull(); ++h) {
    const double uh = st.p[c0 + h] / pn;
    if (uh == 0.0) continue;
    const auto qrow = f.q.row(h);
    for (std::size_t j = 0; j < m; ++j) w[j] += qrow[j] * uh;
  }
  // 1 - ||w||^2 assembled from the part of u outside ran(Q) to avoid cancellation.
  double den = 0.0;
  for (std::size_t i = 0; i < c0; ++i) den += (st.p[i] / pn) * (st.p[i] / pn);
  for (std::size_t i = c1; i < st.p.size(); ++i) den += (st.p[i] / pn) * (st.p[i] / pn);
  for (std::size_t h = 0; h < f.hull(); ++h) {
    const double s = st.p[c0 + h] / pn - dot(f.q.row(h), w);
    den += s * s;
  }
  if (den < kModifiedGramTol) {
    fallback_step(f, b_i, st);
    return;
  }

  const Vector rt = reduced_rhs(f, b_i);
  const double gamma = st.c / pn;  // x^T u
  Vector z(m);
  for (std::size_t j = 0; j < m; ++j) z[j] = rt[j] - w[j] * gamma;
  const double wz = dot(w, z);
  Vector y(z);
  axpy(wz / den, w, y);
  const double wy = dot(w, y);
  const double inc2 = dot(y, y) - wy * wy;
  if (std::sqrt(std::max(inc2, 0.0)) <= kStagnationTol * pn) {
    ++st.stagnant_blocks;
    return;
  }
  // p_new = u (gamma - w.y) + Q y
  scale((gamma - wy) / pn, st.p);
  add_q_times(f, y, st.p);
  st.c = dot(st.p, st.p);
}

DenseMatrix gram(const DenseMatrix& block) { return multiply(block, block.transpose()); }

void check_step_inputs(std::span<const double> p, const DenseMatrix& block, std::span<const double> rhs) {
  if (p.size() != block.cols()) throw DimensionError("step: p length differs from block width");
  if (rhs.size() != block.rows()) throw DimensionError("step: rhs length differs from block height");
}

}  // namespace

CombinationResult optimal_combination(double b1, double b2, double alpha) {
  if (!(std::abs(alpha) < 1.0)) {
    throw DegenerateDirections("|alpha| = " + std::to_string(std::abs(alpha)) + " >= 1");
  }
  if (std::abs(b1) < std::abs(b2)) throw InvalidArgument("optimal_combination requires |b1| >= |b2|");
  const double denom = b1 - alpha * b2;
  if (denom == 0.0) throw DegenerateDenominator("b1 equals alpha * b2");
  const double r = b2 / b1;
  CombinationResult out;
  out.s = (b2 - alpha * b1) / denom;
  out.f_s = std::abs(b1) * std::sqrt(1.0 + (r - alpha) * (r - alpha) / (1.0 - alpha * alpha));
  return out;
}

Projection project_onto_block(const BlockFactorization& bf, std::size_t i, std::span<const double> rhs_i) {
  if (i >= bf.size()) throw InvalidArgument("block index " + std::to_string(i) + " out of range");
  const BlockFactor& f = bf.blocks[i];
  const Vector rt = reduced_rhs(f, rhs_i);
  Projection out{Vector(bf.n_cols, 0.0), dot(rt, rt)};
  add_q_times(f, rt, out.p);
  return out;
}

Projection initial_projection(const Matrix& a, std::span<const double> b) {
  const double bb = dot(b, b);
  if (bb == 0.0) throw TrivialSolution("right-hand side is zero");
  Vector atb = transpose_spmv(a, b);
  const double nn = dot(atb, atb);
  if (nn == 0.0) throw SingularSystem("A^T b = 0 for nonzero b");
  const double alpha = bb / nn;
  scale(alpha, atb);
  return {std::move(atb), alpha * bb};
}

ApState ap_v2_sweep(const BlockFactorization& bf, std::span<const double> b, ApState state) {
  if (b.size() != bf.partition.n_rows) throw DimensionError("ap_v2_sweep: rhs length mismatch");
  if (state.p.size() != bf.n_cols) throw DimensionError("ap_v2_sweep: state length mismatch");
  for (const BlockFactor& f : bf.blocks) {
    block_step(f, b.subspan(f.row_begin, f.rows()), state);
    state.norm_history.push_back(std::sqrt(state.c));
  }
  return state;
}

ApState accumulated_projection(const Matrix& a, const BlockFactorization& bf, std::span<const double> b,
                               std::size_t sweeps) {
  Projection p0 = initial_projection(a, b);
  ApState st;
  st.p = std::move(p0.p);
  st.c = p0.c;
  st.norm_history.push_back(norm2(st.p));
  for (std::size_t s = 0; s < sweeps; ++s) st = ap_v2_sweep(bf, b, std::move(st));
  return st;
}

ApV1Result ap_v1(const BlockFactorization& pairs, std::span<const double> b) {
  if (pairs.size() == 0) throw PartitionError("ap_v1 needs at least one pair block");
  if (b.size() != pairs.partition.n_rows) throw DimensionError("ap_v1: rhs length mismatch");
  const std::size_t n = pairs.n_cols;
  const std::size_t k = pairs.size();
  DenseMatrix h(n, k);
  Vector c(k);
  for (std::size_t i = 0; i < k; ++i) {
    const BlockFactor& f = pairs.blocks[i];
    const Projection pi = project_onto_block(pairs, i, b.subspan(f.row_begin, f.rows()));
    for (std::size_t r = 0; r < n; ++r) h(r, i) = pi.p[r];
    c[i] = pi.c;
  }
  // H^T x = c; project x onto ran(H) with dependent columns dropped.
  const PivotedQr qr = householder_qr_pivoted(h);
  Vector cp(qr.rank);
  for (std::size_t j = 0; j < qr.rank; ++j) cp[j] = c[qr.perm[j]];
  const Vector t = tri_upper_transpose_solve(qr.r, cp);
  ApV1Result out;
  out.p.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) out.p[r] = qr.rank == 0 ? 0.0 : dot(qr.q.row(r), t);
  out.alpha = dot(t, t);
  out.dropped = k - qr.rank;
  return out;
}

DirectStep ap_step_direct(std::span<const double> p, double c, const DenseMatrix& block,
                          std::span<const double> rhs) {
  check_step_inputs(p, block, rhs);
  const DenseMatrix g = gram(block);
  Vector ap(block.rows());
  for (std::size_t i = 0; i < block.rows(); ++i) ap[i] = dot(block.row(i), p);
  const Vector gb = cholesky_solve(g, rhs);
  const Vector gap = cholesky_solve(g, ap);
  const double pp = dot(p, p);
  const double den = pp - dot(ap, gap);
  if (!(den >= 1e-14 * pp) || pp == 0.0) {
    throw DegenerateStep("p lies in the row space of the block (denominator " + std::to_string(den) + ")");
  }
  DirectStep out;
  out.alpha = (c - dot(ap, gb)) / den;
  Vector u(gb);
  axpy(-out.alpha, gap, u);
  out.p_next.assign(p.begin(), p.end());
  scale(out.alpha, out.p_next);
  for (std::size_t i = 0; i < block.rows(); ++i) axpy(u[i], block.row(i), out.p_next);
  out.c_next = out.alpha * c + dot(rhs, u);
  out.norm_sq_recurrence = out.alpha * out.alpha * pp + dot(rhs, gb) - out.alpha * out.alpha * dot(ap, gap);
  return out;
}

double modified_gram_condition(std::span<const double> u, const DenseMatrix& block) {
  if (u.size() != block.cols()) throw DimensionError("modified_gram_condition: u length mismatch");
  if (block.cols() < block.rows()) return std::numeric_limits<double>::infinity();
  const double un = norm2(u);
  DenseMatrix abar = block;
  if (un > 0.0) {
    for (std::size_t i = 0; i < block.rows(); ++i) {
      const double proj = dot(block.row(i), u) / (un * un);
      axpy(-proj, u, abar.row(i));
    }
  }
  const QrFactors qr = householder_qr(abar.transpose(), 0.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t j = 0; j < qr.r.rows(); ++j) {
    lo = std::min(lo, std::abs(qr.r(j, j)));
    hi = std::max(hi, std::abs(qr.r(j, j)));
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return (hi / lo) * (hi / lo);
}

Rank1Step ap_step_rank1(std::span<const double> p, double c, const DenseMatrix& block,
                        std::span<const double> rhs) {
  check_step_inputs(p, block, rhs);
  Rank1Step out;
  const double pp = dot(p, p);
  if (pp == 0.0) {
    const Vector v = cholesky_solve(gram(block), rhs);
    out.p_next.assign(p.size(), 0.0);
    for (std::size_t i = 0; i < block.rows(); ++i) axpy(v[i], block.row(i), out.p_next);
    out.c_next = dot(rhs, v);
    out.norm_growth = out.c_next;
    return out;
  }
  out.condition_estimate = modified_gram_condition(p, block);
  if (out.condition_estimate > kModifiedGramCondLimit) throw SingularModifiedGram(out.condition_estimate);

  // d = A p / ||p||^2, Abar = A - d p^T, rhs2 = b - c d = Abar x
  DenseMatrix abar = block;
  Vector rhs2(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < block.rows(); ++i) {
    const double di = dot(block.row(i), p) / pp;
    axpy(-di, p, abar.row(i));
    rhs2[i] -= c * di;
  }
  const Vector v = cholesky_solve(gram(abar), rhs2);
  out.p_next.assign(p.begin(), p.end());
  scale(c / pp, out.p_next);
  for (std::size_t i = 0; i < block.rows(); ++i) axpy(v[i], abar.row(i), out.p_next);
  out.norm_growth = dot(rhs2, v);
  out.c_next = c * c / pp + out.norm_growth;
  return out;
}

}  // namespace apsolve
