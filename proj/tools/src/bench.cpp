#include "apsolve_cli/bench.hpp"

#include <apsolve/baselines.hpp>
#include <apsolve/errors.hpp>
#include <apsolve/problems.hpp>
#include <apsolve/qr.hpp>
#include <apsolve/solvers.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <thread>

namespace apsolve::cli {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }
std::string secs(double v) { return fmt("%.3f", v); }
std::string count(std::size_t v) { return std::to_string(v); }

std::string status(std::initializer_list<const SolveReport*> reports) {
  std::string s;
  for (const SolveReport* r : reports) {
    if (r->termination == Termination::Converged) continue;
    if (!s.empty()) s += "; ";
    s += to_string(r->termination);
    if (!r->reason.empty()) s += " (" + r->reason + ")";
  }
  return s.empty() ? "ok" : s;
}

std::size_t scaled(std::size_t base, double factor, std::size_t floor = 4) {
  return std::max<std::size_t>(floor, static_cast<std::size_t>(std::lround(base * factor)));
}

double last(const std::vector<double>& v) { return v.empty() ? NAN : v.back(); }

struct RowTask {
  CsvRow key;
  std::function<CsvRow()> fill;
};

struct TableDef {
  CsvRow header;
  std::vector<RowTask> tasks;
};

TableDef table1(const BenchScale& s) {
  TableDef t{{"tolerance", "iters", "rel_residual", "wall_time", "status"}, {}};
  const Problem p = build_problem({Tridiag{-1, 2, -1, scaled(100, s.factor, 8)}, Func1D::Poly});
  for (int e = 1; e <= 7; ++e) {
    const double tol = std::pow(10.0, -e);
    t.tasks.push_back({{fmt("%.0e", tol)}, [p, tol] {
                         SolverConfig cfg;
                         cfg.tol = tol;
                         const SolveReport r = pap_solve(p.a, p.b, cfg);
                         return CsvRow{count(r.outer_iters), sci(last(r.residual_history)), secs(r.wall_time),
                                       status({&r})};
                       }});
  }
  return t;
}

TableDef table2(const BenchScale& s) {
  TableDef t{{"tolerance", "outer_iters", "inner_iters", "rel_residual", "true_rel_residual", "wall_time", "status"},
             {}};
  const Problem p = build_problem({Tridiag{-1, 2, -1, scaled(100, s.factor, 8)}, Func1D::Poly});
  for (int e = 1; e <= 19; ++e) {
    const double tol = std::pow(10.0, -e);
    t.tasks.push_back({{fmt("%.0e", tol)}, [p, tol] {
                         SolverConfig cfg;
                         cfg.tol = tol;
                         cfg.max_outer = 20;
                         const SolveReport r = apap_solve(p.a, p.b, cfg);
                         return CsvRow{count(r.outer_iters),        count(r.inner_iters_total),
                                       sci(last(r.residual_history)), sci(last(r.true_residual_history)),
                                       secs(r.wall_time),           status({&r})};
                       }});
  }
  return t;
}

TableDef table3(const BenchScale& s) {
  TableDef t{{"block_size", "jacobi_time", "apap_time", "jacobi_iters", "apap_iters", "apap_outer",
              "jacobi_rel_residual", "apap_rel_residual", "status"},
             {}};
  const Problem p = build_problem({Tridiag{-1, 2, -1, scaled(400, s.factor, 8)}, Func1D::Poly});
  for (std::size_t bs : {30, 35, 40, 45, 50}) {
    t.tasks.push_back({{count(bs)}, [p, bs] {
                         BlockJacobiConfig jc;
                         jc.block_size = bs;
                         jc.tol = 1e-4;
                         jc.max_iters = 20000;
                         const SolveReport j = block_jacobi_solve(p.a, p.b, jc);
                         SolverConfig ac;
                         ac.block_size = bs;
                         ac.tol = 1e-8;
                         ac.max_outer = 100;
                         const SolveReport a = apap_solve(p.a, p.b, ac);
                         return CsvRow{secs(j.wall_time),
                                       secs(a.wall_time),
                                       count(j.outer_iters),
                                       count(a.inner_iters_total),
                                       count(a.outer_iters),
                                       sci(last(j.residual_history)),
                                       sci(last(a.residual_history)),
                                       status({&j, &a})};
                       }});
  }
  return t;
}

// Block size sqrt(m n) gives an AP step about the storage of GMRES(m).
std::size_t matched_block_size(std::size_t m, std::size_t n) {
  return std::min(n, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m * n)))));
}

TableDef poisson(const BenchScale& s) {
  TableDef t{{"blk_size", "restart", "apap_outer", "apap_inner", "gmres_outer", "gmres_inner", "apap_time",
              "gmres_time", "apap_rel_error", "gmres_rel_error", "status"},
             {}};
  const Problem p = build_problem({Poisson5{scaled(50, s.factor), scaled(40, s.factor)}, Func1D::Poly});
  const std::size_t n = p.a.rows();
  for (std::size_t m = 4; m <= 18; m += 2) {
    const std::size_t bs = matched_block_size(m, n);
    t.tasks.push_back({{count(bs), count(m)}, [p, m, bs] {
                         SolverConfig ac;
                         ac.block_size = bs;
                         ac.tol = 1e-5;
                         ac.max_outer = 100;
                         ac.inner_sweeps_M = 50;
                         ac.delta = {10, 20, 30, 40, 50};
                         const SolveReport a = apap_solve(p.a, p.b, ac, p.exact);
                         GmresConfig gc;
                         gc.restart_m = m;
                         gc.tol = 1e-5;
                         gc.max_outer = 100000;
                         const SolveReport g = gmres_solve(p.a, p.b, gc, p.exact);
                         return CsvRow{count(a.outer_iters),
                                       count(a.inner_iters_total),
                                       count(g.outer_iters),
                                       count(g.inner_iters_total),
                                       secs(a.wall_time),
                                       secs(g.wall_time),
                                       sci(relative_error(a.solution, p.exact)),
                                       sci(relative_error(g.solution, p.exact)),
                                       status({&a, &g})};
                       }});
  }
  return t;
}

TableDef asym(const BenchScale& s) {
  TableDef t{{"n", "gmres_iters", "apap_iters", "gmres_time", "apap_time", "gmres_rel_error", "apap_rel_error",
              "gmres_rel_residual", "apap_rel_residual", "status"},
             {}};
  const std::size_t restart = 8;
  for (std::size_t base : {100, 200, 400}) {
    const std::size_t n = scaled(base, s.factor, 8);
    t.tasks.push_back({{count(n)}, [n, restart] {
                         const Problem p = build_problem({Tridiag{-1, 2, -1.05, n}, Func1D::Sine});
                         GmresConfig gc;
                         gc.restart_m = restart;
                         gc.tol = 1e-6;
                         gc.max_outer = 20000;
                         const SolveReport g = gmres_solve(p.a, p.b, gc);
                         SolverConfig ac;
                         ac.block_size = matched_block_size(restart, n);
                         ac.tol = 1e-6;
                         ac.max_outer = 100;
                         const SolveReport a = apap_solve(p.a, p.b, ac);
                         return CsvRow{count(g.inner_iters_total),
                                       count(a.inner_iters_total),
                                       secs(g.wall_time),
                                       secs(a.wall_time),
                                       sci(relative_error(g.solution, p.exact)),
                                       sci(relative_error(a.solution, p.exact)),
                                       sci(relative_residual(p.a, g.solution, p.b)),
                                       sci(relative_residual(p.a, a.solution, p.b)),
                                       status({&g, &a})};
                       }});
  }
  return t;
}

TableDef hilbert(const BenchScale& s) {
  TableDef t{{"n", "dense_rel_error", "apap_rel_error", "apap_rel_residual", "apap_outer", "gmres_rel_error",
              "gmres_rel_residual", "apap_time", "status"},
             {}};
  std::vector<std::size_t> sizes;
  if (s.small) {
    sizes = {50, 100};
  } else {
    for (std::size_t base : {50, 100, 200}) sizes.push_back(scaled(base, s.factor));
  }
  for (std::size_t n : sizes) {
    t.tasks.push_back({{count(n)}, [n] {
                         const Problem p = build_problem({Hilbert{n}, Func1D::Poly});
                         const Vector xd = dense_solve(p.a.to_dense(), p.b);
                         // Row blocks of more than a few Hilbert rows are numerically rank deficient.
                         SolverConfig ac;
                         ac.block_size = 4;
                         ac.sweeps_per_projection = 3;
                         ac.tol = 1e-14;
                         ac.max_outer = 10;
                         const SolveReport a = apap_solve(p.a, p.b, ac);
                         GmresConfig gc;
                         gc.tol = 1e-14;
                         gc.max_outer = 200;
                         const SolveReport g = gmres_solve(p.a, p.b, gc);
                         return CsvRow{sci(relative_error(xd, p.exact)),
                                       sci(relative_error(a.solution, p.exact)),
                                       sci(relative_residual(p.a, a.solution, p.b)),
                                       count(a.outer_iters),
                                       sci(relative_error(g.solution, p.exact)),
                                       sci(relative_residual(p.a, g.solution, p.b)),
                                       secs(a.wall_time),
                                       // Both iterative runs stop on budget, not tolerance.
                                       "ok"};
                       }});
  }
  return t;
}

CsvRow run_task(const RowTask& task, std::size_t width) {
  CsvRow row = task.key;
  try {
    const CsvRow rest = task.fill();
    row.insert(row.end(), rest.begin(), rest.end());
  } catch (const std::exception& e) {
    row.resize(width - 1);
    row.push_back(std::string("FAILED: ") + e.what());
  }
  return row;
}

}  // namespace

BenchScale parse_scale(const std::string& s) {
  if (s == "small") return {0.5, true};
  std::size_t used = 0;
  double f = 0.0;
  try {
    f = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !(f > 0.0) || !std::isfinite(f)) throw InvalidArgument("bad --scale: " + s);
  return {f, false};
}

const std::vector<std::string>& bench_names() {
  static const std::vector<std::string> names{"table1", "table2", "table3", "poisson", "asym", "hilbert"};
  return names;
}

std::size_t effective_threads(std::size_t requested) {
  std::size_t n = std::max<std::size_t>(1, requested);
  if (const char* env = std::getenv("BENCH_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return n;
}

BenchTable run_bench(const std::string& name, const BenchOptions& opts) {
  TableDef def;
  if (name == "table1") {
    def = table1(opts.scale);
  } else if (name == "table2") {
    def = table2(opts.scale);
  } else if (name == "table3") {
    def = table3(opts.scale);
  } else if (name == "poisson") {
    def = poisson(opts.scale);
  } else if (name == "asym") {
    def = asym(opts.scale);
  } else if (name == "hilbert") {
    def = hilbert(opts.scale);
  } else {
    throw InvalidArgument("unknown bench: " + name);
  }

  BenchTable table{name, def.header, std::vector<CsvRow>(def.tasks.size())};
  const std::size_t width = def.header.size();
  const std::size_t workers = std::min(effective_threads(opts.threads), def.tasks.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < def.tasks.size(); ++i) table.rows[i] = run_task(def.tasks[i], width);
    return table;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < def.tasks.size(); i = next++) table.rows[i] = run_task(def.tasks[i], width);
    });
  }
  for (std::thread& th : pool) th.join();
  return table;
}

}  // namespace apsolve::cli
