#include <apsolve/apsolve.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "apsolve_cli/bench.hpp"
#include "apsolve_cli/record.hpp"

namespace {

using namespace apsolve;
using namespace apsolve::cli;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBreakdown = 3;
constexpr int kExitNotConverged = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenArgs {
  std::string kind;
  std::optional<std::size_t> n;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double lo = -1.0, di = 2.0, up = -1.0;
  std::string func = "poly";
  std::string out;
};

struct SolveArgs {
  std::string matrix;
  std::string rhs;
  std::string exact;
  bool manufactured = false;
  std::string func = "poly";
  std::string solver = "apap";
  double tol = 1e-7;
  std::optional<std::size_t> block_size;
  bool overlap = true;
  std::size_t M = 60;
  std::vector<std::size_t> delta{10, 20, 30, 40, 50, 60};
  std::size_t restart = 8;
  std::optional<std::size_t> max_outer;
  std::optional<std::size_t> sweeps;
  std::string ap_version = "v2";
  std::string json;
};

struct BenchArgs {
  std::string table;
  std::string scale = "1";
  std::string csv;
  std::size_t parallel = 1;
};

SolutionKind parse_solution(const std::string& s) {
  if (s == "poly") return Func1D::Poly;
  if (s == "sine") return Func1D::Sine;
  if (s == "ones") return SolutionOnes{};
  throw UsageError("unknown --func: " + s);
}

int run_gen(const GenArgs& g) {
  ProblemSpec spec;
  spec.solution = parse_solution(g.func);
  if (g.kind == "tridiag" || g.kind == "hilbert") {
    if (!g.n) throw UsageError("--n is required for --kind " + g.kind);
    if (g.kind == "tridiag") {
      spec.kind = Tridiag{g.lo, g.di, g.up, *g.n};
    } else {
      spec.kind = Hilbert{*g.n};
    }
  } else if (g.kind == "poisson") {
    if (g.nx == 0 || g.ny == 0) throw UsageError("--nx and --ny are required for --kind poisson");
    spec.kind = Poisson5{g.nx, g.ny};
  } else {
    throw UsageError("unknown --kind: " + g.kind);
  }
  const Problem p = build_problem(spec);
  const std::string prefix = g.out.empty() ? g.kind : g.out;
  write_matrix_market(prefix + ".mtx", p.a);
  write_vector(prefix + "_x.txt", p.exact);
  write_vector(prefix + "_b.txt", p.b);
  std::printf("%s: %zu x %zu, %zu nonzeros -> %s.mtx, %s_x.txt, %s_b.txt\n", describe(spec).c_str(), p.a.rows(),
              p.a.cols(), p.a.nnz(), prefix.c_str(), prefix.c_str(), prefix.c_str());
  return kExitOk;
}

int exit_code(Termination t) {
  switch (t) {
    case Termination::Converged: return kExitOk;
    case Termination::Breakdown: return kExitBreakdown;
    case Termination::MaxIters: return kExitNotConverged;
  }
  return kExitError;
}

int run_solve(const SolveArgs& s) {
  if (!(s.tol > 0.0)) throw UsageError("--tol must be positive");
  if (s.rhs.empty() == !s.manufactured) throw UsageError("give exactly one of --rhs and --manufactured");
  const SolverKind kind = parse_solver_kind(s.solver);

  RunRecord rec;
  rec.timestamp = utc_timestamp();
  const Matrix a = read_matrix_market(s.matrix);
  std::optional<Vector> exact;
  if (!s.exact.empty()) exact = read_vector(s.exact);
  Vector b;
  if (s.manufactured) {
    if (!exact) {
      // Reuse the problem generator so the exact solution matches `gen`.
      const SolutionKind sol = parse_solution(s.func);
      if (std::holds_alternative<SolutionOnes>(sol)) {
        exact = Vector(a.cols(), 1.0);
      } else {
        exact = exact_solution_1d(a.cols(), std::get<Func1D>(sol));
      }
    }
    if (exact->size() != a.cols()) throw DimensionError("exact solution length does not match the matrix");
    b = spmv(a, *exact);
  } else {
    b = read_vector(s.rhs);
  }
  rec.problem = ProblemSpec{MatrixMarketFile{s.matrix}, SolutionCustom{exact.value_or(Vector{})}};

  SolverSpec& spec = rec.solver;
  spec.kind = kind;
  spec.ap.tol = s.tol;
  spec.ap.overlapped = s.overlap;
  spec.ap.inner_sweeps_M = s.M;
  spec.ap.delta = s.delta;
  spec.ap.sweeps_per_projection = s.sweeps;
  if (s.ap_version == "v1") {
    spec.ap.ap_version = ApVersion::V1;
  } else if (s.ap_version != "v2") {
    throw UsageError("--ap-version must be v1 or v2");
  }
  if (s.block_size) {
    spec.ap.block_size = *s.block_size;
    spec.jacobi.block_size = *s.block_size;
  }
  if (s.max_outer) {
    spec.ap.max_outer = *s.max_outer;
    spec.gmres.max_outer = *s.max_outer;
    spec.jacobi.max_iters = *s.max_outer;
  }
  spec.gmres.tol = s.tol;
  spec.gmres.restart_m = s.restart;
  spec.jacobi.tol = s.tol;
  if (kind == SolverKind::Pap || kind == SolverKind::Apap) {
    try {
      spec.ap.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }

  switch (kind) {
    case SolverKind::Pap: rec.report = pap_solve(a, b, spec.ap, exact); break;
    case SolverKind::Apap: rec.report = apap_solve(a, b, spec.ap, exact); break;
    case SolverKind::Jacobi: rec.report = block_jacobi_solve(a, b, spec.jacobi, exact); break;
    case SolverKind::Gmres: rec.report = gmres_solve(a, b, spec.gmres, exact); break;
  }

  const SolveReport& r = rec.report;
  std::printf("solver=%s termination=%s outer=%zu inner=%zu rel_residual=%.3e", to_string(kind).c_str(),
              to_string(r.termination).c_str(), r.outer_iters, r.inner_iters_total,
              relative_residual(a, r.solution, b));
  if (exact) std::printf(" rel_error=%.3e", relative_error(r.solution, *exact));
  std::printf(" time=%.3fs\n", r.wall_time);
  if (!r.reason.empty() && r.termination != Termination::Converged) std::fprintf(stderr, "%s\n", r.reason.c_str());

  if (!s.json.empty()) {
    const std::string text = to_json(rec).dump(2);
    if (s.json == "-") {
      std::cout << text << '\n';
    } else {
      std::ofstream out(s.json);
      if (!(out << text << '\n')) throw Error("cannot write " + s.json);
    }
  }
  return exit_code(r.termination);
}

int run_bench_cmd(const BenchArgs& b) {
  BenchOptions opts;
  try {
    opts.scale = parse_scale(b.scale);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  opts.threads = b.parallel;
  const BenchTable t = run_bench(b.table, opts);
  auto emit = [&](std::ostream& out) {
    write_csv_row(out, t.header);
    for (const CsvRow& row : t.rows) write_csv_row(out, row);
  };
  if (b.csv.empty() || b.csv == "-") {
    emit(std::cout);
  } else {
    std::ofstream out(b.csv);
    emit(out);
    if (!out) throw Error("cannot write " + b.csv);
    std::printf("%s: %zu rows -> %s\n", t.name.c_str(), t.rows.size(), b.csv.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accumulated projection solvers: generate problems, solve, benchmark"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write a test matrix with its manufactured solution and rhs");
  gen_cmd->add_option("--kind", gen.kind, "tridiag | poisson | hilbert")->required();
  gen_cmd->add_option("--n", gen.n, "Order (tridiag, hilbert)");
  gen_cmd->add_option("--nx", gen.nx, "Interior grid points along x (poisson)");
  gen_cmd->add_option("--ny", gen.ny, "Interior grid points along y (poisson)");
  gen_cmd->add_option("--lo", gen.lo, "Subdiagonal (tridiag)")->capture_default_str();
  gen_cmd->add_option("--di", gen.di, "Diagonal (tridiag)")->capture_default_str();
  gen_cmd->add_option("--up", gen.up, "Superdiagonal (tridiag)")->capture_default_str();
  gen_cmd->add_option("--func", gen.func, "Exact solution: poly | sine | ones")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output prefix (default: the kind)");

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve A x = b from Matrix Market input");
  solve_cmd->add_option("--matrix", solve.matrix, "Matrix Market file")->required();
  auto* rhs = solve_cmd->add_option("--rhs", solve.rhs, "Right-hand side vector file");
  auto* manu = solve_cmd->add_flag("--manufactured", solve.manufactured, "Use b = A x for a known x");
  rhs->excludes(manu);
  solve_cmd->add_option("--exact", solve.exact, "Known solution vector file (error history, manufactured rhs)");
  solve_cmd->add_option("--func", solve.func, "Manufactured solution without --exact: poly | sine | ones")
      ->capture_default_str();
  solve_cmd->add_option("--solver", solve.solver, "pap | apap | jacobi | gmres")
      ->capture_default_str()
      ->check(CLI::IsMember({"pap", "apap", "jacobi", "gmres"}));
  solve_cmd->add_option("--tol", solve.tol, "Relative residual tolerance")->capture_default_str();
  solve_cmd->add_option("--block-size", solve.block_size, "Rows per block (default 20)");
  solve_cmd->add_option("--overlap", solve.overlap, "Overlapped row blocks (true/false)")->capture_default_str();
  solve_cmd->add_option("--M", solve.M, "APAP inner steps per outer step")->capture_default_str();
  solve_cmd->add_option("--delta", solve.delta, "APAP snapshot indices, comma separated")->delimiter(',');
  solve_cmd->add_option("--restart", solve.restart, "GMRES restart length")->capture_default_str();
  solve_cmd->add_option("--max-outer", solve.max_outer, "Outer iteration cap (GMRES cycles, Jacobi sweeps)");
  solve_cmd->add_option("--sweeps", solve.sweeps, "AP sweeps per projection (PAP 1, APAP ceil(n/bs))");
  solve_cmd->add_option("--ap-version", solve.ap_version, "v1 | v2")->capture_default_str();
  solve_cmd->add_option("--json", solve.json, "Write the run record as JSON ('-' for stdout)");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run a comparison table and print CSV");
  bench_cmd->add_option("table", bench.table, "table1 | table2 | table3 | poisson | asym | hilbert")
      ->required()
      ->check(CLI::IsMember(bench_names()));
  bench_cmd->add_option("--scale", bench.scale, "Size factor or 'small'")->capture_default_str();
  bench_cmd->add_option("--csv", bench.csv, "Output file (default stdout)");
  bench_cmd->add_option("--parallel", bench.parallel, "Rows run concurrently (capped by BENCH_THREADS)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (solve_cmd->parsed()) return run_solve(solve);
    return run_bench_cmd(bench);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n\n", e.what());
    CLI::App* sub = gen_cmd->parsed() ? gen_cmd : solve_cmd->parsed() ? solve_cmd : bench_cmd;
    std::fputs(sub->help().c_str(), stderr);
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}
