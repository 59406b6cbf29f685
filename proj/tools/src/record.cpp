#include "apsolve_cli/record.hpp"

#include <apsolve/errors.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>

namespace apsolve::cli {

using nlohmann::json;

namespace {

// JSON has no NaN or infinity; those travel as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double to_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw InvalidArgument("not a number: " + s);
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> to_nums(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const json& e : j) v.push_back(to_num(e));
  return v;
}

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}

std::string func_name(Func1D f) { return f == Func1D::Poly ? "poly" : "sine"; }

Func1D parse_func(const std::string& s) {
  if (s == "poly") return Func1D::Poly;
  if (s == "sine") return Func1D::Sine;
  throw InvalidArgument("unknown function: " + s);
}

Termination parse_termination(const std::string& s) {
  for (Termination t : {Termination::Converged, Termination::MaxIters, Termination::Breakdown})
    if (s == to_string(t)) return t;
  throw InvalidArgument("unknown termination: " + s);
}

json ap_config_json(const SolverConfig& c) {
  json j{{"tol", num(c.tol)},
         {"max_outer", c.max_outer},
         {"block_size", c.block_size},
         {"overlapped", c.overlapped},
         {"ap_version", to_string(c.ap_version)},
         {"M", c.inner_sweeps_M},
         {"delta", c.delta}};
  j["sweeps_per_projection"] = c.sweeps_per_projection ? json(*c.sweeps_per_projection) : json(nullptr);
  return j;
}

SolverConfig ap_config_from(const json& j) {
  SolverConfig c;
  c.tol = to_num(j.at("tol"));
  c.max_outer = j.at("max_outer").get<std::size_t>();
  c.block_size = j.at("block_size").get<std::size_t>();
  c.overlapped = j.at("overlapped").get<bool>();
  c.ap_version = j.at("ap_version").get<std::string>() == "v1" ? ApVersion::V1 : ApVersion::V2;
  c.inner_sweeps_M = j.at("M").get<std::size_t>();
  c.delta = j.at("delta").get<std::vector<std::size_t>>();
  if (!j.at("sweeps_per_projection").is_null()) c.sweeps_per_projection = j["sweeps_per_projection"].get<std::size_t>();
  return c;
}

}  // namespace

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Pap: return "pap";
    case SolverKind::Apap: return "apap";
    case SolverKind::Jacobi: return "jacobi";
    case SolverKind::Gmres: return "gmres";
  }
  return "?";
}

SolverKind parse_solver_kind(const std::string& s) {
  if (s == "pap") return SolverKind::Pap;
  if (s == "apap") return SolverKind::Apap;
  if (s == "jacobi") return SolverKind::Jacobi;
  if (s == "gmres") return SolverKind::Gmres;
  throw InvalidArgument("unknown solver: " + s);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const ProblemSpec& p) {
  json j;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Tridiag>) {
          j["kind"] = "tridiag";
          j["lo"] = k.lo;
          j["di"] = k.di;
          j["up"] = k.up;
          j["n"] = k.n;
        } else if constexpr (std::is_same_v<K, Poisson5>) {
          j["kind"] = "poisson5";
          j["nx"] = k.nx;
          j["ny"] = k.ny;
        } else if constexpr (std::is_same_v<K, Hilbert>) {
          j["kind"] = "hilbert";
          j["n"] = k.n;
        } else {
          j["kind"] = "file";
          j["path"] = k.path;
        }
      },
      p.kind);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Func1D>) {
          j["solution"] = func_name(s);
        } else if constexpr (std::is_same_v<S, SolutionOnes>) {
          j["solution"] = "ones";
        } else {
          j["solution"] = "custom";
          j["solution_values"] = nums(s.values);
        }
      },
      p.solution);
  return j;
}

ProblemSpec problem_from_json(const json& j) {
  ProblemSpec p;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "tridiag") {
    p.kind = Tridiag{j.at("lo").get<double>(), j.at("di").get<double>(), j.at("up").get<double>(),
                     j.at("n").get<std::size_t>()};
  } else if (kind == "poisson5") {
    p.kind = Poisson5{j.at("nx").get<std::size_t>(), j.at("ny").get<std::size_t>()};
  } else if (kind == "hilbert") {
    p.kind = Hilbert{j.at("n").get<std::size_t>()};
  } else if (kind == "file") {
    p.kind = MatrixMarketFile{j.at("path").get<std::string>()};
  } else {
    throw InvalidArgument("unknown problem kind: " + kind);
  }
  const std::string sol = j.at("solution").get<std::string>();
  if (sol == "ones") {
    p.solution = SolutionOnes{};
  } else if (sol == "custom") {
    p.solution = SolutionCustom{to_nums(j.at("solution_values"))};
  } else {
    p.solution = parse_func(sol);
  }
  return p;
}

json to_json(const SolverSpec& s) {
  return json{{"name", to_string(s.kind)},
              {"ap", ap_config_json(s.ap)},
              {"gmres", {{"restart", s.gmres.restart_m}, {"max_outer", s.gmres.max_outer}, {"tol", num(s.gmres.tol)}}},
              {"jacobi",
               {{"block_size", s.jacobi.block_size},
                {"omega", nums(s.jacobi.omega)},
                {"max_iters", s.jacobi.max_iters},
                {"tol", num(s.jacobi.tol)}}}};
}

SolverSpec solver_from_json(const json& j) {
  SolverSpec s;
  s.kind = parse_solver_kind(j.at("name").get<std::string>());
  s.ap = ap_config_from(j.at("ap"));
  const json& g = j.at("gmres");
  s.gmres.restart_m = g.at("restart").get<std::size_t>();
  s.gmres.max_outer = g.at("max_outer").get<std::size_t>();
  s.gmres.tol = to_num(g.at("tol"));
  const json& bj = j.at("jacobi");
  s.jacobi.block_size = bj.at("block_size").get<std::size_t>();
  s.jacobi.omega = to_nums(bj.at("omega"));
  s.jacobi.max_iters = bj.at("max_iters").get<std::size_t>();
  s.jacobi.tol = to_num(bj.at("tol"));
  return s;
}

json to_json(const SolveReport& r) {
  json checks = json::array();
  for (const LedgerCheck& c : r.ledger_checks)
    checks.push_back({{"outer", c.outer}, {"inner", c.inner}, {"ledger", num(c.ledger)}, {"direct", num(c.direct)}});
  return json{{"iters", r.outer_iters},
              {"inner_iters", r.inner_iters_total},
              {"total_sweeps", r.total_sweeps},
              {"termination", to_string(r.termination)},
              {"reason", r.reason},
              {"wall_time", num(r.wall_time)},
              {"residual_history", nums(r.residual_history)},
              {"true_residual_history", nums(r.true_residual_history)},
              {"error_history", nums(r.error_history)},
              {"inner_residual_history", nums(r.inner_residual_history)},
              {"ledger_checks", checks},
              {"last_ledger",
               {{"c", nums(r.last_ledger.c_seq)},
                {"tau", nums(r.last_ledger.tau_seq)},
                {"running", num(r.last_ledger.l_running)}}},
              {"dropped_snapshot_columns", r.dropped_snapshot_columns},
              {"fallback_steps", r.fallback_steps},
              {"solution", nums(r.solution)}};
}

SolveReport report_from_json(const json& j) {
  SolveReport r;
  r.outer_iters = j.at("iters").get<std::size_t>();
  r.inner_iters_total = j.at("inner_iters").get<std::size_t>();
  r.total_sweeps = j.at("total_sweeps").get<std::size_t>();
  r.termination = parse_termination(j.at("termination").get<std::string>());
  r.reason = j.at("reason").get<std::string>();
  r.wall_time = to_num(j.at("wall_time"));
  r.residual_history = to_nums(j.at("residual_history"));
  r.true_residual_history = to_nums(j.at("true_residual_history"));
  r.error_history = to_nums(j.at("error_history"));
  r.inner_residual_history = to_nums(j.at("inner_residual_history"));
  for (const json& c : j.at("ledger_checks"))
    r.ledger_checks.push_back({c.at("outer").get<std::size_t>(), c.at("inner").get<std::size_t>(),
                               to_num(c.at("ledger")), to_num(c.at("direct"))});
  const json& l = j.at("last_ledger");
  r.last_ledger.c_seq = to_nums(l.at("c"));
  r.last_ledger.tau_seq = to_nums(l.at("tau"));
  r.last_ledger.l_running = to_num(l.at("running"));
  r.dropped_snapshot_columns = j.at("dropped_snapshot_columns").get<std::size_t>();
  r.fallback_steps = j.at("fallback_steps").get<std::size_t>();
  r.solution = to_nums(j.at("solution"));
  return r;
}

json to_json(const RunRecord& r) {
  return json{{"problem", to_json(r.problem)},
              {"solver", to_json(r.solver)},
              {"report", to_json(r.report)},
              {"timestamp", r.timestamp}};
}

RunRecord record_from_json(const json& j) {
  return RunRecord{problem_from_json(j.at("problem")), solver_from_json(j.at("solver")),
                   report_from_json(j.at("report")), j.at("timestamp").get<std::string>()};
}

bool same_problem(const ProblemSpec& a, const ProblemSpec& b) { return to_json(a) == to_json(b); }

bool same_report(const SolveReport& a, const SolveReport& b) {
  if (a.ledger_checks.size() != b.ledger_checks.size()) return false;
  for (std::size_t i = 0; i < a.ledger_checks.size(); ++i) {
    const LedgerCheck& x = a.ledger_checks[i];
    const LedgerCheck& y = b.ledger_checks[i];
    if (x.outer != y.outer || x.inner != y.inner || !same(x.ledger, y.ledger) || !same(x.direct, y.direct))
      return false;
  }
  return a.outer_iters == b.outer_iters && a.inner_iters_total == b.inner_iters_total &&
         a.total_sweeps == b.total_sweeps && a.termination == b.termination && a.reason == b.reason &&
         same(a.wall_time, b.wall_time) && same(a.solution, b.solution) &&
         same(a.residual_history, b.residual_history) && same(a.true_residual_history, b.true_residual_history) &&
         same(a.error_history, b.error_history) && same(a.inner_residual_history, b.inner_residual_history) &&
         same(a.last_ledger.c_seq, b.last_ledger.c_seq) && same(a.last_ledger.tau_seq, b.last_ledger.tau_seq) &&
         same(a.last_ledger.l_running, b.last_ledger.l_running) &&
         a.dropped_snapshot_columns == b.dropped_snapshot_columns && a.fallback_steps == b.fallback_steps;
}

bool operator==(const SolverSpec& a, const SolverSpec& b) { return to_json(a) == to_json(b); }

bool operator==(const RunRecord& a, const RunRecord& b) {
  return same_problem(a.problem, b.problem) && a.solver == b.solver && same_report(a.report, b.report) &&
         a.timestamp == b.timestamp;
}

}  // namespace apsolve::cli
