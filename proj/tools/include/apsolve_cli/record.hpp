#pragma once

#include <apsolve/baselines.hpp>
#include <apsolve/problems.hpp>
#include <apsolve/solvers.hpp>

#include <string>

#include "json.hpp"

namespace apsolve::cli {

enum class SolverKind { Pap, Apap, Jacobi, Gmres };

std::string to_string(SolverKind k);
SolverKind parse_solver_kind(const std::string& s);

// Only the config matching `kind` is meaningful; the others keep defaults so
// a record always has the same shape.
struct SolverSpec {
  SolverKind kind = SolverKind::Apap;
  SolverConfig ap;
  GmresConfig gmres;
  BlockJacobiConfig jacobi;
};

struct RunRecord {
  ProblemSpec problem;
  SolverSpec solver;
  SolveReport report;
  std::string timestamp;  // ISO 8601, UTC
};

std::string utc_timestamp();

nlohmann::json to_json(const ProblemSpec& p);
nlohmann::json to_json(const SolverSpec& s);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const RunRecord& r);

ProblemSpec problem_from_json(const nlohmann::json& j);
SolverSpec solver_from_json(const nlohmann::json& j);
SolveReport report_from_json(const nlohmann::json& j);
RunRecord record_from_json(const nlohmann::json& j);

bool operator==(const SolverSpec& a, const SolverSpec& b);
bool operator==(const RunRecord& a, const RunRecord& b);
bool same_problem(const ProblemSpec& a, const ProblemSpec& b);
bool same_report(const SolveReport& a, const SolveReport& b);

}  // namespace apsolve::cli
