#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tdscw::milp {

enum class VarKind { binary, continuous };
enum class RowSense { le, ge, eq };
enum class ObjSense { maximize, minimize };

// Generic bounded binary/continuous linear program. Rows live in CSR storage;
// all variable bounds are finite.
struct MilpModel {
  ObjSense sense = ObjSense::maximize;

  std::vector<std::string> var_names;
  std::vector<VarKind> var_kind;
  std::vector<double> lower, upper, objective;

  std::vector<std::size_t> row_start{0};
  std::vector<int> col;
  std::vector<double> coef;
  std::vector<RowSense> row_sense;
  std::vector<double> rhs;

  int num_vars() const { return static_cast<int>(var_names.size()); }
  int num_rows() const { return static_cast<int>(row_sense.size()); }
  std::size_t num_nonzeros() const { return col.size(); }

  int add_variable(std::string name, VarKind kind, double lb, double ub, double obj);
  int add_binary(std::string name, double obj = 0.0);
  int add_continuous(std::string name, double lb, double ub, double obj = 0.0);

  // Terms may repeat a column; duplicates are merged.
  int add_row(std::vector<std::pair<int, double>> terms, RowSense sense, double rhs_value);

  double row_activity(int row, const std::vector<double>& x) const;
  bool row_satisfied(int row, const std::vector<double>& x, double tol = 1e-6) const;
  // First violated row for x, or -1.
  int first_violated_row(const std::vector<double>& x, double tol = 1e-6) const;
  double objective_value(const std::vector<double>& x) const;
};

enum class SolveStatus { optimal, feasible, infeasible, time_limit };

struct MilpSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> values;
  double objective = 0.0;
  double bound = 0.0;  // best dual bound
  std::string infeasibility_note;
  long long nodes_explored = 0;
  long long simplex_iterations = 0;
};

struct SolveOptions {
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  std::optional<std::vector<double>> warm_start;
  std::uint64_t seed = 0;  // node-selection tie-break seed
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-6;
  long long max_nodes = -1;  // unlimited when negative
  bool use_rounding_heuristic = true;
  bool allow_external_solver = true;
};

// LP-relaxation branch-and-bound (best-bound node order, most-fractional
// branching with lowest-index ties). When the TDSCW_MILP_SOLVER environment
// variable names an external binary and options allow it, the model is solved
// via LP-file exchange instead (same contract).
MilpSolution solve(const MilpModel& model, const SolveOptions& options = {});

inline MilpSolution solve(const MilpModel& model, double time_limit_seconds,
                          const std::optional<std::vector<double>>& warm_start = std::nullopt) {
  SolveOptions opt;
  opt.time_limit_seconds = time_limit_seconds;
  opt.warm_start = warm_start;
  return solve(model, opt);
}

// Exhaustive test oracle: at most 25 binary variables, no continuous ones.
MilpSolution brute_force(const MilpModel& model);

// Solves only the LP relaxation (used for tightness probes).
MilpSolution solve_relaxation(const MilpModel& model);

// CPLEX-LP dialect writer/reader (reader covers the dialect the writer emits).
void export_lp(const MilpModel& model, const std::string& path);
MilpModel parse_lp(const std::string& path);

}  // namespace tdscw::milp
