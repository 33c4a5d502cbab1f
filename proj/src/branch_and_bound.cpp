#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "tdscw/milp.hpp"
#include "tdscw/simplex.hpp"

namespace tdscw::milp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Presolved {
  bool infeasible = false;
  std::string note;
  MilpModel reduced;
  std::vector<int> reduced_of_orig;  // -1 when eliminated
  std::vector<int> orig_of_reduced;
  std::vector<double> value_of_orig;  // meaningful where eliminated
  double objective_offset = 0.0;
};

// Bound propagation + fixed-variable substitution + redundant/empty row
// removal, iterated to a fixpoint.
Presolved presolve(const MilpModel& m, double tol) {
  Presolved out;
  const int n = m.num_vars();
  std::vector<double> lb = m.lower, ub = m.upper;
  std::vector<bool> row_dropped(m.num_rows(), false);

  auto contrib_min = [&](double c, int j) { return c > 0 ? c * lb[j] : c * ub[j]; };
  auto contrib_max = [&](double c, int j) { return c > 0 ? c * ub[j] : c * lb[j]; };

  for (int pass = 0; pass < 12; ++pass) {
    bool changed = false;
    for (int r = 0; r < m.num_rows(); ++r) {
      if (row_dropped[r]) continue;
      double minact = 0.0, maxact = 0.0;
      int terms = 0;
      for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
        minact += contrib_min(m.coef[k], m.col[k]);
        maxact += contrib_max(m.coef[k], m.col[k]);
        ++terms;
      }
      const RowSense s = m.row_sense[r];
      const double b = m.rhs[r];
      const bool need_le = s != RowSense::ge;  // activity <= b applies
      const bool need_ge = s != RowSense::le;  // activity >= b applies
      if (need_le && minact > b + tol) {
        out.infeasible = true;
        std::ostringstream os;
        os << "row " << r << ": minimum activity " << minact << " exceeds rhs " << b;
        out.note = os.str();
        return out;
      }
      if (need_ge && maxact < b - tol) {
        out.infeasible = true;
        std::ostringstream os;
        os << "row " << r << ": maximum activity " << maxact << " below rhs " << b;
        out.note = os.str();
        return out;
      }
      bool redundant = true;
      if (need_le && maxact > b + tol) redundant = false;
      if (need_ge && minact < b - tol) redundant = false;
      if (redundant || terms == 0) {
        row_dropped[r] = true;
        changed = true;
        continue;
      }
      for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
        int j = m.col[k];
        double c = m.coef[k];
        if (c == 0.0 || lb[j] == ub[j]) continue;
        if (need_le) {
          double rest = minact - contrib_min(c, j);
          double limit = (b - rest) / c;
          if (c > 0 && limit < ub[j] - tol) {
            ub[j] = m.var_kind[j] == VarKind::binary ? std::floor(limit + tol) : limit;
            changed = true;
          } else if (c < 0 && limit > lb[j] + tol) {
            lb[j] = m.var_kind[j] == VarKind::binary ? std::ceil(limit - tol) : limit;
            changed = true;
          }
        }
        if (need_ge) {
          double rest = maxact - contrib_max(c, j);
          double limit = (b - rest) / c;
          if (c > 0 && limit > lb[j] + tol) {
            lb[j] = m.var_kind[j] == VarKind::binary ? std::ceil(limit - tol) : limit;
            changed = true;
          } else if (c < 0 && limit < ub[j] - tol) {
            ub[j] = m.var_kind[j] == VarKind::binary ? std::floor(limit + tol) : limit;
            changed = true;
          }
        }
        if (lb[j] > ub[j] + tol) {
          out.infeasible = true;
          out.note = "row " + std::to_string(r) + " forces crossed bounds on " + m.var_names[j];
          return out;
        }
        if (lb[j] > ub[j]) lb[j] = ub[j];
      }
    }
    if (!changed) break;
  }

  out.reduced_of_orig.assign(n, -1);
  out.value_of_orig.assign(n, 0.0);
  out.reduced.sense = m.sense;
  for (int j = 0; j < n; ++j) {
    if (lb[j] == ub[j]) {
      out.value_of_orig[j] = lb[j];
      out.objective_offset += m.objective[j] * lb[j];
      continue;
    }
    out.reduced_of_orig[j] =
        out.reduced.add_variable(m.var_names[j], m.var_kind[j], lb[j], ub[j], m.objective[j]);
    out.orig_of_reduced.push_back(j);
  }
  for (int r = 0; r < m.num_rows(); ++r) {
    if (row_dropped[r]) continue;
    double shift = 0.0;
    std::vector<std::pair<int, double>> terms;
    for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
      int j = m.col[k];
      if (out.reduced_of_orig[j] < 0) {
        shift += m.coef[k] * out.value_of_orig[j];
      } else {
        terms.push_back({out.reduced_of_orig[j], m.coef[k]});
      }
    }
    if (terms.empty()) {
      double b = m.rhs[r] - shift;
      bool ok = true;
      if (m.row_sense[r] != RowSense::ge && 0.0 > b + tol) ok = false;
      if (m.row_sense[r] != RowSense::le && 0.0 < b - tol) ok = false;
      if (!ok) {
        out.infeasible = true;
        out.note = "row " + std::to_string(r) + " violated after variable fixing";
        return out;
      }
      continue;
    }
    out.reduced.add_row(std::move(terms), m.row_sense[r], m.rhs[r] - shift);
  }
  return out;
}

// Round the LP point and greedily flip binaries to chase feasibility.
bool round_and_repair(const MilpModel& m, std::vector<double>& x, double tol) {
  for (int j = 0; j < m.num_vars(); ++j) {
    x[j] = std::clamp(x[j], m.lower[j], m.upper[j]);
    if (m.var_kind[j] == VarKind::binary) x[j] = std::round(x[j]);
  }
  std::vector<double> act(m.num_rows(), 0.0);
  for (int r = 0; r < m.num_rows(); ++r) act[r] = m.row_activity(r, x);
  std::vector<std::vector<std::pair<int, double>>> col_rows(m.num_vars());
  for (int r = 0; r < m.num_rows(); ++r) {
    for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
      col_rows[m.col[k]].push_back({r, m.coef[k]});
    }
  }
  auto violation = [&](int r) {
    switch (m.row_sense[r]) {
      case RowSense::le: return std::max(0.0, act[r] - m.rhs[r]);
      case RowSense::ge: return std::max(0.0, m.rhs[r] - act[r]);
      case RowSense::eq: return std::abs(act[r] - m.rhs[r]);
    }
    return 0.0;
  };
  const int max_flips = 2 * m.num_vars() + 32;
  for (int flip = 0; flip < max_flips; ++flip) {
    int worst = -1;
    double worst_v = tol;
    for (int r = 0; r < m.num_rows(); ++r) {
      double v = violation(r);
      if (v > worst_v) { worst_v = v; worst = r; }
    }
    if (worst < 0) return true;
    int best_j = -1;
    double best_delta = 0.0, best_gain = 1e-12;
    for (std::size_t k = m.row_start[worst]; k < m.row_start[worst + 1]; ++k) {
      int j = m.col[k];
      if (m.var_kind[j] != VarKind::binary || m.lower[j] == m.upper[j]) continue;
      double delta = x[j] > 0.5 ? -1.0 : 1.0;
      if (x[j] + delta < m.lower[j] - tol || x[j] + delta > m.upper[j] + tol) continue;
      double gain = 0.0;
      for (auto [r, c] : col_rows[j]) {
        double before = violation(r);
        act[r] += delta * c;
        gain += before - violation(r);
        act[r] -= delta * c;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best_j = j;
        best_delta = delta;
      }
    }
    if (best_j < 0) return false;
    x[best_j] += best_delta;
    for (auto [r, c] : col_rows[best_j]) act[r] += best_delta * c;
  }
  return m.first_violated_row(x, tol) < 0;
}

bool within_bounds_and_integral(const MilpModel& m, const std::vector<double>& x, double tol) {
  if (static_cast<int>(x.size()) != m.num_vars()) return false;
  for (int j = 0; j < m.num_vars(); ++j) {
    if (x[j] < m.lower[j] - tol || x[j] > m.upper[j] + tol) return false;
    if (m.var_kind[j] == VarKind::binary && std::abs(x[j] - std::round(x[j])) > tol) return false;
  }
  return true;
}

MilpSolution solve_external(const MilpModel& model, const SolveOptions& options,
                            const char* command) {
  std::string base = "/tmp/tdscw_milp_" + std::to_string(::getpid());
  std::string lp_path = base + ".lp";
  std::string sol_path = base + ".sol";
  export_lp(model, lp_path);
  std::string cmd = std::string(command) + " " + lp_path + " " + sol_path + " " +
                    std::to_string(options.time_limit_seconds);
  int rc = std::system(cmd.c_str());
  if (rc != 0) throw std::runtime_error("external MILP solver failed: " + cmd);
  std::ifstream in(sol_path);
  if (!in) throw std::runtime_error("external MILP solver wrote no solution file");
  MilpSolution sol;
  sol.values.assign(model.num_vars(), 0.0);
  std::map<std::string, int> index;
  for (int j = 0; j < model.num_vars(); ++j) index[model.var_names[j]] = j;
  std::string key;
  while (in >> key) {
    if (key == "status") {
      std::string v;
      in >> v;
      if (v == "optimal") sol.status = SolveStatus::optimal;
      else if (v == "feasible") sol.status = SolveStatus::feasible;
      else if (v == "time_limit") sol.status = SolveStatus::time_limit;
      else sol.status = SolveStatus::infeasible;
    } else if (key == "objective") {
      in >> sol.objective;
    } else if (key == "bound") {
      in >> sol.bound;
    } else {
      double v;
      in >> v;
      auto it = index.find(key);
      if (it != index.end()) sol.values[it->second] = v;
    }
  }
  std::remove(lp_path.c_str());
  std::remove(sol_path.c_str());
  return sol;
}

}  // namespace

MilpSolution solve_relaxation(const MilpModel& model) {
  std::vector<double> cost = model.objective;
  if (model.sense == ObjSense::maximize) {
    for (double& c : cost) c = -c;
  }
  Simplex spx(model.num_vars(), model.lower, model.upper, cost, model.row_start, model.col,
              model.coef, model.row_sense, model.rhs);
  Simplex::Status st = spx.solve();
  MilpSolution sol;
  sol.simplex_iterations = spx.iterations();
  if (st == Simplex::Status::infeasible) {
    sol.status = SolveStatus::infeasible;
    return sol;
  }
  sol.status = SolveStatus::optimal;
  sol.values.resize(model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) sol.values[j] = spx.value(j);
  sol.objective = model.objective_value(sol.values);
  sol.bound = sol.objective;
  return sol;
}

MilpSolution solve(const MilpModel& model, const SolveOptions& options) {
  if (options.allow_external_solver) {
    if (const char* cmd = std::getenv("TDSCW_MILP_SOLVER"); cmd && *cmd) {
      return solve_external(model, options, cmd);
    }
  }
  const auto start = Clock::now();
  const double tol = options.feasibility_tol;
  const bool maximize = model.sense == ObjSense::maximize;
  const double sign = maximize ? -1.0 : 1.0;  // internal view is minimization

  MilpSolution result;
  result.status = SolveStatus::infeasible;

  bool have_incumbent = false;
  std::vector<double> inc_x;
  double inc_obj = 0.0;
  auto offer_incumbent = [&](const std::vector<double>& x) {
    if (!within_bounds_and_integral(model, x, options.integrality_tol)) return;
    if (model.first_violated_row(x, tol) >= 0) return;
    double obj = model.objective_value(x);
    if (!have_incumbent || (maximize ? obj > inc_obj + 1e-12 : obj < inc_obj - 1e-12)) {
      have_incumbent = true;
      inc_obj = obj;
      inc_x = x;
      for (int j = 0; j < model.num_vars(); ++j) {
        if (model.var_kind[j] == VarKind::binary) inc_x[j] = std::round(inc_x[j]);
      }
    }
  };
  if (options.warm_start) offer_incumbent(*options.warm_start);

  Presolved pre = presolve(model, tol);
  if (pre.infeasible) {
    if (have_incumbent) {
      result.status = SolveStatus::optimal;
      result.values = inc_x;
      result.objective = inc_obj;
      result.bound = inc_obj;
      return result;
    }
    result.infeasibility_note = pre.note;
    return result;
  }
  const MilpModel& red = pre.reduced;
  const int rn = red.num_vars();

  auto expand = [&](const std::vector<double>& xr) {
    std::vector<double> full = pre.value_of_orig;
    for (int j = 0; j < rn; ++j) full[pre.orig_of_reduced[j]] = xr[j];
    return full;
  };

  if (rn == 0) {
    offer_incumbent(pre.value_of_orig);
    if (have_incumbent) {
      result.status = SolveStatus::optimal;
      result.values = inc_x;
      result.objective = inc_obj;
      result.bound = inc_obj;
    } else {
      result.infeasibility_note = "presolve fixed all variables to an infeasible point";
    }
    return result;
  }

  // Integral binary objective lets LP bounds be floored for pruning.
  bool integral_obj = true;
  for (int j = 0; j < rn && integral_obj; ++j) {
    if (red.var_kind[j] != VarKind::binary ||
        std::abs(red.objective[j] - std::round(red.objective[j])) > 1e-12) {
      integral_obj = false;
    }
  }

  std::vector<double> minimize_cost(rn);
  for (int j = 0; j < rn; ++j) minimize_cost[j] = sign * red.objective[j];
  Simplex spx(rn, red.lower, red.upper, minimize_cost, red.row_start, red.col, red.coef,
              red.row_sense, red.rhs);

  // node bound is kept in the ORIGINAL objective sense.
  struct Node {
    long long id;
    int parent;
    int var;  // reduced index; -1 at root
    double lo, hi;
    double bound;
  };
  std::vector<Node> pool;
  const double worst_bound = maximize ? 1e300 : -1e300;
  pool.push_back({0, -1, -1, 0.0, 0.0, worst_bound});

  auto better_bound = [&](double a, double b) { return maximize ? a > b : a < b; };
  auto cmp = [&](int a, int b) {
    if (pool[a].bound != pool[b].bound) return !better_bound(pool[a].bound, pool[b].bound);
    return pool[a].id < pool[b].id;  // ties: newest first (diving)
  };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> open(cmp);
  open.push(0);

  std::vector<int> touched;
  auto apply_node_bounds = [&](int node) {
    for (int j : touched) spx.set_bounds(j, red.lower[j], red.upper[j]);
    touched.clear();
    for (int cur = node; cur >= 0; cur = pool[cur].parent) {
      if (pool[cur].var < 0) continue;
      int j = pool[cur].var;
      double lo = std::max(pool[cur].lo, spx.lower_bound_of(j));
      double hi = std::min(pool[cur].hi, spx.upper_bound_of(j));
      spx.set_bounds(j, lo, hi);
      touched.push_back(j);
    }
  };

  auto prunable = [&](double bound) {
    if (!have_incumbent) return false;
    double b = bound;
    if (integral_obj) b = maximize ? std::floor(b + 1e-6) : std::ceil(b - 1e-6);
    return maximize ? b <= inc_obj + 1e-9 : b >= inc_obj - 1e-9;
  };

  long long next_id = 1;
  bool stopped_early = false;

  while (!open.empty()) {
    if (elapsed_seconds(start) > options.time_limit_seconds) { stopped_early = true; break; }
    if (options.max_nodes >= 0 && result.nodes_explored >= options.max_nodes) {
      stopped_early = true;
      break;
    }
    int node = open.top();
    open.pop();
    if (node != 0 && prunable(pool[node].bound)) continue;

    apply_node_bounds(node);
    Simplex::Status st = spx.solve(2000000);
    ++result.nodes_explored;
    result.simplex_iterations = spx.iterations();
    if (st == Simplex::Status::infeasible) continue;

    const double node_bound = sign * spx.objective() + pre.objective_offset;
    pool[node].bound = node_bound;
    if (prunable(node_bound)) continue;

    std::vector<double> xr(rn);
    for (int j = 0; j < rn; ++j) xr[j] = spx.value(j);

    int frac_var = -1;
    double frac_score = options.integrality_tol;
    for (int j = 0; j < rn; ++j) {
      if (red.var_kind[j] != VarKind::binary) continue;
      double f = std::abs(xr[j] - std::round(xr[j]));
      if (f > frac_score + 1e-15) {
        frac_score = f;
        frac_var = j;
      }
    }

    if (frac_var < 0) {
      std::vector<double> full = expand(xr);
      for (int j = 0; j < model.num_vars(); ++j) {
        if (model.var_kind[j] == VarKind::binary) full[j] = std::round(full[j]);
      }
      offer_incumbent(full);
      continue;
    }

    if (options.use_rounding_heuristic) {
      std::vector<double> rounded = expand(xr);
      if (round_and_repair(model, rounded, tol)) offer_incumbent(rounded);
    }

    pool.push_back({next_id++, node, frac_var, red.lower[frac_var],
                    std::floor(xr[frac_var]), node_bound});
    open.push(static_cast<int>(pool.size()) - 1);
    pool.push_back({next_id++, node, frac_var, std::ceil(xr[frac_var]),
                    red.upper[frac_var], node_bound});
    open.push(static_cast<int>(pool.size()) - 1);
  }

  double open_bound = maximize ? -1e300 : 1e300;
  bool any_open = false;
  while (!open.empty()) {
    int node = open.top();
    open.pop();
    if (node != 0 && prunable(pool[node].bound)) continue;
    any_open = true;
    open_bound = maximize ? std::max(open_bound, pool[node].bound)
                          : std::min(open_bound, pool[node].bound);
  }

  if (have_incumbent) {
    result.values = inc_x;
    result.objective = inc_obj;
    if (!stopped_early && !any_open) {
      result.status = SolveStatus::optimal;
      result.bound = inc_obj;
    } else {
      result.status = stopped_early ? SolveStatus::time_limit : SolveStatus::feasible;
      result.bound = any_open ? (maximize ? std::max(inc_obj, open_bound)
                                          : std::min(inc_obj, open_bound))
                              : inc_obj;
    }
  } else if (stopped_early) {
    result.status = SolveStatus::time_limit;
    result.bound = any_open ? open_bound : worst_bound;
    result.infeasibility_note = "stopped before any feasible point was found";
  } else {
    result.status = SolveStatus::infeasible;
    result.infeasibility_note = "search exhausted without a feasible point";
  }
  return result;
}

}  // namespace tdscw::milp
