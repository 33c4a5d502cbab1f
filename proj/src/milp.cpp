#include "tdscw/milp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tdscw::milp {

int MilpModel::add_variable(std::string name, VarKind kind, double lb, double ub, double obj) {
  if (!(lb <= ub)) throw std::invalid_argument("variable bounds crossed: " + name);
  if (!std::isfinite(lb) || !std::isfinite(ub)) {
    throw std::invalid_argument("variable bounds must be finite: " + name);
  }
  var_names.push_back(std::move(name));
  var_kind.push_back(kind);
  lower.push_back(lb);
  upper.push_back(ub);
  objective.push_back(obj);
  return num_vars() - 1;
}

int MilpModel::add_binary(std::string name, double obj) {
  return add_variable(std::move(name), VarKind::binary, 0.0, 1.0, obj);
}

int MilpModel::add_continuous(std::string name, double lb, double ub, double obj) {
  return add_variable(std::move(name), VarKind::continuous, lb, ub, obj);
}

int MilpModel::add_row(std::vector<std::pair<int, double>> terms, RowSense sense,
                       double rhs_value) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].first < 0 || terms[i].first >= num_vars()) {
      throw std::invalid_argument("row references undeclared variable");
    }
    if (out > 0 && terms[out - 1].first == terms[i].first) {
      terms[out - 1].second += terms[i].second;
    } else {
      terms[out++] = terms[i];
    }
  }
  terms.resize(out);
  for (const auto& [c, v] : terms) {
    if (v != 0.0) {
      col.push_back(c);
      coef.push_back(v);
    }
  }
  row_start.push_back(col.size());
  row_sense.push_back(sense);
  rhs.push_back(rhs_value);
  return num_rows() - 1;
}

double MilpModel::row_activity(int row, const std::vector<double>& x) const {
  double act = 0.0;
  for (std::size_t k = row_start[row]; k < row_start[row + 1]; ++k) {
    act += coef[k] * x[col[k]];
  }
  return act;
}

bool MilpModel::row_satisfied(int row, const std::vector<double>& x, double tol) const {
  double act = row_activity(row, x);
  switch (row_sense[row]) {
    case RowSense::le: return act <= rhs[row] + tol;
    case RowSense::ge: return act >= rhs[row] - tol;
    case RowSense::eq: return std::abs(act - rhs[row]) <= tol;
  }
  return false;
}

int MilpModel::first_violated_row(const std::vector<double>& x, double tol) const {
  for (int r = 0; r < num_rows(); ++r) {
    if (!row_satisfied(r, x, tol)) return r;
  }
  return -1;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
  double v = 0.0;
  for (int j = 0; j < num_vars(); ++j) v += objective[j] * x[j];
  return v;
}

MilpSolution brute_force(const MilpModel& model) {
  const int n = model.num_vars();
  if (n > 25) throw std::invalid_argument("brute_force: more than 25 binary variables");
  for (int j = 0; j < n; ++j) {
    if (model.var_kind[j] != VarKind::binary) {
      throw std::invalid_argument("brute_force: continuous variables unsupported");
    }
  }
  // Gray-code walk with incremental row activities.
  std::vector<double> x(n, 0.0);
  std::vector<double> act(model.num_rows(), 0.0);
  // Column adjacency for cheap flips.
  std::vector<std::vector<std::pair<int, double>>> col_rows(n);
  for (int r = 0; r < model.num_rows(); ++r) {
    for (std::size_t k = model.row_start[r]; k < model.row_start[r + 1]; ++k) {
      col_rows[model.col[k]].push_back({r, model.coef[k]});
    }
  }
  // Respect fixed bounds: a binary fixed at 1 starts flipped, fixed vars never flip.
  std::vector<bool> flippable(n, true);
  double base_obj = 0.0;
  for (int j = 0; j < n; ++j) {
    if (model.lower[j] > 0.5) {
      x[j] = 1.0;
      base_obj += model.objective[j];
      for (auto [r, c] : col_rows[j]) act[r] += c;
    }
    if (model.lower[j] == model.upper[j]) flippable[j] = false;
  }
  std::vector<int> free_vars;
  for (int j = 0; j < n; ++j) {
    if (flippable[j]) free_vars.push_back(j);
  }
  const int f = static_cast<int>(free_vars.size());

  auto feasible = [&]() {
    for (int r = 0; r < model.num_rows(); ++r) {
      switch (model.row_sense[r]) {
        case RowSense::le:
          if (act[r] > model.rhs[r] + 1e-9) return false;
          break;
        case RowSense::ge:
          if (act[r] < model.rhs[r] - 1e-9) return false;
          break;
        case RowSense::eq:
          if (std::abs(act[r] - model.rhs[r]) > 1e-9) return false;
          break;
      }
    }
    return true;
  };

  MilpSolution best;
  best.status = SolveStatus::infeasible;
  double cur_obj = base_obj;
  const bool maximize = model.sense == ObjSense::maximize;
  auto consider = [&]() {
    if (!feasible()) return;
    bool better = best.status == SolveStatus::infeasible ||
                  (maximize ? cur_obj > best.objective + 1e-12
                            : cur_obj < best.objective - 1e-12);
    if (better) {
      best.status = SolveStatus::optimal;
      best.objective = cur_obj;
      best.values = x;
    }
  };
  consider();
  const unsigned long long states = f >= 63 ? 0 : (1ULL << f);
  for (unsigned long long s = 1; s < states; ++s) {
    int bit = __builtin_ctzll(s);  // gray-code: flip lowest set bit position
    int j = free_vars[bit];
    double delta = x[j] > 0.5 ? -1.0 : 1.0;
    x[j] += delta;
    cur_obj += delta * model.objective[j];
    for (auto [r, c] : col_rows[j]) act[r] += delta * c;
    consider();
  }
  if (best.status == SolveStatus::optimal) best.bound = best.objective;
  best.nodes_explored = static_cast<long long>(states);
  return best;
}

}  // namespace tdscw::milp
