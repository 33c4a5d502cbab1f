#include "tdscw/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace tdscw::milp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-8;
constexpr double kReducedCostTol = 1e-9;
constexpr double kBoundTol = 1e-9;
constexpr int kRefactorInterval = 100;
}  // namespace

Simplex::Simplex(int num_structural, std::vector<double> lower, std::vector<double> upper,
                 std::vector<double> minimize_cost, const std::vector<std::size_t>& row_start,
                 const std::vector<int>& col, const std::vector<double>& coef,
                 const std::vector<RowSense>& sense, std::vector<double> rhs)
    : num_structural_(num_structural),
      num_rows_(static_cast<int>(sense.size())),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      cost_(std::move(minimize_cost)),
      rhs_(std::move(rhs)) {
  // Transpose CSR rows into CSC columns for the structural part.
  std::vector<std::size_t> count(num_structural_ + 1, 0);
  for (int c : col) ++count[c + 1];
  for (int j = 0; j < num_structural_; ++j) count[j + 1] += count[j];
  cs_start_ = count;
  cs_row_.resize(col.size());
  cs_val_.resize(col.size());
  std::vector<std::size_t> cursor(cs_start_.begin(), cs_start_.end() - 1);
  for (int r = 0; r < num_rows_; ++r) {
    for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) {
      std::size_t slot = cursor[col[k]]++;
      cs_row_[slot] = r;
      cs_val_[slot] = coef[k];
    }
  }
  // Slack bounds encode the row sense: ax + s = b.
  lower_.resize(ncols());
  upper_.resize(ncols());
  cost_.resize(ncols(), 0.0);
  for (int r = 0; r < num_rows_; ++r) {
    switch (sense[r]) {
      case RowSense::le: lower_[num_structural_ + r] = 0.0; upper_[num_structural_ + r] = kInf; break;
      case RowSense::ge: lower_[num_structural_ + r] = -kInf; upper_[num_structural_ + r] = 0.0; break;
      case RowSense::eq: lower_[num_structural_ + r] = 0.0; upper_[num_structural_ + r] = 0.0; break;
    }
  }
  // All-slack starting basis; structurals rest at their finite bound nearest zero.
  basic_.resize(num_rows_);
  state_.assign(ncols(), VarState::at_lower);
  x_.assign(ncols(), 0.0);
  for (int r = 0; r < num_rows_; ++r) {
    basic_[r] = num_structural_ + r;
    state_[num_structural_ + r] = VarState::basic;
  }
  for (int j = 0; j < num_structural_; ++j) {
    bool pick_lower = std::abs(lower_[j]) <= std::abs(upper_[j]);
    state_[j] = pick_lower ? VarState::at_lower : VarState::at_upper;
    x_[j] = pick_lower ? lower_[j] : upper_[j];
  }
}

void Simplex::set_bounds(int j, double lo, double hi) {
  lower_[j] = lo;
  upper_[j] = hi;
  if (state_[j] == VarState::at_lower) x_[j] = lo;
  if (state_[j] == VarState::at_upper) x_[j] = hi;
}

void Simplex::scatter_column(int j, Eigen::VectorXd& into) const {
  into.setZero();
  if (j >= num_structural_) {
    into[j - num_structural_] = 1.0;
    return;
  }
  for (std::size_t k = cs_start_[j]; k < cs_start_[j + 1]; ++k) {
    into[cs_row_[k]] = cs_val_[k];
  }
}

double Simplex::column_dot(int j, const Eigen::VectorXd& y) const {
  if (j >= num_structural_) return y[j - num_structural_];
  double acc = 0.0;
  for (std::size_t k = cs_start_[j]; k < cs_start_[j + 1]; ++k) {
    acc += cs_val_[k] * y[cs_row_[k]];
  }
  return acc;
}

void Simplex::refactorize() {
  if (num_rows_ == 0) {
    factor_valid_ = true;
    etas_.clear();
    return;
  }
  Eigen::SparseMatrix<double> B(num_rows_, num_rows_);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(cs_val_.size() / std::max(1, num_structural_ / std::max(1, num_rows_)) + num_rows_);
  for (int p = 0; p < num_rows_; ++p) {
    int j = basic_[p];
    if (j >= num_structural_) {
      trip.emplace_back(j - num_structural_, p, 1.0);
    } else {
      for (std::size_t k = cs_start_[j]; k < cs_start_[j + 1]; ++k) {
        trip.emplace_back(cs_row_[k], p, cs_val_[k]);
      }
    }
  }
  B.setFromTriplets(trip.begin(), trip.end());
  lu_.compute(B);
  factor_valid_ = lu_.info() == Eigen::Success;
  etas_.clear();
  if (!factor_valid_) {
    // Singular basis should not occur (the all-slack basis is always regular);
    // fall back to it if it ever does.
    for (int r = 0; r < num_rows_; ++r) {
      int old = basic_[r];
      if (state_[old] == VarState::basic) {
        state_[old] = std::isfinite(lower_[old]) ? VarState::at_lower : VarState::at_upper;
        x_[old] = state_[old] == VarState::at_lower ? lower_[old] : upper_[old];
      }
      basic_[r] = num_structural_ + r;
      state_[num_structural_ + r] = VarState::basic;
    }
    refactorize();
  }
}

void Simplex::ftran(Eigen::VectorXd& v) const {
  if (num_rows_ == 0) return;
  v = lu_.solve(v);
  for (const Eta& e : etas_) {
    double pivot_val = v[e.row] / e.pivot;
    for (const auto& [i, d] : e.entries) {
      if (i == e.row) continue;
      v[i] -= d * pivot_val;
    }
    v[e.row] = pivot_val;
  }
}

void Simplex::btran(Eigen::VectorXd& v) const {
  if (num_rows_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = v[it->row];
    for (const auto& [i, d] : it->entries) {
      if (i == it->row) continue;
      acc -= d * v[i];
    }
    v[it->row] = acc / it->pivot;
  }
  v = lu_.adjoint().solve(v);
}

void Simplex::compute_basic_values() {
  Eigen::VectorXd net(num_rows_);
  for (int r = 0; r < num_rows_; ++r) net[r] = rhs_[r];
  for (int j = 0; j < ncols(); ++j) {
    if (state_[j] == VarState::basic) continue;
    x_[j] = state_[j] == VarState::at_lower ? lower_[j] : upper_[j];
    if (!std::isfinite(x_[j])) x_[j] = 0.0;  // free slack resting value
    if (x_[j] == 0.0) continue;
    if (j >= num_structural_) {
      net[j - num_structural_] -= x_[j];
    } else {
      for (std::size_t k = cs_start_[j]; k < cs_start_[j + 1]; ++k) {
        net[cs_row_[k]] -= cs_val_[k] * x_[j];
      }
    }
  }
  ftran(net);
  for (int p = 0; p < num_rows_; ++p) x_[basic_[p]] = net[p];
}

double Simplex::infeasibility() const {
  double total = 0.0;
  for (int p = 0; p < num_rows_; ++p) {
    int j = basic_[p];
    if (x_[j] < lower_[j] - kBoundTol) total += lower_[j] - x_[j];
    if (x_[j] > upper_[j] + kBoundTol) total += x_[j] - upper_[j];
  }
  return total;
}

void Simplex::phase_cost(bool phase_one, std::vector<double>& out) const {
  out.assign(ncols(), 0.0);
  if (!phase_one) {
    out = cost_;
    return;
  }
  for (int p = 0; p < num_rows_; ++p) {
    int j = basic_[p];
    if (x_[j] < lower_[j] - kBoundTol) out[j] = -1.0;
    else if (x_[j] > upper_[j] + kBoundTol) out[j] = 1.0;
  }
}

bool Simplex::iterate(bool phase_one, bool bland, bool* progressed) {
  *progressed = false;
  std::vector<double> cst;
  phase_cost(phase_one, cst);

  Eigen::VectorXd y(num_rows_);
  for (int p = 0; p < num_rows_; ++p) y[p] = cst[basic_[p]];
  btran(y);

  // Price: entering column with favorable reduced cost.
  int entering = -1;
  double best_score = phase_one ? kReducedCostTol * 10 : kReducedCostTol;
  for (int j = 0; j < ncols(); ++j) {
    if (state_[j] == VarState::basic) continue;
    if (lower_[j] == upper_[j]) continue;  // fixed
    double red = cst[j] - column_dot(j, y);
    double score = 0.0;
    if (state_[j] == VarState::at_lower && red < -best_score) score = -red;
    else if (state_[j] == VarState::at_upper && red > best_score) score = red;
    else continue;
    if (bland) { entering = j; break; }
    if (entering < 0 || score > best_score) {
      best_score = score;
      entering = j;
    }
  }
  if (entering < 0) return false;

  const double dir = state_[entering] == VarState::at_lower ? 1.0 : -1.0;
  Eigen::VectorXd d(num_rows_);
  scatter_column(entering, d);
  ftran(d);

  // Ratio test. Basic variables block when they hit a bound; in phase one a
  // variable beyond a bound blocks at that bound (restoring feasibility).
  double limit = upper_[entering] - lower_[entering];  // bound flip distance
  int leaving_pos = -1;
  double leaving_target = 0.0;
  for (int p = 0; p < num_rows_; ++p) {
    double g = dir * d[p];
    if (std::abs(g) < kPivotTol) continue;
    int j = basic_[p];
    double step = kInf;
    double target = 0.0;
    if (g > 0) {  // x_j decreases
      if (x_[j] > upper_[j] + kBoundTol) { target = upper_[j]; }
      else if (x_[j] >= lower_[j] - kBoundTol && std::isfinite(lower_[j])) { target = lower_[j]; }
      else { continue; }
      step = (x_[j] - target) / g;
    } else {  // x_j increases
      if (x_[j] < lower_[j] - kBoundTol) { target = lower_[j]; }
      else if (x_[j] <= upper_[j] + kBoundTol && std::isfinite(upper_[j])) { target = upper_[j]; }
      else { continue; }
      step = (target - x_[j]) / (-g);
    }
    if (step < -kBoundTol) step = 0.0;
    // Prefer smaller step; break ties on larger pivot magnitude for stability.
    if (step < limit - 1e-12 ||
        (leaving_pos >= 0 && step < limit + 1e-12 &&
         std::abs(d[p]) > std::abs(d[leaving_pos]))) {
      limit = step;
      leaving_pos = p;
      leaving_target = target;
    }
  }

  if (!std::isfinite(limit)) return false;  // caller maps to unbounded

  double step = std::max(0.0, limit);
  if (step > 1e-12) *progressed = true;

  // Apply movement.
  for (int p = 0; p < num_rows_; ++p) {
    if (std::abs(d[p]) < 1e-14) continue;
    x_[basic_[p]] -= dir * d[p] * step;
  }
  x_[entering] += dir * step;

  if (leaving_pos < 0) {
    // Bound flip: entering switched sides without a basis change.
    state_[entering] =
        state_[entering] == VarState::at_lower ? VarState::at_upper : VarState::at_lower;
    x_[entering] = state_[entering] == VarState::at_lower ? lower_[entering] : upper_[entering];
    return true;
  }

  int leaving = basic_[leaving_pos];
  x_[leaving] = leaving_target;
  state_[leaving] = std::abs(leaving_target - lower_[leaving]) <=
                            std::abs(leaving_target - upper_[leaving])
                        ? VarState::at_lower
                        : VarState::at_upper;
  basic_[leaving_pos] = entering;
  state_[entering] = VarState::basic;

  Eta eta;
  eta.row = leaving_pos;
  eta.pivot = d[leaving_pos];
  for (int p = 0; p < num_rows_; ++p) {
    if (std::abs(d[p]) > 1e-12) eta.entries.push_back({p, d[p]});
  }
  etas_.push_back(std::move(eta));
  if (static_cast<int>(etas_.size()) >= kRefactorInterval) {
    refactorize();
    compute_basic_values();
  }
  return true;
}

Simplex::Status Simplex::solve(long long max_iterations) {
  if (!factor_valid_) refactorize();
  compute_basic_values();

  long long iters = 0;
  degenerate_streak_ = 0;
  int corrective_passes = 0;
  bool phase_one = infeasibility() > 1e-7;
  while (true) {
    if (max_iterations >= 0 && iters >= max_iterations) return Status::iteration_limit;
    bool bland = degenerate_streak_ > 400;
    bool progressed = false;
    bool moved = iterate(phase_one, bland, &progressed);
    ++iters;
    ++total_iterations_;
    degenerate_streak_ = progressed ? 0 : degenerate_streak_ + 1;
    if (iters % 512 == 0) {
      refactorize();
      compute_basic_values();
    }
    if (phase_one) {
      double inf = infeasibility();
      if (inf <= 1e-7) {
        phase_one = false;
        degenerate_streak_ = 0;
        continue;
      }
      if (!moved) {
        // Phase-one optimum with residual infeasibility: LP has no feasible point.
        refactorize();
        compute_basic_values();
        return infeasibility() <= 1e-6 ? Status::optimal : Status::infeasible;
      }
    } else if (!moved) {
      refactorize();
      compute_basic_values();
      if (infeasibility() > 1e-6 && corrective_passes < 3) {
        ++corrective_passes;
        phase_one = true;
        continue;
      }
      return Status::optimal;
    }
  }
}

double Simplex::objective() const {
  double v = 0.0;
  for (int j = 0; j < num_structural_; ++j) v += cost_[j] * x_[j];
  return v;
}

}  // namespace tdscw::milp
