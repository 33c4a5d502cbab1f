#pragma once

#include <limits>
#include <vector>

#include <Eigen/Sparse>

#include "tdscw/milp.hpp"

namespace tdscw::milp {

// Bounded-variable revised simplex for
//     min c.x   s.t.  A x (+ slack) = b,   l <= x <= u,
// built once per matrix; variable bounds may change between solves (the
// branch-and-bound driver relies on this). Basis factorizations come from
// Eigen::SparseLU with product-form eta updates in between.
class Simplex {
 public:
  enum class Status { optimal, infeasible, unbounded, iteration_limit };

  Simplex(int num_structural, std::vector<double> lower, std::vector<double> upper,
          std::vector<double> minimize_cost, const std::vector<std::size_t>& row_start,
          const std::vector<int>& col, const std::vector<double>& coef,
          const std::vector<RowSense>& sense, std::vector<double> rhs);

  void set_bounds(int structural_var, double lo, double hi);
  double lower_bound_of(int structural_var) const { return lower_[structural_var]; }
  double upper_bound_of(int structural_var) const { return upper_[structural_var]; }

  Status solve(long long max_iterations = -1);

  double objective() const;
  double value(int structural_var) const { return x_[structural_var]; }
  long long iterations() const { return total_iterations_; }

 private:
  enum class VarState : unsigned char { at_lower, at_upper, basic };

  int ncols() const { return num_structural_ + num_rows_; }
  double col_lower(int j) const { return lower_[j]; }
  double col_upper(int j) const { return upper_[j]; }

  void refactorize();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void compute_basic_values();
  double infeasibility() const;
  void phase_cost(bool phase_one, std::vector<double>& out) const;
  // One priced iteration; returns false when no improving column exists.
  bool iterate(bool phase_one, bool bland, bool* progressed);

  // Column j of [A | I] into dense scratch.
  void scatter_column(int j, Eigen::VectorXd& into) const;
  double column_dot(int j, const Eigen::VectorXd& y) const;

  int num_structural_ = 0;
  int num_rows_ = 0;
  // CSC of the structural part.
  std::vector<std::size_t> cs_start_;
  std::vector<int> cs_row_;
  std::vector<double> cs_val_;
  std::vector<double> lower_, upper_;  // structural then slack bounds
  std::vector<double> cost_;           // structural costs; slacks cost 0
  std::vector<double> rhs_;

  std::vector<int> basic_;           // row position -> column
  std::vector<VarState> state_;      // per column
  std::vector<double> x_;            // per column
  // mutable: SparseLU::adjoint() is a non-const accessor in Eigen 3.4
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool factor_valid_ = false;
  struct Eta {
    int row;
    std::vector<std::pair<int, double>> entries;  // includes the pivot row entry
    double pivot;
  };
  std::vector<Eta> etas_;
  long long total_iterations_ = 0;
  int degenerate_streak_ = 0;
};

}  // namespace tdscw::milp
