#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "misnc/errors.hpp"

namespace misnc::lp {

enum class Relation { kLe, kEq, kGe };
enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Constraint {
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  Relation rel = Relation::kLe;
  double rhs = 0.0;
};

// Minimization LP; every variable has lower bound 0 and no upper bound.
class LinearProgram {
 public:
  int add_variable(std::string name, double cost = 0.0);
  void set_cost(int var, double cost);
  void add_constraint(std::vector<std::pair<int, double>> terms, Relation rel, double rhs);

  int variable_count() const { return static_cast<int>(costs_.size()); }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }
  double cost(int var) const { return costs_[static_cast<size_t>(var)]; }
  const std::vector<double>& costs() const { return costs_; }
  const std::string& variable_name(int var) const { return names_[static_cast<size_t>(var)]; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

 private:
  std::vector<std::string> names_;
  std::vector<double> costs_;
  std::vector<Constraint> constraints_;
};

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<double> values;  // one per declared variable when optimal
  double objective = 0.0;
  bool basic = false;  // true when the values form a basic feasible solution
  long pivots = 0;

  double value(int var) const { return values[static_cast<size_t>(var)]; }
};

// Dense two-phase simplex returning basic optimal solutions. Dantzig pricing
// with a Bland fallback once a degenerate streak is detected; ratio ties go to
// the lowest basic variable index, so runs are deterministic. The final
// tableau is kept, which lets the same constraint system be re-optimized under
// a new objective without repeating phase one.
class SimplexSolver {
 public:
  explicit SimplexSolver(LinearProgram lp);

  Solution solve();
  Solution resolve(std::span<const double> structural_costs);

  const LinearProgram& program() const { return lp_; }

 private:
  void build_tableau();
  void compute_objective_row();
  Status pivot_to_optimality();
  int pick_entering() const;
  int ratio_test(int enter) const;
  void do_pivot(int row, int col);
  bool eliminate_artificials();
  void drop_artificial_columns();
  Solution extract() const;
  double max_violation(const std::vector<double>& values) const;
  double& tab(int row, int col) { return tab_[static_cast<size_t>(row) * stride_ + static_cast<size_t>(col)]; }
  double tab(int row, int col) const { return tab_[static_cast<size_t>(row) * stride_ + static_cast<size_t>(col)]; }

  LinearProgram lp_;
  int n_ = 0;          // structural variables
  int rows_ = 0;       // active rows
  int cols_ = 0;       // structural + slack columns (phase-two width)
  int total_cols_ = 0; // including artificials during phase one
  size_t stride_ = 0;  // row width in tab_ (total_cols_ + 1, rhs last)
  std::vector<double> tab_;
  std::vector<int> basis_;
  std::vector<double> cost_;     // current cost per column
  std::vector<double> obj_row_;  // reduced costs per column
  double obj_value_ = 0.0;
  long pivots_ = 0;
  long pivot_cap_ = 0;
  bool bland_ = false;
  long stall_ = 0;
  bool warm_ = false;  // tableau holds an optimal basis with artificials gone
  long resolves_since_rebuild_ = 0;
};

Solution solve_lp(const LinearProgram& lp);

}  // namespace misnc::lp
