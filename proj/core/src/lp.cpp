#include "misnc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace misnc::lp {

namespace {
constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kZeroSnap = 1e-12;
constexpr double kPhase1FeasTol = 1e-7;
constexpr double kResidualCheckTol = 1e-7;
constexpr double kRatioTieTol = 1e-12;
constexpr long kRebuildEvery = 4096;
}  // namespace

int LinearProgram::add_variable(std::string name, double cost) {
  names_.push_back(std::move(name));
  costs_.push_back(cost);
  return static_cast<int>(costs_.size()) - 1;
}

void LinearProgram::set_cost(int var, double cost) {
  costs_[static_cast<size_t>(var)] = cost;
}

void LinearProgram::add_constraint(std::vector<std::pair<int, double>> terms, Relation rel,
                                   double rhs) {
  for (const auto& [var, coeff] : terms) {
    if (var < 0 || var >= variable_count())
      throw Error("constraint references undeclared variable " + std::to_string(var));
    if (!std::isfinite(coeff)) throw Error("constraint coefficient is not finite");
  }
  if (!std::isfinite(rhs)) throw Error("constraint rhs is not finite");
  constraints_.push_back(Constraint{std::move(terms), rel, rhs});
}

SimplexSolver::SimplexSolver(LinearProgram lp) : lp_(std::move(lp)) {}

void SimplexSolver::build_tableau() {
  n_ = lp_.variable_count();
  const auto& cons = lp_.constraints();
  rows_ = static_cast<int>(cons.size());

  // Normalize every row to rhs >= 0, then lay out columns as
  // [structural | slack/surplus]; artificial columns stay virtual (identity
  // columns tagged by basis index >= cols_).
  int nslack = 0;
  for (const auto& c : cons)
    if (c.rel != Relation::kEq) ++nslack;
  cols_ = n_ + nslack;
  total_cols_ = cols_ + rows_;
  stride_ = static_cast<size_t>(cols_) + 1;

  tab_.assign(static_cast<size_t>(rows_) * stride_, 0.0);
  basis_.assign(static_cast<size_t>(rows_), -1);

  int slack_col = n_;
  for (int i = 0; i < rows_; ++i) {
    const Constraint& c = cons[static_cast<size_t>(i)];
    double sign = c.rhs < 0.0 ? -1.0 : 1.0;
    Relation rel = c.rel;
    if (sign < 0.0) {
      if (rel == Relation::kLe)
        rel = Relation::kGe;
      else if (rel == Relation::kGe)
        rel = Relation::kLe;
    }
    for (const auto& [var, coeff] : c.terms) tab(i, var) += sign * coeff;
    tab(i, cols_) = sign * c.rhs;

    if (c.rel != Relation::kEq) {
      double s = rel == Relation::kLe ? 1.0 : -1.0;
      tab(i, slack_col) = s;
      if (rel == Relation::kLe) {
        basis_[static_cast<size_t>(i)] = slack_col;
      } else {
        basis_[static_cast<size_t>(i)] = cols_ + i;  // artificial
      }
      ++slack_col;
    } else {
      basis_[static_cast<size_t>(i)] = cols_ + i;  // artificial
    }
  }

  obj_row_.assign(static_cast<size_t>(cols_), 0.0);
  cost_.assign(static_cast<size_t>(cols_), 0.0);
  pivots_ = 0;
  pivot_cap_ = 50L * (static_cast<long>(n_) + static_cast<long>(rows_));
  pivot_cap_ = std::max(pivot_cap_, 200L);
  bland_ = false;
  stall_ = 0;
}

void SimplexSolver::compute_objective_row() {
  std::copy(cost_.begin(), cost_.end(), obj_row_.begin());
  obj_value_ = 0.0;
  for (int i = 0; i < rows_; ++i) {
    int b = basis_[static_cast<size_t>(i)];
    double cb = b < cols_ ? cost_[static_cast<size_t>(b)] : 1.0;  // artificials carry cost 1
    if (cb == 0.0) continue;
    for (int j = 0; j < cols_; ++j) obj_row_[static_cast<size_t>(j)] -= cb * tab(i, j);
    obj_value_ += cb * tab(i, cols_);
  }
}

int SimplexSolver::pick_entering() const {
  if (bland_) {
    for (int j = 0; j < cols_; ++j)
      if (obj_row_[static_cast<size_t>(j)] < -kReducedCostTol) return j;
    return -1;
  }
  int best = -1;
  double best_val = -kReducedCostTol;
  for (int j = 0; j < cols_; ++j) {
    double v = obj_row_[static_cast<size_t>(j)];
    if (v < best_val) {
      best_val = v;
      best = j;
    }
  }
  return best;
}

int SimplexSolver::ratio_test(int enter) const {
  int best_row = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows_; ++i) {
    double a = tab(i, enter);
    if (a <= kPivotTol) continue;
    double ratio = tab(i, cols_) / a;
    if (ratio < best_ratio - kRatioTieTol) {
      best_ratio = ratio;
      best_row = i;
    } else if (ratio <= best_ratio + kRatioTieTol && best_row >= 0 &&
               basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(best_row)]) {
      best_row = i;
    }
  }
  return best_row;
}

void SimplexSolver::do_pivot(int row, int col) {
  double pd = tab(row, col);
  double* prow = &tab_[static_cast<size_t>(row) * stride_];
  for (size_t j = 0; j < stride_; ++j) prow[j] /= pd;
  prow[static_cast<size_t>(col)] = 1.0;

  for (int i = 0; i < rows_; ++i) {
    if (i == row) continue;
    double f = tab(i, col);
    if (std::abs(f) <= kZeroSnap) {
      tab(i, col) = 0.0;
      continue;
    }
    double* irow = &tab_[static_cast<size_t>(i) * stride_];
    for (size_t j = 0; j < stride_; ++j) irow[j] -= f * prow[j];
    irow[static_cast<size_t>(col)] = 0.0;
  }
  double f = obj_row_[static_cast<size_t>(col)];
  if (std::abs(f) > 0.0) {
    for (int j = 0; j < cols_; ++j) obj_row_[static_cast<size_t>(j)] -= f * prow[static_cast<size_t>(j)];
    obj_row_[static_cast<size_t>(col)] = 0.0;
  }
  basis_[static_cast<size_t>(row)] = col;
}

Status SimplexSolver::pivot_to_optimality() {
  while (true) {
    int enter = pick_entering();
    if (enter < 0) return Status::kOptimal;
    int leave = ratio_test(enter);
    if (leave < 0) return Status::kUnbounded;
    if (++pivots_ > pivot_cap_) throw PivotLimitError(pivots_, pivot_cap_);

    double prev = obj_value_;
    do_pivot(leave, enter);
    obj_value_ = 0.0;
    for (int i = 0; i < rows_; ++i) {
      int b = basis_[static_cast<size_t>(i)];
      double cb = b < cols_ ? cost_[static_cast<size_t>(b)] : 1.0;
      if (cb != 0.0) obj_value_ += cb * tab(i, cols_);
    }
    if (prev - obj_value_ < 1e-13 * (1.0 + std::abs(prev))) {
      if (++stall_ > rows_ + 16) bland_ = true;
    } else {
      stall_ = 0;
      bland_ = false;
    }
  }
}

bool SimplexSolver::eliminate_artificials() {
  for (int i = 0; i < rows_; ++i) {
    if (basis_[static_cast<size_t>(i)] < cols_) continue;
    int col = -1;
    for (int j = 0; j < cols_; ++j) {
      if (std::abs(tab(i, j)) > kPivotTol) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      do_pivot(i, col);
    } else {
      basis_[static_cast<size_t>(i)] = -1;  // redundant row, drop below
    }
  }

  int keep = 0;
  for (int i = 0; i < rows_; ++i) {
    if (basis_[static_cast<size_t>(i)] < 0) continue;
    if (keep != i) {
      std::copy(&tab_[static_cast<size_t>(i) * stride_], &tab_[static_cast<size_t>(i) * stride_] + stride_,
                &tab_[static_cast<size_t>(keep) * stride_]);
      basis_[static_cast<size_t>(keep)] = basis_[static_cast<size_t>(i)];
    }
    ++keep;
  }
  bool dropped = keep != rows_;
  rows_ = keep;
  basis_.resize(static_cast<size_t>(rows_));
  tab_.resize(static_cast<size_t>(rows_) * stride_);
  return dropped;
}

void SimplexSolver::drop_artificial_columns() {
  total_cols_ = cols_;  // artificials were virtual; nothing to compact
}

double SimplexSolver::max_violation(const std::vector<double>& values) const {
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, -v);
  for (const auto& c : lp_.constraints()) {
    double lhs = 0.0;
    for (const auto& [var, coeff] : c.terms) lhs += coeff * values[static_cast<size_t>(var)];
    switch (c.rel) {
      case Relation::kLe: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::kGe: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::kEq: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

Solution SimplexSolver::extract() const {
  Solution s;
  s.status = Status::kOptimal;
  s.values.assign(static_cast<size_t>(n_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    int b = basis_[static_cast<size_t>(i)];
    if (b >= 0 && b < n_) s.values[static_cast<size_t>(b)] = std::max(0.0, tab(i, cols_));
  }
  s.objective = 0.0;
  for (int j = 0; j < n_; ++j) s.objective += lp_.cost(j) * s.values[static_cast<size_t>(j)];
  s.basic = true;
  s.pivots = pivots_;
  return s;
}

Solution SimplexSolver::solve() {
  warm_ = false;
  resolves_since_rebuild_ = 0;
  build_tableau();

  bool need_phase1 = false;
  for (int i = 0; i < rows_; ++i)
    if (basis_[static_cast<size_t>(i)] >= cols_) need_phase1 = true;

  if (need_phase1) {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    compute_objective_row();
    Status st = pivot_to_optimality();
    if (st == Status::kUnbounded)
      throw Error("simplex: phase one reported unbounded");  // cost is bounded below by 0
    if (obj_value_ > kPhase1FeasTol) {
      Solution s;
      s.status = Status::kInfeasible;
      s.pivots = pivots_;
      return s;
    }
    eliminate_artificials();
    drop_artificial_columns();
  }

  for (int j = 0; j < cols_; ++j)
    cost_[static_cast<size_t>(j)] = j < n_ ? lp_.cost(j) : 0.0;
  compute_objective_row();
  bland_ = false;
  stall_ = 0;
  Status st = pivot_to_optimality();
  if (st == Status::kUnbounded) {
    Solution s;
    s.status = Status::kUnbounded;
    s.pivots = pivots_;
    return s;
  }

  Solution s = extract();
  if (max_violation(s.values) > kResidualCheckTol)
    throw Error("simplex: optimal basis fails feasibility re-check");
  warm_ = true;
  return s;
}

Solution SimplexSolver::resolve(std::span<const double> structural_costs) {
  if (structural_costs.size() != static_cast<size_t>(lp_.variable_count()))
    throw Error("resolve: cost vector size mismatch");
  for (size_t j = 0; j < structural_costs.size(); ++j)
    lp_.set_cost(static_cast<int>(j), structural_costs[j]);

  if (!warm_ || ++resolves_since_rebuild_ > kRebuildEvery) return solve();

  for (int j = 0; j < cols_; ++j)
    cost_[static_cast<size_t>(j)] = j < n_ ? lp_.cost(j) : 0.0;
  pivots_ = 0;
  bland_ = false;
  stall_ = 0;
  compute_objective_row();
  Status st = pivot_to_optimality();
  if (st == Status::kUnbounded) {
    warm_ = false;
    Solution s;
    s.status = Status::kUnbounded;
    s.pivots = pivots_;
    return s;
  }
  Solution s = extract();
  if (max_violation(s.values) > kResidualCheckTol) return solve();  // self-heal from drift
  return s;
}

Solution solve_lp(const LinearProgram& lp) {
  SimplexSolver solver(lp);
  return solver.solve();
}

}  // namespace misnc::lp
