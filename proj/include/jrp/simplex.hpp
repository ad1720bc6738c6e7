#pragma once

#include <utility>
#include <vector>

namespace jrp {

enum class Sense { kLe, kGe, kEq };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
};

// min cost·x  s.t.  rows,  lower ≤ x ≤ upper. Every column needs a finite
// lower or upper bound.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpRow> rows;

  int n_cols() const { return static_cast<int>(cost.size()); }
  int n_rows() const { return static_cast<int>(rows.size()); }
  int add_column(double c, double lo, double up);
};

enum class VarState { kBasic, kAtLower, kAtUpper };

struct SimplexOptions {
  int refactor_interval = 100;
  int bland_after_degenerate = 5000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  long max_iterations = 2'000'000;
};

struct SimplexResult {
  double objective = 0.0;
  std::vector<double> x;               // structural values
  std::vector<double> row_activity;    // a_r·x
  std::vector<double> row_duals;       // π, with π ≤ 0 on ≤ rows and π ≥ 0 on ≥ rows
  std::vector<double> reduced_costs;   // c_j − π·A_j
  std::vector<VarState> state;         // structural states
  std::vector<bool> row_slack_basic;   // slack (or leftover artificial) basic in row
  long iterations = 0;
  long degenerate_pivots = 0;
  bool used_bland = false;
};

// Solves to an optimal basic solution. Throws Error(kInfeasible) or
// Error(kUnbounded). Deterministic for a given program.
SimplexResult solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace jrp
