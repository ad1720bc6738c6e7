#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "jrp/model.hpp"

namespace jrp {

// One post-split timestep. Until round-ups every served demand has
// x = item_y[item], and before item rounding every item_y equals y.
struct PipageColumn {
  int timestep = 0;
  int batch = -1;
  double y = 0.0;
  std::map<int, double> item_y;
  std::map<int, double> x;  // demand -> service value
};

struct PipageState {
  const Instance* instance = nullptr;
  std::vector<PipageColumn> columns;
  std::vector<std::pair<int, int>> batches;
  // Conserved rows: one per color, plus a penalty row when penalties exist.
  std::vector<std::vector<double>> row_weights;  // [row][demand]
  std::vector<double> row_limits;

  int n_rows() const { return static_cast<int>(row_weights.size()); }
  double served_extent(int d) const;
  // Σ_d row_weights[k][d]·(1 − served extent), per row.
  std::vector<double> rejected_rows() const;
  // Columns of one timestep merged back together.
  FractionalSolution to_fractional() const;
};

struct PipageReport {
  double seed_cost = 0.0;
  double trimmed_cost = 0.0;
  double final_cost = 0.0;
  // Cost added by each round-up phase.
  double order_roundup = 0.0;
  double item_roundup = 0.0;
  double service_roundup = 0.0;
  int columns = 0;
  int order_steps = 0;
  int item_steps = 0;
  int fractional_orders_left = 0;
  int fractional_items_left = 0;
  // Largest deviation of a conserved row from its value before a phase.
  double max_row_drift = 0.0;
  // Rejected weight per row increased by a round-up (should stay false).
  bool roundup_increased_rejection = false;
  std::vector<std::string> trace;
};

struct PipageOptions {
  std::optional<double> k_max;
  std::optional<double> h_max;
  bool trace = false;
};

struct PipageResult {
  IntegralSolution solution;
  PipageReport report;
};

// y^i_s lowered to the largest service value at (i, s), y_s to the largest
// item value, and r_d = 1 − Σ_s x^d_s.
FractionalSolution trim(const Instance& instance, const FractionalSolution& sol);

// Splits each timestep at the distinct service values so that every x and
// y^i equals 0 or the column's y. batches are [first, last] timestep runs.
PipageState split_for_pipage(const Instance& instance, const FractionalSolution& trimmed,
                             const std::vector<std::pair<int, int>>& batches);

// Perturbs fractional columns along null-space directions until at most as
// many remain as twice the number of conserved rows, then rounds them up.
// Throws kNullSpaceNotFound.
void round_candidate_orders(PipageState& state, PipageReport& report, bool trace = false);

// The same loop over fractional item values grouped by (item, batch).
// Requires integral column values. Throws kNullSpaceNotFound.
void round_item_orders(PipageState& state, PipageReport& report, bool trace = false);

// Serves each demand at the last order of its item before its deadline or
// rejects it: a vertex of the LP over r with the given per-color limits (and
// the optional penalty limit), fractional r rounded down. fixed[d] is -1
// (free), 0 (must be served) or 1 (rejected); empty means all free. Throws
// kInfeasible.
IntegralSolution round_service_vars(const Instance& instance, const std::map<int, std::set<int>>& orders,
                                    const std::vector<double>& limits,
                                    std::optional<double> penalty_limit = {},
                                    const std::vector<int>& fixed = {});

// trim, split, round orders, round items, round services. Throws
// kInternal if the additive cost bound fails.
PipageResult pipage_round(const Instance& instance, const FractionalSolution& seed,
                          const std::vector<std::pair<int, int>>& batches, const PipageOptions& options = {});

// Additive allowance seed + 2C·K_0 + 2C·K_max + C·H_max with C conserved rows.
double pipage_allowance(const Instance& instance, double k_max, double h_max);

}  // namespace jrp
