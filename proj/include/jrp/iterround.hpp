#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jrp/lpcore.hpp"
#include "jrp/model.hpp"

namespace jrp {

struct Multibatch {
  int item = 0;
  int first = 0;
  int last = 0;
  double size = 0.0;
};

// Maximal intervals of item values below 1 whose end values are positive.
// item < 0 scans every item.
std::vector<Multibatch> find_multibatches(const FractionalSolution& sol, int n_items, int horizon, int item = -1);

// Left-to-right disjoint intervals of [first, last], each closing as soon as
// its item mass reaches 1. The mass left over at the end is dropped.
std::vector<std::pair<int, int>> unit_intervals(const FractionalSolution& sol, int item, int first, int last);

struct LeanViolation {
  int demand = 0;
  int timestep = 0;  // 0 for the coverage clause
  double gap = 0.0;
};

struct LeanReport {
  std::vector<LeanViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Service equals the item order at every servable slot after the first
// served one, and service plus rejection equals 1.
LeanReport check_lean(const Instance& instance, const FractionalSolution& sol, double tol = 1e-7);

struct IterationRecord {
  int item = 0;
  int first = 0;
  int last = 0;
  double size = 0.0;
  std::vector<int> rounded;
  double mass_before = 0.0;
  double mass_after = 0.0;
  int multibatches_after = 0;
  double ratio() const { return mass_before > 0.0 ? mass_after / mass_before : 0.0; }
};

struct ItemRounding {
  int item = 0;
  bool single_path = false;
  double q_init = 0.0;
  int iterations = 0;
  int anchors = 0;
  int pipage_steps = 0;
  int pipage_roundups = 0;
  // The finishing loop stopped early because no direction existed.
  bool direction_missing = false;
  double cost_before = 0.0;
  double cost_after = 0.0;
  double extra() const { return cost_after - cost_before; }
};

struct IterRoundReport {
  int rows = 0;  // conserved rows: colors plus a penalty row
  double lp_cost = 0.0;
  int initial_multibatches = 0;
  bool initial_lean = true;
  bool all_lean = true;
  int max_multibatches = 0;
  std::vector<IterationRecord> iterations;
  std::vector<ItemRounding> items;
  double service_extra = 0.0;
  double final_cost = 0.0;
  std::vector<std::string> trace;
};

struct IterRoundOptions {
  // Perturbation of holding values that makes optimal solutions lean.
  double epsilon = 1e-3;
  // Use the general path even on single-color deadline instances.
  bool force_general = false;
  bool trace = false;
};

struct IterRoundResult {
  IntegralSolution solution;
  IterRoundReport report;
};

// Rounds a fractional solution of an instance whose general orders are all
// open (K_0 is ignored). Demands whose seed rejection is 0 or 1 keep it.
// Throws kLpInfeasibleAfterConstraints.
IterRoundResult iterative_round(const Instance& instance, const FractionalSolution& seed,
                                const IterRoundOptions& options = {});

// Greedy intervals between consecutive round-ups on the general path:
// max(1, ⌊z/(4C + 4)⌋ − 1) with C conserved rows.
int interval_group_size(double z, int rows);

// ⌈log_{8/7}(q/4)⌉, 0 for q ≤ 4.
int single_path_iteration_bound(double q_init);
// 10·ln(max(q, e))·K_i.
double single_path_extra_bound(double q_init, double k_item);
// (40C² + 90C²·ln(max(q, e)))·K_i.
double general_path_extra_bound(double q_init, double k_item, int rows);

}  // namespace jrp
