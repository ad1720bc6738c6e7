#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jrp/model.hpp"
#include "jrp/simplex.hpp"

namespace jrp {

enum class VarKind { kGeneral, kItem, kService, kReject };

// Y(s): a = s.  YI(i, s): a = i, b = s.  X(d, s): a = d, b = s.  R(d): a = d.
struct VarKey {
  VarKind kind = VarKind::kGeneral;
  int a = 0;
  int b = 0;
  auto operator<=>(const VarKey&) const = default;

  static VarKey general(int s) { return {VarKind::kGeneral, s, 0}; }
  static VarKey item(int i, int s) { return {VarKind::kItem, i, s}; }
  static VarKey service(int d, int s) { return {VarKind::kService, d, s}; }
  static VarKey reject(int d) { return {VarKind::kReject, d, 0}; }
};

enum class RowKind { kCover, kLink, kService, kColor };

struct RowTag {
  RowKind kind = RowKind::kCover;
  int a = 0;
  int b = 0;
};

struct SideInformation {
  std::set<int> forced_general;
  std::set<int> forced_zero_general;
  std::set<ItemSlot> forced_item;
  std::set<ItemSlot> forbidden_item;
  std::set<DemandSlot> forced_service;
  std::optional<double> k_max;
  std::optional<double> h_max;
  int m = 0;

  bool empty() const;
};

// kDeadline substitutes x^d_s = y^i_s on the zero-holding window of each
// demand (deadline-only instances); service values are then reconstructed.
enum class LpForm { kFull, kDeadline };

struct LpBuildOptions {
  bool perturb_holding = false;
  double epsilon = 1.0;
  LpForm form = LpForm::kFull;
};

struct LPModel {
  // The instance the rows were built from, after holding perturbation and
  // truncation by the side information.
  Instance instance;
  LpForm form = LpForm::kFull;
  std::vector<VarKey> vars;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> cost;
  std::vector<LpRow> rows;
  std::vector<RowTag> row_tags;
  // Interval and cost-cap rows appended by re-solve loops.
  std::vector<LpRow> extra_rows;
  std::map<VarKey, int> index;

  int n_vars() const { return static_cast<int>(vars.size()); }
  // Column of a variable, or -1 if the variable does not exist.
  int find(const VarKey& key) const;
  void fix(int column, double value);
  LinearProgram to_program() const;
};

struct LpSolution {
  FractionalSolution sol;
  double objective = 0.0;
  std::vector<double> values;
  SimplexResult basis;
};

struct DualSolution {
  std::vector<double> b;
  std::map<DemandSlot, double> l;
  std::map<ItemSlot, double> z;
  std::vector<double> lam;
  std::vector<double> extra;
  double objective = 0.0;
};

struct DualCheck {
  DualSolution dual;
  double primal = 0.0;
  double gap = 0.0;
};

struct VertexReport {
  int fractional = 0;
  int active_rows = 0;
  bool ok() const { return fractional <= active_rows; }
};

// H^d_s += ε·κ·(t − s)/(|D|·T) on finite entries, κ the smallest positive
// finite holding value (1 if there is none).
Instance perturb_holding(const Instance& instance, double epsilon);

// Throws kInconsistentSideInfo.
LPModel build_lp(const Instance& instance, const SideInformation& side = {},
                 const LpBuildOptions& options = {});

// Throws kInfeasible.
LpSolution solve_extreme(const LPModel& model);

// Dual values read off the optimal basis, checked for sign feasibility,
// strong duality and complementary slackness. Throws kDualityGapExceeded or
// kSlacknessViolated.
DualCheck solve_dual_and_verify(const LPModel& model, const LpSolution& solution);

// Σ_{d ∈ served} b_d. Throws kSlacknessViolated if some x-supported slot of a
// served demand has holding above b_d.
double holding_cost_bound(const LPModel& model, const FractionalSolution& primal,
                          const DualSolution& dual, const std::vector<int>& served);

VertexReport check_vertex(const LPModel& model, const LpSolution& solution);

// CPLEX LP text format.
std::string export_lp_text(const LPModel& model);

}  // namespace jrp
