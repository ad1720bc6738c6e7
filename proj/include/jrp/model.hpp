#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jrp {

// Absolute tolerance for [0,1] bounds and constraint checks.
inline constexpr double kTol = 1e-9;

// Holding cost of a slot at which a demand may not be served.
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

inline bool is_infeasible(double h) { return std::isinf(h); }

enum class Errc {
  kBadInput,
  kNonMonotoneHolding,
  kBadDeadline,
  kServedAtInfeasibleSlot,
  kDanglingReference,
  kOverlappingDemandSets,
  kInconsistentSideInfo,
  kInfeasible,
  kUnbounded,
  kDualityGapExceeded,
  kSlacknessViolated,
  kTooLarge,
  kInfeasibleDemand,
  kRejectionRequired,
  kNoFeasibleShift,
  kNullSpaceNotFound,
  kLpInfeasibleAfterConstraints,
  kInfeasibleInstance,
  kBadProfile,
  kInternal,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// A demand point (i, t). Timesteps are 1-based; holding[s - 1] is the cost of
// serving the demand from an order placed at timestep s.
struct Demand {
  int item = 0;
  int deadline = 1;
  std::vector<double> holding;
  std::vector<double> weights;
  double penalty = 0.0;

  double holding_at(int s) const { return holding[s - 1]; }
  bool servable_at(int s) const {
    return s >= 1 && s <= deadline && !is_infeasible(holding[s - 1]);
  }
  // Earliest timestep with finite holding, or 0 if none.
  int first_servable() const;
};

struct Instance {
  int n_items = 0;
  int horizon = 0;
  double k0 = 0.0;
  std::vector<double> k_item;
  std::vector<Demand> demands;
  int n_colors = 0;
  std::vector<double> rejection_limits;

  int n_demands() const { return static_cast<int>(demands.size()); }
  // Throws kBadInput / kBadDeadline / kNonMonotoneHolding.
  void validate() const;
  // Every finite holding entry is zero.
  bool is_deadline_only() const;
  bool has_penalties() const;
  // Largest finite holding entry over all demands (0 if none).
  double max_finite_holding() const;
  double max_item_cost() const;
  // Total weight of all demands in color c.
  double total_weight(int c) const;
};

struct Disposition {
  enum class Kind { kUnset, kServed, kRejected };
  Kind kind = Kind::kUnset;
  int slot = 0;

  static Disposition served(int s) { return {Kind::kServed, s}; }
  static Disposition rejected() { return {Kind::kRejected, 0}; }
  bool is_served() const { return kind == Kind::kServed; }
  bool is_rejected() const { return kind == Kind::kRejected; }
  bool is_set() const { return kind != Kind::kUnset; }
  bool operator==(const Disposition&) const = default;
};

struct IntegralSolution {
  // Timestep -> ordered items. Empty item sets are never stored.
  std::map<int, std::set<int>> orders;
  std::vector<Disposition> disposition;

  static IntegralSolution empty_for(const Instance& instance);
  void add_order(int s, int item) { orders[s].insert(item); }
  bool has_order(int s, int item) const;
  int order_count() const { return static_cast<int>(orders.size()); }
};

using ItemSlot = std::pair<int, int>;    // (item, timestep)
using DemandSlot = std::pair<int, int>;  // (demand, timestep)

struct FractionalSolution {
  std::map<int, double> y;
  std::map<ItemSlot, double> y_item;
  std::map<DemandSlot, double> x;
  std::vector<double> r;

  double get_y(int s) const;
  double get_y_item(int i, int s) const;
  double get_x(int d, int s) const;
  // Σ_s x^d_s.
  double served_extent(int d) const;
  // Removes zero entries from the sparse maps.
  void prune();
};

// Rounds every value within tol of 0 or 1 to that value and prunes zeros.
void snap(FractionalSolution& sol, double tol = kTol);

struct CostBreakdown {
  double general = 0.0;
  double item = 0.0;
  double holding = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

CostBreakdown evaluate(const Instance& instance, const IntegralSolution& sol);
CostBreakdown evaluate(const Instance& instance, const FractionalSolution& sol);

struct Violation {
  enum class Kind {
    kUnassigned,
    kServiceWithoutItemOrder,
    kItemOrderWithoutGeneralOrder,
    kServiceExceedsItemOrder,
    kRejectionLimit,
    kLateService,
    kInfeasibleSlot,
    kUncovered,
    kOutOfBounds,
    kBadTimestep,
    kDanglingReference,
  };
  Kind kind;
  int demand = -1;
  int item = -1;
  int timestep = -1;
  int color = -1;
  double amount = 0.0;

  std::string describe() const;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind kind) const;
  std::string describe() const;
};

FeasibilityReport check_feasible(const Instance& instance, const IntegralSolution& sol);
FeasibilityReport check_feasible(const Instance& instance, const FractionalSolution& sol,
                                 double tol = kTol);

// Rejected weight per color.
std::vector<double> rejected_weight(const Instance& instance, const IntegralSolution& sol);
std::vector<double> rejected_weight(const Instance& instance, const FractionalSolution& sol);

IntegralSolution merge(const IntegralSolution& a, const IntegralSolution& b);

struct Preprocessed {
  Instance instance;
  // timestep_map[s' - 1] is the original timestep of new timestep s'.
  std::vector<int> timestep_map;
};

Preprocessed preprocess(const Instance& raw);
// Maps a solution of the preprocessed instance back onto the raw one.
IntegralSolution restore(const Preprocessed& pre, const IntegralSolution& sol);

// A restriction of an instance to a subset of timesteps and demands, with
// timesteps and demands renumbered densely.
struct SubInstance {
  Instance instance;
  std::vector<int> timesteps;  // new timestep s' -> original timesteps[s' - 1]
  std::vector<int> demands;    // new demand d' -> original demands[d']
};

// Builds a sub-instance on the given sorted timesteps and demands. A demand's
// new deadline is the last kept timestep not after its deadline; the caller
// must ensure one exists. Holding at kept timesteps is copied.
SubInstance restrict_instance(const Instance& instance, const std::vector<int>& timesteps,
                              const std::vector<int>& demands);

// Lifts a sub-instance solution to the parent; dispositions of demands outside
// the sub-instance stay unset.
IntegralSolution lift(const SubInstance& sub, const IntegralSolution& sol, int parent_demands);

}  // namespace jrp
