#include "jrp/model.hpp"

#include <algorithm>
#include <sstream>

namespace jrp {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kBadInput: return "BadInput";
    case Errc::kNonMonotoneHolding: return "NonMonotoneHolding";
    case Errc::kBadDeadline: return "BadDeadline";
    case Errc::kServedAtInfeasibleSlot: return "ServedAtInfeasibleSlot";
    case Errc::kDanglingReference: return "DanglingReference";
    case Errc::kOverlappingDemandSets: return "OverlappingDemandSets";
    case Errc::kInconsistentSideInfo: return "InconsistentSideInfo";
    case Errc::kInfeasible: return "Infeasible";
    case Errc::kUnbounded: return "Unbounded";
    case Errc::kDualityGapExceeded: return "DualityGapExceeded";
    case Errc::kSlacknessViolated: return "SlacknessViolated";
    case Errc::kTooLarge: return "TooLarge";
    case Errc::kInfeasibleDemand: return "InfeasibleDemand";
    case Errc::kRejectionRequired: return "RejectionRequired";
    case Errc::kNoFeasibleShift: return "NoFeasibleShift";
    case Errc::kNullSpaceNotFound: return "NullSpaceNotFound";
    case Errc::kLpInfeasibleAfterConstraints: return "LPInfeasibleAfterConstraints";
    case Errc::kInfeasibleInstance: return "InfeasibleInstance";
    case Errc::kBadProfile: return "BadProfile";
    case Errc::kInternal: return "Internal";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

int Demand::first_servable() const {
  for (int s = 1; s <= deadline; ++s) {
    if (!is_infeasible(holding[s - 1])) return s;
  }
  return 0;
}

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

std::string demand_label(int d) { return "demand " + std::to_string(d); }

}  // namespace

void Instance::validate() const {
  if (n_items < 0 || horizon < 0 || n_colors < 0) throw Error(Errc::kBadInput, "negative count");
  if (!finite_nonneg(k0)) throw Error(Errc::kBadInput, "k0 must be finite and nonnegative");
  if (static_cast<int>(k_item.size()) != n_items) {
    throw Error(Errc::kBadInput, "k_item has wrong length");
  }
  for (double k : k_item) {
    if (!finite_nonneg(k)) throw Error(Errc::kBadInput, "item cost must be finite and nonnegative");
  }
  if (static_cast<int>(rejection_limits.size()) != n_colors) {
    throw Error(Errc::kBadInput, "rejection_limits has wrong length");
  }
  for (double r : rejection_limits) {
    if (!finite_nonneg(r)) throw Error(Errc::kBadInput, "rejection limit must be finite and nonnegative");
  }
  for (int d = 0; d < n_demands(); ++d) {
    const Demand& dem = demands[d];
    if (dem.item < 0 || dem.item >= n_items) {
      throw Error(Errc::kBadInput, demand_label(d) + " has item out of range");
    }
    if (dem.deadline < 1 || dem.deadline > horizon) {
      throw Error(Errc::kBadDeadline, demand_label(d) + " has deadline out of range");
    }
    if (static_cast<int>(dem.holding.size()) != dem.deadline) {
      throw Error(Errc::kBadDeadline, demand_label(d) + " holding length differs from deadline");
    }
    if (static_cast<int>(dem.weights.size()) != n_colors) {
      throw Error(Errc::kBadInput, demand_label(d) + " has wrong number of weights");
    }
    for (double w : dem.weights) {
      if (!finite_nonneg(w)) throw Error(Errc::kBadInput, demand_label(d) + " has a bad weight");
    }
    if (!finite_nonneg(dem.penalty)) {
      throw Error(Errc::kBadInput, demand_label(d) + " has a bad penalty");
    }
    for (int s = 1; s <= dem.deadline; ++s) {
      double h = dem.holding[s - 1];
      if (std::isnan(h) || h < 0.0 || (std::isinf(h) && h < 0)) {
        throw Error(Errc::kBadInput, demand_label(d) + " has a bad holding cost");
      }
      if (s > 1 && h > dem.holding[s - 2]) {
        throw Error(Errc::kNonMonotoneHolding, demand_label(d) + " holding increases at " +
                                                   std::to_string(s));
      }
    }
  }
}

bool Instance::is_deadline_only() const {
  for (const Demand& d : demands) {
    for (double h : d.holding) {
      if (!is_infeasible(h) && h != 0.0) return false;
    }
  }
  return true;
}

bool Instance::has_penalties() const {
  return std::any_of(demands.begin(), demands.end(), [](const Demand& d) { return d.penalty > 0; });
}

double Instance::max_finite_holding() const {
  double m = 0.0;
  for (const Demand& d : demands) {
    for (double h : d.holding) {
      if (!is_infeasible(h)) m = std::max(m, h);
    }
  }
  return m;
}

double Instance::max_item_cost() const {
  double m = 0.0;
  for (double k : k_item) m = std::max(m, k);
  return m;
}

double Instance::total_weight(int c) const {
  double w = 0.0;
  for (const Demand& d : demands) w += d.weights[c];
  return w;
}

IntegralSolution IntegralSolution::empty_for(const Instance& instance) {
  IntegralSolution sol;
  sol.disposition.assign(instance.demands.size(), Disposition{});
  return sol;
}

bool IntegralSolution::has_order(int s, int item) const {
  auto it = orders.find(s);
  return it != orders.end() && it->second.count(item) > 0;
}

double FractionalSolution::get_y(int s) const {
  auto it = y.find(s);
  return it == y.end() ? 0.0 : it->second;
}

double FractionalSolution::get_y_item(int i, int s) const {
  auto it = y_item.find({i, s});
  return it == y_item.end() ? 0.0 : it->second;
}

double FractionalSolution::get_x(int d, int s) const {
  auto it = x.find({d, s});
  return it == x.end() ? 0.0 : it->second;
}

double FractionalSolution::served_extent(int d) const {
  double total = 0.0;
  for (auto it = x.lower_bound({d, 0}); it != x.end() && it->first.first == d; ++it) {
    total += it->second;
  }
  return total;
}

namespace {

template <class Map>
void prune_map(Map& m) {
  for (auto it = m.begin(); it != m.end();) {
    if (it->second == 0.0) {
      it = m.erase(it);
    } else {
      ++it;
    }
  }
}

double snap_value(double v, double tol) {
  if (std::abs(v) <= tol) return 0.0;
  if (std::abs(v - 1.0) <= tol) return 1.0;
  return v;
}

}  // namespace

void FractionalSolution::prune() {
  prune_map(y);
  prune_map(y_item);
  prune_map(x);
}

void snap(FractionalSolution& sol, double tol) {
  for (auto& [k, v] : sol.y) v = snap_value(v, tol);
  for (auto& [k, v] : sol.y_item) v = snap_value(v, tol);
  for (auto& [k, v] : sol.x) v = snap_value(v, tol);
  for (double& v : sol.r) v = snap_value(v, tol);
  sol.prune();
}

CostBreakdown evaluate(const Instance& instance, const IntegralSolution& sol) {
  if (static_cast<int>(sol.disposition.size()) != instance.n_demands()) {
    throw Error(Errc::kDanglingReference, "disposition size differs from demand count");
  }
  CostBreakdown cost;
  for (const auto& [s, items] : sol.orders) {
    if (s < 1 || s > instance.horizon) {
      throw Error(Errc::kDanglingReference, "order at timestep " + std::to_string(s));
    }
    cost.general += instance.k0;
    for (int i : items) {
      if (i < 0 || i >= instance.n_items) {
        throw Error(Errc::kDanglingReference, "order of unknown item " + std::to_string(i));
      }
      cost.item += instance.k_item[i];
    }
  }
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Disposition& disp = sol.disposition[d];
    const Demand& dem = instance.demands[d];
    if (disp.is_served()) {
      if (disp.slot < 1 || disp.slot > dem.deadline) {
        throw Error(Errc::kDanglingReference, demand_label(d) + " served outside its horizon");
      }
      double h = dem.holding_at(disp.slot);
      if (is_infeasible(h)) {
        throw Error(Errc::kServedAtInfeasibleSlot, demand_label(d) + " at " +
                                                       std::to_string(disp.slot));
      }
      cost.holding += h;
    } else if (disp.is_rejected()) {
      cost.penalty += dem.penalty;
    }
  }
  cost.total = cost.general + cost.item + cost.holding + cost.penalty;
  return cost;
}

CostBreakdown evaluate(const Instance& instance, const FractionalSolution& sol) {
  CostBreakdown cost;
  for (const auto& [s, v] : sol.y) {
    if (s < 1 || s > instance.horizon) {
      throw Error(Errc::kDanglingReference, "y at timestep " + std::to_string(s));
    }
    cost.general += v * instance.k0;
  }
  for (const auto& [key, v] : sol.y_item) {
    auto [i, s] = key;
    if (i < 0 || i >= instance.n_items || s < 1 || s > instance.horizon) {
      throw Error(Errc::kDanglingReference, "item variable out of range");
    }
    cost.item += v * instance.k_item[i];
  }
  for (const auto& [key, v] : sol.x) {
    auto [d, s] = key;
    if (d < 0 || d >= instance.n_demands()) {
      throw Error(Errc::kDanglingReference, "service variable of unknown demand");
    }
    const Demand& dem = instance.demands[d];
    if (s < 1 || s > dem.deadline) {
      throw Error(Errc::kDanglingReference, demand_label(d) + " service outside its horizon");
    }
    if (v == 0.0) continue;
    double h = dem.holding_at(s);
    if (is_infeasible(h)) {
      if (v > kTol) {
        throw Error(Errc::kServedAtInfeasibleSlot, demand_label(d) + " at " + std::to_string(s));
      }
      continue;
    }
    cost.holding += v * h;
  }
  if (!sol.r.empty()) {
    if (static_cast<int>(sol.r.size()) != instance.n_demands()) {
      throw Error(Errc::kDanglingReference, "rejection vector size differs from demand count");
    }
    for (int d = 0; d < instance.n_demands(); ++d) {
      cost.penalty += sol.r[d] * instance.demands[d].penalty;
    }
  }
  cost.total = cost.general + cost.item + cost.holding + cost.penalty;
  return cost;
}

std::string Violation::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::kUnassigned: out << "Unassigned"; break;
    case Kind::kServiceWithoutItemOrder: out << "ServiceWithoutItemOrder"; break;
    case Kind::kItemOrderWithoutGeneralOrder: out << "ItemOrderWithoutGeneralOrder"; break;
    case Kind::kServiceExceedsItemOrder: out << "ServiceExceedsItemOrder"; break;
    case Kind::kRejectionLimit: out << "RejectionLimit"; break;
    case Kind::kLateService: out << "LateService"; break;
    case Kind::kInfeasibleSlot: out << "InfeasibleSlot"; break;
    case Kind::kUncovered: out << "Uncovered"; break;
    case Kind::kOutOfBounds: out << "OutOfBounds"; break;
    case Kind::kBadTimestep: out << "BadTimestep"; break;
    case Kind::kDanglingReference: out << "DanglingReference"; break;
  }
  out << "(";
  bool first = true;
  auto field = [&](const char* name, int v) {
    if (v < 0) return;
    out << (first ? "" : ", ") << name << "=" << v;
    first = false;
  };
  field("demand", demand);
  field("item", item);
  field("t", timestep);
  field("c", color);
  if (amount != 0.0) out << (first ? "" : ", ") << "amount=" << amount;
  out << ")";
  return out.str();
}

bool FeasibilityReport::has(Violation::Kind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string FeasibilityReport::describe() const {
  if (ok()) return "ok";
  std::string out;
  for (const Violation& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.describe();
  }
  return out;
}

std::vector<double> rejected_weight(const Instance& instance, const IntegralSolution& sol) {
  std::vector<double> w(instance.n_colors, 0.0);
  for (int d = 0; d < instance.n_demands() && d < static_cast<int>(sol.disposition.size()); ++d) {
    if (!sol.disposition[d].is_rejected()) continue;
    for (int c = 0; c < instance.n_colors; ++c) w[c] += instance.demands[d].weights[c];
  }
  return w;
}

std::vector<double> rejected_weight(const Instance& instance, const FractionalSolution& sol) {
  std::vector<double> w(instance.n_colors, 0.0);
  for (int d = 0; d < instance.n_demands() && d < static_cast<int>(sol.r.size()); ++d) {
    for (int c = 0; c < instance.n_colors; ++c) w[c] += sol.r[d] * instance.demands[d].weights[c];
  }
  return w;
}

FeasibilityReport check_feasible(const Instance& instance, const IntegralSolution& sol) {
  using K = Violation::Kind;
  FeasibilityReport report;
  auto add = [&](Violation v) { report.violations.push_back(v); };
  for (const auto& [s, items] : sol.orders) {
    if (s < 1 || s > instance.horizon) add({K::kBadTimestep, -1, -1, s});
    for (int i : items) {
      if (i < 0 || i >= instance.n_items) add({K::kDanglingReference, -1, i, s});
    }
  }
  if (static_cast<int>(sol.disposition.size()) != instance.n_demands()) {
    add({K::kDanglingReference, static_cast<int>(sol.disposition.size())});
    return report;
  }
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Disposition& disp = sol.disposition[d];
    const Demand& dem = instance.demands[d];
    if (!disp.is_set()) {
      add({K::kUnassigned, d, dem.item});
      continue;
    }
    if (!disp.is_served()) continue;
    if (disp.slot < 1) {
      add({K::kBadTimestep, d, dem.item, disp.slot});
      continue;
    }
    if (disp.slot > dem.deadline) {
      add({K::kLateService, d, dem.item, disp.slot});
      continue;
    }
    if (is_infeasible(dem.holding_at(disp.slot))) add({K::kInfeasibleSlot, d, dem.item, disp.slot});
    if (!sol.has_order(disp.slot, dem.item)) {
      add({K::kServiceWithoutItemOrder, d, dem.item, disp.slot});
    }
  }
  std::vector<double> rw = rejected_weight(instance, sol);
  for (int c = 0; c < instance.n_colors; ++c) {
    double excess = rw[c] - instance.rejection_limits[c];
    if (excess > kTol * (1.0 + instance.rejection_limits[c])) {
      add({K::kRejectionLimit, -1, -1, -1, c, excess});
    }
  }
  return report;
}

FeasibilityReport check_feasible(const Instance& instance, const FractionalSolution& sol,
                                 double tol) {
  using K = Violation::Kind;
  FeasibilityReport report;
  auto add = [&](Violation v) { report.violations.push_back(v); };
  auto in_unit = [tol](double v) { return v >= -tol && v <= 1.0 + tol; };
  for (const auto& [s, v] : sol.y) {
    if (s < 1 || s > instance.horizon) add({K::kBadTimestep, -1, -1, s});
    if (!in_unit(v)) add({K::kOutOfBounds, -1, -1, s, -1, v});
  }
  for (const auto& [key, v] : sol.y_item) {
    auto [i, s] = key;
    if (i < 0 || i >= instance.n_items || s < 1 || s > instance.horizon) {
      add({K::kDanglingReference, -1, i, s});
      continue;
    }
    if (!in_unit(v)) add({K::kOutOfBounds, -1, i, s, -1, v});
    if (v > sol.get_y(s) + tol) add({K::kItemOrderWithoutGeneralOrder, -1, i, s, -1, v - sol.get_y(s)});
  }
  for (const auto& [key, v] : sol.x) {
    auto [d, s] = key;
    if (d < 0 || d >= instance.n_demands()) {
      add({K::kDanglingReference, d, -1, s});
      continue;
    }
    const Demand& dem = instance.demands[d];
    if (s < 1) {
      add({K::kBadTimestep, d, dem.item, s});
      continue;
    }
    if (!in_unit(v)) add({K::kOutOfBounds, d, dem.item, s, -1, v});
    if (v <= tol) continue;
    if (s > dem.deadline) {
      add({K::kLateService, d, dem.item, s, -1, v});
      continue;
    }
    if (is_infeasible(dem.holding_at(s))) add({K::kInfeasibleSlot, d, dem.item, s, -1, v});
    double yi = sol.get_y_item(dem.item, s);
    if (v > yi + tol) add({K::kServiceExceedsItemOrder, d, dem.item, s, -1, v - yi});
  }
  if (static_cast<int>(sol.r.size()) != instance.n_demands()) {
    add({K::kDanglingReference, static_cast<int>(sol.r.size())});
    return report;
  }
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Demand& dem = instance.demands[d];
    if (!in_unit(sol.r[d])) add({K::kOutOfBounds, d, dem.item, -1, -1, sol.r[d]});
    double cover = sol.r[d] + sol.served_extent(d);
    if (cover < 1.0 - tol) add({K::kUncovered, d, dem.item, -1, -1, 1.0 - cover});
  }
  std::vector<double> rw = rejected_weight(instance, sol);
  for (int c = 0; c < instance.n_colors; ++c) {
    double excess = rw[c] - instance.rejection_limits[c];
    if (excess > tol * (1.0 + instance.rejection_limits[c])) {
      add({K::kRejectionLimit, -1, -1, -1, c, excess});
    }
  }
  return report;
}

IntegralSolution merge(const IntegralSolution& a, const IntegralSolution& b) {
  if (a.disposition.size() != b.disposition.size()) {
    throw Error(Errc::kDanglingReference, "merged solutions disagree on demand count");
  }
  IntegralSolution out = a;
  for (const auto& [s, items] : b.orders) out.orders[s].insert(items.begin(), items.end());
  for (size_t d = 0; d < b.disposition.size(); ++d) {
    if (!b.disposition[d].is_set()) continue;
    if (out.disposition[d].is_set()) {
      throw Error(Errc::kOverlappingDemandSets, demand_label(static_cast<int>(d)));
    }
    out.disposition[d] = b.disposition[d];
  }
  return out;
}

Preprocessed preprocess(const Instance& raw) {
  raw.validate();
  // Demands per (deadline, item), in input order.
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (int d = 0; d < raw.n_demands(); ++d) {
    groups[{raw.demands[d].deadline, raw.demands[d].item}].push_back(d);
  }
  // Copies of each original timestep: the largest collision count there.
  std::vector<int> copies(raw.horizon + 1, 1);
  for (const auto& [key, ds] : groups) {
    copies[key.first] = std::max(copies[key.first], static_cast<int>(ds.size()));
  }
  Preprocessed pre;
  std::vector<int> first_copy(raw.horizon + 2, 0);
  for (int t = 1; t <= raw.horizon; ++t) {
    first_copy[t] = static_cast<int>(pre.timestep_map.size()) + 1;
    for (int k = 0; k < copies[t]; ++k) pre.timestep_map.push_back(t);
  }
  if (static_cast<int>(pre.timestep_map.size()) == raw.horizon) {
    for (int t = 1; t <= raw.horizon; ++t) pre.timestep_map[t - 1] = t;
    pre.instance = raw;
    return pre;
  }
  Instance& inst = pre.instance;
  inst = raw;
  inst.horizon = static_cast<int>(pre.timestep_map.size());
  std::vector<int> new_deadline(raw.n_demands(), 0);
  for (const auto& [key, ds] : groups) {
    int t = key.first;
    int m = static_cast<int>(ds.size());
    // The first m-1 colliding demands take the leading copies; the last one
    // keeps the final copy, which is shared by every other item.
    for (int j = 0; j + 1 < m; ++j) new_deadline[ds[j]] = first_copy[t] + j;
    new_deadline[ds[m - 1]] = first_copy[t] + copies[t] - 1;
  }
  for (int d = 0; d < raw.n_demands(); ++d) {
    Demand& dem = inst.demands[d];
    const Demand& old = raw.demands[d];
    dem.deadline = new_deadline[d];
    dem.holding.resize(dem.deadline);
    for (int s = 1; s <= dem.deadline; ++s) {
      dem.holding[s - 1] = old.holding_at(pre.timestep_map[s - 1]);
    }
  }
  return pre;
}

IntegralSolution restore(const Preprocessed& pre, const IntegralSolution& sol) {
  IntegralSolution out;
  for (const auto& [s, items] : sol.orders) {
    out.orders[pre.timestep_map[s - 1]].insert(items.begin(), items.end());
  }
  out.disposition = sol.disposition;
  for (Disposition& d : out.disposition) {
    if (d.is_served()) d.slot = pre.timestep_map[d.slot - 1];
  }
  return out;
}

SubInstance restrict_instance(const Instance& instance, const std::vector<int>& timesteps,
                              const std::vector<int>& demands) {
  SubInstance sub;
  sub.timesteps = timesteps;
  sub.demands = demands;
  Instance& inst = sub.instance;
  inst.n_items = instance.n_items;
  inst.horizon = static_cast<int>(timesteps.size());
  inst.k0 = instance.k0;
  inst.k_item = instance.k_item;
  inst.n_colors = instance.n_colors;
  inst.rejection_limits = instance.rejection_limits;
  for (int d : demands) {
    const Demand& old = instance.demands[d];
    auto it = std::upper_bound(timesteps.begin(), timesteps.end(), old.deadline);
    int deadline = static_cast<int>(it - timesteps.begin());
    if (deadline == 0) {
      throw Error(Errc::kBadInput, demand_label(d) + " has no kept timestep before its deadline");
    }
    Demand dem = old;
    dem.deadline = deadline;
    dem.holding.resize(deadline);
    for (int s = 1; s <= deadline; ++s) dem.holding[s - 1] = old.holding_at(timesteps[s - 1]);
    inst.demands.push_back(std::move(dem));
  }
  return sub;
}

IntegralSolution lift(const SubInstance& sub, const IntegralSolution& sol, int parent_demands) {
  IntegralSolution out;
  out.disposition.assign(parent_demands, Disposition{});
  for (const auto& [s, items] : sol.orders) {
    out.orders[sub.timesteps[s - 1]].insert(items.begin(), items.end());
  }
  for (size_t d = 0; d < sub.demands.size(); ++d) {
    Disposition disp = sol.disposition[d];
    if (disp.is_served()) disp.slot = sub.timesteps[disp.slot - 1];
    out.disposition[sub.demands[d]] = disp;
  }
  return out;
}

}  // namespace jrp
