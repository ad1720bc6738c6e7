#include "jrp/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace jrp {

namespace {

// Earliest timesteps where the running sum of values first reaches each
// integer k = 1, 2, ... (within kTol).
std::vector<int> threshold_steps(const std::vector<double>& values) {
  std::vector<int> out;
  double z = 0.0;
  int k = 1;
  for (size_t s = 0; s < values.size(); ++s) {
    z += values[s];
    while (z >= k - kTol) {
      out.push_back(static_cast<int>(s) + 1);
      ++k;
    }
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Serves every demand at its last ordered slot with finite holding; demands
// with none are rejected.
void assign_latest(const Instance& inst, IntegralSolution& sol) {
  for (int d = 0; d < inst.n_demands(); ++d) {
    const Demand& dem = inst.demands[d];
    sol.disposition[d] = Disposition::rejected();
    for (int s = dem.deadline; s >= 1; --s) {
      if (dem.servable_at(s) && sol.has_order(s, dem.item)) {
        sol.disposition[d] = Disposition::served(s);
        break;
      }
    }
  }
}

}  // namespace

IntegralSolution simple_two_approx(const Instance& instance, const FractionalSolution& lpsol) {
  const int T = instance.horizon;
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Demand& dem = instance.demands[d];
    double mass = 0.0;
    for (int s = 1; s <= dem.deadline; ++s) {
      if (dem.servable_at(s)) mass += lpsol.get_y_item(dem.item, s);
    }
    if (mass < 1.0 - kTol) {
      throw Error(Errc::kRejectionRequired, "demand " + std::to_string(d) + " is not fully covered");
    }
  }
  std::vector<double> y(T);
  for (int s = 1; s <= T; ++s) y[s - 1] = lpsol.get_y(s);
  std::vector<int> general = threshold_steps(y);
  IntegralSolution sol = IntegralSolution::empty_for(instance);
  if (general.empty()) {
    assign_latest(instance, sol);
    return sol;
  }
  for (int i = 0; i < instance.n_items; ++i) {
    std::vector<double> yi(T);
    for (int s = 1; s <= T; ++s) yi[s - 1] = lpsol.get_y_item(i, s);
    for (int t : threshold_steps(yi)) {
      auto next = std::lower_bound(general.begin(), general.end(), t);
      auto prev = std::upper_bound(general.begin(), general.end(), t);
      // Past the last general order use the last; before the first, the first.
      int after = next == general.end() ? general.back() : *next;
      int before = prev == general.begin() ? general.front() : *(prev - 1);
      sol.add_order(before, i);
      sol.add_order(after, i);
    }
  }
  assign_latest(instance, sol);
  return sol;
}

std::vector<ShiftOutcome> enumerate_shifts(const Instance& instance, const FractionalSolution& lpsol) {
  if (instance.n_items != 1) throw Error(Errc::kBadInput, "random shift needs a single item");
  const int T = instance.horizon;
  std::vector<double> z(T + 1, 0.0);
  for (int s = 1; s <= T; ++s) z[s] = z[s - 1] + lpsol.get_y_item(0, s);
  std::vector<double> cuts{0.0, 1.0};
  for (int s = 1; s <= T; ++s) {
    double f = z[s] - std::floor(z[s]);
    if (f > kTol && f < 1.0 - kTol) cuts.push_back(f);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) <= kTol; }),
             cuts.end());
  std::vector<ShiftOutcome> out;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    ShiftOutcome o;
    o.lambda = 0.5 * (cuts[k] + cuts[k + 1]);
    o.probability = cuts[k + 1] - cuts[k];
    o.solution = IntegralSolution::empty_for(instance);
    int s = 1;
    for (int level = 0; level + o.lambda < z[T]; ++level) {
      while (s <= T && z[s] <= level + o.lambda) ++s;
      if (s > T) break;
      o.solution.add_order(s, 0);
    }
    assign_latest(instance, o.solution);
    o.rejected = rejected_weight(instance, o.solution);
    o.feasible = true;
    for (int c = 0; c < instance.n_colors; ++c) {
      if (o.rejected[c] > instance.rejection_limits[c] + kTol * (1.0 + instance.rejection_limits[c])) {
        o.feasible = false;
      }
    }
    o.cost = evaluate(instance, o.solution).total;
    out.push_back(std::move(o));
  }
  return out;
}

IntegralSolution random_shift_round(const Instance& instance, const FractionalSolution& lpsol) {
  const ShiftOutcome* best = nullptr;
  std::vector<ShiftOutcome> all = enumerate_shifts(instance, lpsol);
  for (const ShiftOutcome& o : all) {
    if (o.feasible && (!best || o.cost < best->cost)) best = &o;
  }
  if (!best) throw Error(Errc::kNoFeasibleShift, "no shift meets the rejection limits");
  return best->solution;
}

DeadlineReduction reduce_to_deadlines(const Instance& instance, const FractionalSolution& lpsol) {
  DeadlineReduction out;
  out.instance = instance;
  out.intervals.assign(instance.n_demands(), {0, 0});
  for (int d = 0; d < instance.n_demands(); ++d) {
    Demand& dem = out.instance.demands[d];
    int first = 0;
    for (int s = 1; s <= dem.deadline && first == 0; ++s) {
      if (lpsol.get_x(d, s) > kTol) first = s;
    }
    for (int s = 1; s <= dem.deadline; ++s) {
      dem.holding[s - 1] = first != 0 && s >= first ? 0.0 : kInfeasible;
    }
    if (first != 0) out.intervals[d] = {first, dem.deadline};
  }
  return out;
}

}  // namespace jrp
