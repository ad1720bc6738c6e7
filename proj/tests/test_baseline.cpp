#include <random>

#include "doctest.h"
#include "jrp/baseline.hpp"
#include "jrp/exact.hpp"
#include "jrp/lpcore.hpp"
#include "support.hpp"

using namespace jrp;

namespace {

Instance window_instance(const std::vector<std::pair<int, int>>& windows, int horizon, double limit) {
  Instance inst;
  inst.n_items = 1;
  inst.horizon = horizon;
  inst.k0 = 1.0;
  inst.k_item = {1.0};
  inst.n_colors = 1;
  inst.rejection_limits = {limit};
  for (auto [a, t] : windows) {
    Demand d;
    d.item = 0;
    d.deadline = t;
    d.holding.assign(t, kInfeasible);
    for (int s = a; s <= t; ++s) d.holding[s - 1] = 0.0;
    d.weights = {1.0};
    inst.demands.push_back(d);
  }
  return inst;
}

FractionalSolution uniform_y(int horizon, double v) {
  FractionalSolution sol;
  for (int s = 1; s <= horizon; ++s) {
    sol.y[s] = v;
    sol.y_item[{0, s}] = v;
  }
  return sol;
}

LpSolution deadline_lp(const Instance& inst) {
  return solve_extreme(build_lp(inst, {}, {false, 1.0, LpForm::kDeadline}));
}

}  // namespace

TEST_CASE("two-approx on a single covered demand matches the LP") {
  Instance inst = window_instance({{1, 3}}, 3, 0.0);
  LpSolution lp = deadline_lp(inst);
  IntegralSolution sol = simple_two_approx(inst, lp.sol);
  CHECK(check_feasible(inst, sol).ok());
  CHECK(evaluate(inst, sol).total == doctest::Approx(lp.objective));
}

TEST_CASE("two-approx on the gap topology without rejections") {
  Instance inst = testkit::gap_instance(4);
  inst.rejection_limits = {0.0};
  LpSolution lp = deadline_lp(inst);
  IntegralSolution sol = simple_two_approx(inst, lp.sol);
  CHECK(sol.order_count() == 1);
  CHECK(evaluate(inst, sol).total == 1.0);
}

TEST_CASE("two-approx refuses rejecting solutions") {
  Instance inst = testkit::gap_instance(4);
  LpSolution lp = deadline_lp(inst);
  CHECK_THROWS_AS(simple_two_approx(inst, lp.sol), Error);
}

TEST_CASE("two-approx cost bound on random deadline instances") {
  std::mt19937_64 rng(41);
  testkit::RandomOptions opt;
  opt.max_horizon = 10;
  opt.max_demands = 12;
  for (int k = 0; k < 100; ++k) {
    Instance inst = testkit::random_instance(rng, opt);
    for (double& r : inst.rejection_limits) r = 0.0;
    for (auto& d : inst.demands) d.weights[0] = 1.0;
    LpSolution lp = deadline_lp(inst);
    CostBreakdown lpc = evaluate(inst, lp.sol);
    IntegralSolution sol = simple_two_approx(inst, lp.sol);
    CHECK(check_feasible(inst, sol).ok());
    CHECK(evaluate(inst, sol).total <= lpc.general + 2 * lpc.item + 1e-9);
  }
}

TEST_CASE("random shift with one and a half orders") {
  Instance inst = window_instance({{1, 1}, {2, 2}, {3, 3}}, 3, 1.5);
  FractionalSolution lp = uniform_y(3, 0.5);
  lp.r = {0.5, 0.5, 0.5};
  IntegralSolution sol = random_shift_round(inst, lp);
  CHECK(sol.order_count() == 2);
  CHECK(check_feasible(inst, sol).ok());
  CHECK(evaluate(inst, sol).total == 4.0);
}

TEST_CASE("random shift with an integral total") {
  Instance inst = window_instance({{1, 1}, {2, 2}, {3, 3}, {4, 4}}, 4, 2.0);
  FractionalSolution lp = uniform_y(4, 0.5);
  IntegralSolution sol = random_shift_round(inst, lp);
  CHECK(sol.order_count() == 2);
  for (const ShiftOutcome& o : enumerate_shifts(inst, lp)) CHECK(o.solution.order_count() == 2);
}

TEST_CASE("random shift reports an impossible limit") {
  Instance inst = window_instance({{1, 1}, {2, 2}, {3, 3}}, 3, 0.0);
  CHECK_THROWS_AS(random_shift_round(inst, uniform_y(3, 0.5)), Error);
}

TEST_CASE("average shift rejections stay below the LP rejections") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 40; ++k) {
    const int T = 6;
    std::vector<std::pair<int, int>> windows;
    for (int t = 1; t <= T; ++t) {
      int a = std::uniform_int_distribution<int>(1, t)(rng);
      windows.push_back({a, t});
    }
    double limit = std::uniform_int_distribution<int>(0, 4)(rng);
    Instance inst = window_instance(windows, T, limit);
    LpSolution lp = deadline_lp(inst);
    double q = 0.0;
    for (int s = 1; s <= T; ++s) q += lp.sol.get_y_item(0, s);
    double mean = 0.0, total_p = 0.0, lp_rej = 0.0;
    for (double r : lp.sol.r) lp_rej += r;
    for (const ShiftOutcome& o : enumerate_shifts(inst, lp.sol)) {
      mean += o.probability * o.rejected[0];
      total_p += o.probability;
      int n = o.solution.order_count();
      CHECK((n == static_cast<int>(std::floor(q + 1e-9)) || n == static_cast<int>(std::ceil(q - 1e-9))));
    }
    CHECK(total_p == doctest::Approx(1.0));
    CHECK(mean <= lp_rej + 1e-9);
    IntegralSolution sol = random_shift_round(inst, lp.sol);
    CHECK(check_feasible(inst, sol).ok());
    CHECK(sol.order_count() <= static_cast<int>(std::ceil(q - 1e-9)));
  }
}

TEST_CASE("deadline reduction intervals") {
  Instance inst;
  inst.n_items = 1;
  inst.horizon = 7;
  inst.k0 = 1.0;
  inst.k_item = {1.0};
  inst.n_colors = 1;
  inst.rejection_limits = {0.0};
  Demand d;
  d.item = 0;
  d.deadline = 7;
  d.holding = {6, 5, 4, 3, 2, 1, 0};
  d.weights = {1.0};
  inst.demands = {d};
  FractionalSolution lp;
  lp.x[{0, 2}] = 0.5;
  lp.x[{0, 5}] = 0.5;
  lp.r = {0.0};
  DeadlineReduction red = reduce_to_deadlines(inst, lp);
  CHECK(red.intervals[0] == std::make_pair(2, 7));
  CHECK(red.instance.demands[0].holding_at(1) == kInfeasible);
  CHECK(red.instance.demands[0].holding_at(2) == 0.0);
  CHECK(red.instance.is_deadline_only());
}

TEST_CASE("deadline reduction keeps the LP solution feasible and bounds holding") {
  std::mt19937_64 rng(52);
  testkit::RandomOptions opt;
  opt.holding = testkit::Holding::kGeneral;
  opt.max_colors = 1;
  for (int k = 0; k < 40; ++k) {
    Instance inst = testkit::random_instance(rng, opt);
    LPModel model = build_lp(inst);
    LpSolution lp = solve_extreme(model);
    DeadlineReduction red = reduce_to_deadlines(inst, lp.sol);
    CHECK(check_feasible(red.instance, lp.sol, 1e-8).ok());
    for (const auto& [key, v] : lp.sol.x) {
      if (v <= kTol) continue;
      CHECK(key.second >= red.intervals[key.first].first);
      CHECK(key.second <= red.intervals[key.first].second);
    }
    // Serving every kept demand anywhere inside its interval costs at most
    // the dual bound.
    DualCheck dual = solve_dual_and_verify(model, lp);
    std::vector<int> served;
    double realized = 0.0;
    for (int d = 0; d < inst.n_demands(); ++d) {
      if (red.intervals[d].first == 0) continue;
      served.push_back(d);
      realized += inst.demands[d].holding_at(red.intervals[d].first);
    }
    CHECK(realized <= holding_cost_bound(model, lp.sol, dual.dual, served) + 1e-8);
  }
}
