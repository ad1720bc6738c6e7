#include <random>

#include "doctest.h"
#include "jrp/exact.hpp"
#include "jrp/lpcore.hpp"
#include "support.hpp"

using namespace jrp;

namespace {

Instance single_item(int horizon, double k0, double k1) {
  Instance inst;
  inst.n_items = 1;
  inst.horizon = horizon;
  inst.k0 = k0;
  inst.k_item = {k1};
  inst.n_colors = 1;
  inst.rejection_limits = {0.0};
  return inst;
}

Demand demand(int deadline, std::vector<double> holding, double weight = 1.0) {
  Demand d;
  d.item = 0;
  d.deadline = deadline;
  d.holding = std::move(holding);
  d.weights = {weight};
  return d;
}

}  // namespace

TEST_CASE("brute force on the gap instance") {
  ExactResult res = brute_force_opt(testkit::gap_instance(3));
  CHECK(res.cost == 1.0);
  CHECK(res.solution.has_order(1, 0));
  CHECK(res.solution.order_count() == 1);
}

TEST_CASE("brute force with no demands") {
  Instance inst = single_item(3, 1.0, 1.0);
  ExactResult res = brute_force_opt(inst);
  CHECK(res.cost == 0.0);
  CHECK(res.solution.orders.empty());
}

TEST_CASE("brute force refuses oversized searches") {
  Instance inst = single_item(30, 1.0, 1.0);
  CHECK_THROWS_AS(brute_force_opt(inst), Error);
}

TEST_CASE("brute force reports infeasible limits") {
  Instance inst = single_item(2, 1.0, 0.0);
  inst.demands.push_back(demand(1, {kInfeasible}));
  inst.demands[0].holding = {kInfeasible};
  CHECK_THROWS_AS(brute_force_opt(inst), Error);
}

TEST_CASE("brute force matches the slower enumerator") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 60; ++k) {
    testkit::RandomOptions opt;
    opt.holding = k % 2 ? testkit::Holding::kGeneral : testkit::Holding::kDeadline;
    opt.penalties = k % 3 == 0;
    Instance inst = testkit::random_instance(rng, opt);
    double slow = testkit::enumerate_opt(inst);
    if (is_infeasible(slow)) {
      CHECK_THROWS_AS(brute_force_opt(inst), Error);
      continue;
    }
    ExactResult res = brute_force_opt(inst);
    CHECK(res.cost == slow);
    CHECK(check_feasible(inst, res.solution).ok());
  }
}

TEST_CASE("fractional weights fall back to subset enumeration") {
  Instance inst = testkit::gap_instance(4);
  for (auto& d : inst.demands) d.weights = {0.75};
  inst.rejection_limits = {1.5};
  ExactResult res = brute_force_opt(inst);
  CHECK(res.cost == testkit::enumerate_opt(inst));
  CHECK(res.cost == 1.0);
}

TEST_CASE("lot sizing with one zero-holding demand") {
  Instance inst = single_item(4, 2.0, 3.0);
  inst.demands.push_back(demand(3, {0.0, 0.0, 0.0}));
  ExactResult res = wagner_whitin(inst);
  CHECK(res.cost == 5.0);
}

TEST_CASE("lot sizing splits around prohibitive holding") {
  Instance inst = single_item(4, 2.0, 1.0);
  inst.demands.push_back(demand(1, {0.0}));
  inst.demands.push_back(demand(4, {100.0, 100.0, 50.0, 0.5}));
  ExactResult res = wagner_whitin(inst);
  CHECK(res.cost == 2 * 3.0 + 0.5);
  CHECK(res.cost == brute_force_opt(inst).cost);
  CHECK(res.solution.order_count() == 2);
}

TEST_CASE("lot sizing with an unservable demand") {
  Instance inst = single_item(2, 1.0, 1.0);
  inst.demands.push_back(demand(2, {kInfeasible, kInfeasible}));
  CHECK_THROWS_AS(wagner_whitin(inst), Error);
}

TEST_CASE("lot sizing equals brute force on random single-item instances") {
  std::mt19937_64 rng(77);
  testkit::RandomOptions opt;
  opt.max_items = 1;
  opt.max_colors = 1;
  opt.max_horizon = 8;
  opt.holding = testkit::Holding::kGeneral;
  opt.max_limit_fraction = 0.0;
  for (int k = 0; k < 100; ++k) {
    Instance inst = testkit::random_instance(rng, opt);
    inst.rejection_limits = {0.0};
    for (auto& d : inst.demands) d.weights = {1.0};
    ExactResult ww = wagner_whitin(inst);
    CHECK(ww.cost == brute_force_opt(inst).cost);
    CHECK(check_feasible(inst, ww.solution).ok());
  }
}

TEST_CASE("single-item rejection DP matches brute force") {
  std::mt19937_64 rng(99);
  testkit::RandomOptions opt;
  opt.max_items = 1;
  opt.max_colors = 1;
  opt.max_horizon = 9;
  opt.max_demands = 9;
  for (int k = 0; k < 80; ++k) {
    opt.holding = k % 2 ? testkit::Holding::kGeneral : testkit::Holding::kDeadline;
    opt.penalties = k % 4 == 1;
    Instance inst = testkit::random_instance(rng, opt);
    ExactResult dp = single_item_rejection_dp(inst);
    CHECK(dp.cost == brute_force_opt(inst).cost);
    CHECK(check_feasible(inst, dp.solution).ok());
  }
  CHECK(single_item_rejection_dp(testkit::gap_instance(100)).cost == 1.0);
}

TEST_CASE("side information from an optimum") {
  Instance inst;
  inst.n_items = 3;
  inst.horizon = 3;
  inst.k0 = 1.0;
  inst.k_item = {5.0, 2.0, 4.0};
  inst.n_colors = 1;
  inst.rejection_limits = {0.0};
  IntegralSolution opt = IntegralSolution::empty_for(inst);
  opt.add_order(1, 0);
  opt.add_order(3, 1);
  SideInformation side = derive_side_info(inst, opt, 5);
  CHECK(side.forced_item == std::set<ItemSlot>{{0, 1}, {1, 3}});
  CHECK(*side.k_max == 2.0);
  // Item 2 is dearer than the cheapest forced order and is not guessed.
  CHECK(side.forbidden_item.count({2, 2}) == 1);
  CHECK(side.forbidden_item.count({0, 2}) == 1);
  CHECK(side.forbidden_item.count({1, 2}) == 0);

  SideInformation one = derive_side_info(inst, opt, 1);
  CHECK(one.forced_item == std::set<ItemSlot>{{0, 1}});
  CHECK(*one.k_max == 5.0);

  CHECK(derive_side_info(inst, opt, 0).empty());
}

TEST_CASE("guessing on the gap instance closes the gap") {
  Instance inst = testkit::gap_instance(5);
  ExactResult res = brute_force_opt(inst);
  SideInformation side = derive_side_info(inst, res.solution, 1);
  CHECK(side.forced_item == std::set<ItemSlot>{{0, 1}});
  LpSolution lp = solve_extreme(build_lp(inst, side));
  CHECK(lp.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("derived side information keeps the LP below the optimum") {
  std::mt19937_64 rng(4);
  testkit::RandomOptions opt;
  opt.holding = testkit::Holding::kGeneral;
  opt.penalties = true;
  for (int k = 0; k < 40; ++k) {
    Instance inst = testkit::random_instance(rng, opt);
    ExactResult res = brute_force_opt(inst);
    for (int m : {1, 2, 4}) {
      SideInformation side = derive_side_info(inst, res.solution, m, k % 2 == 0);
      LpSolution lp = solve_extreme(build_lp(inst, side));
      CHECK(lp.objective <= res.cost + 1e-7);
    }
  }
}

TEST_CASE("set cover reduction") {
  std::vector<std::vector<int>> sets{{0}, {1}, {0, 1}};
  Instance inst = build_set_cover_instance(sets, 2);
  CHECK(inst.n_colors == 2);
  CHECK(inst.rejection_limits == std::vector<double>{1.0, 1.0});
  CHECK(brute_force_opt(inst).cost == 1.0);

  CHECK(brute_force_opt(build_set_cover_instance({{0, 1, 2}}, 3)).cost == 1.0);
  CHECK(brute_force_opt(build_set_cover_instance({{0}, {1}, {2}, {3}}, 4)).cost == 4.0);
  CHECK_THROWS_AS(build_set_cover_instance({{0}}, 2), Error);

  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    auto system = testkit::random_set_system(rng, 5, 4);
    CHECK(brute_force_opt(build_set_cover_instance(system, 4)).cost == testkit::min_set_cover(system, 4));
  }
}
