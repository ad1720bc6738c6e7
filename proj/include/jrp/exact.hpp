#pragma once

#include <vector>

#include "jrp/lpcore.hpp"
#include "jrp/model.hpp"

namespace jrp {

struct ExactResult {
  IntegralSolution solution;
  double cost = 0.0;
};

// Largest number of order schedules brute force will enumerate.
inline constexpr double kBruteForceCap = 16777216.0;  // 2^24

// Exhaustive optimum over all order schedules; the rejection set of each
// schedule is chosen optimally. Throws kTooLarge or kInfeasibleInstance.
ExactResult brute_force_opt(const Instance& instance);

// Single-item lot sizing with every demand served. Throws kInfeasibleDemand.
ExactResult wagner_whitin(const Instance& instance);

// Exact optimum for one item and one color with integer weights, by dynamic
// programming over (last order, rejected weight). Throws kBadInput when the
// instance is outside that class and kInfeasibleInstance if no solution exists.
ExactResult single_item_rejection_dp(const Instance& instance);

// Side information matching the "correct guess" for opt: its m most expensive
// item orders and m most expensive realized holding costs. With
// include_schedule, the general orders of opt are forced open and all other
// timesteps closed.
SideInformation derive_side_info(const Instance& instance, const IntegralSolution& opt, int m,
                                 bool include_schedule = false);

// One item, K_0 = 1, K_1 = 0; timestep t holds one demand of color c for each
// element c of sets[t - 1], servable only at t; R_c = (#demands of color c) − 1.
// Elements are 0-based and every element must lie in some set.
Instance build_set_cover_instance(const std::vector<std::vector<int>>& sets, int n_elements);

}  // namespace jrp
