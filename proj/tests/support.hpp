#pragma once

#include <random>
#include <vector>

#include "jrp/model.hpp"

namespace testkit {

using jrp::Instance;
using jrp::IntegralSolution;

// One item, K_0 = 1, K_1 = 0, one zero-holding demand per timestep, R = T − 1.
Instance gap_instance(int horizon);

enum class Holding { kDeadline, kGeneral };

struct RandomOptions {
  int max_items = 3;
  int min_horizon = 2;
  int max_horizon = 6;
  int max_demands = 8;
  int max_colors = 2;
  Holding holding = Holding::kDeadline;
  bool penalties = false;
  // Probability that a demand gets a color weight in a given color.
  double weight_density = 0.7;
  // Fraction of the color's total weight allowed to be rejected.
  double max_limit_fraction = 0.6;
  // Demands with a given (item, deadline) pair stay unique.
  bool unique_pairs = true;
};

// Costs are small integers or multiples of 1/4; weights are integers.
Instance random_instance(std::mt19937_64& rng, const RandomOptions& opt);

// Independent recomputation of an integral solution's total cost.
double naive_cost(const Instance& inst, const IntegralSolution& sol);

// Optimum by enumerating every order schedule and every rejection subset,
// serving each kept demand at its cheapest supported slot. Returns +inf if
// infeasible.
double enumerate_opt(const Instance& inst);

// Minimum number of sets covering all elements, by enumeration.
int min_set_cover(const std::vector<std::vector<int>>& sets, int n_elements);

// Random subsets of {0..n_elements-1} whose union covers every element.
std::vector<std::vector<int>> random_set_system(std::mt19937_64& rng, int n_sets, int n_elements);

struct PipageInput {
  Instance instance;
  jrp::FractionalSolution seed;
  std::vector<std::pair<int, int>> batches;
};

// A fractional solution with batch structure: every batch carries at most one
// order in total and service stays inside the deadline batch. Limits equal
// the seed's rejected weight.
PipageInput random_pipage_input(std::mt19937_64& rng, int max_colors, bool deadline_only, bool penalties);

struct RoundInput {
  Instance instance;
  jrp::FractionalSolution seed;
};

// An instance with K_0 = 0 and its LP optimum as the seed.
RoundInput random_round_input(std::mt19937_64& rng, Holding holding, int max_colors, bool penalties,
                              int max_horizon, int max_demands, int max_items);

// Sliding windows of one item that must stay served, one head demand per
// color at the first timesteps, and a served demand at the horizon. The LP
// optimum spreads the item over a long fractional run; even horizons keep it
// fractional.
RoundInput chain_input(std::mt19937_64& rng, int horizon, int window, int colors, bool general_holding,
                       bool penalties = false);

}  // namespace testkit
