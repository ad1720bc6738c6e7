#pragma once

#include <utility>
#include <vector>

#include "jrp/model.hpp"

namespace jrp {

// Deadline instance without rejections: general orders where Z_t first reaches
// each integer, tentative item orders where Z^i_t does, each realized at the
// previous and the next general order. lpsol comes from the deadline form of
// the LP. Throws kRejectionRequired if lpsol rejects part of a demand.
IntegralSolution simple_two_approx(const Instance& instance, const FractionalSolution& lpsol);

struct ShiftOutcome {
  double lambda = 0.0;
  // Length of the interval of shifts that produce this outcome.
  double probability = 0.0;
  IntegralSolution solution;
  std::vector<double> rejected;  // weight per color
  double cost = 0.0;
  bool feasible = false;
};

// Every distinct outcome of the random shift: for λ in (0, 1), an order at
// the first timestep where Z_t = Σ_{s≤t} y^1_s exceeds k + λ, k = 0, 1, ...
// Demands without an order in their finite-holding window are rejected.
std::vector<ShiftOutcome> enumerate_shifts(const Instance& instance, const FractionalSolution& lpsol);

// Cheapest shift outcome within the rejection limits. Single item only.
// Throws kNoFeasibleShift.
IntegralSolution random_shift_round(const Instance& instance, const FractionalSolution& lpsol);

struct DeadlineReduction {
  Instance instance;
  // I(d) = [first, last]; {0, 0} for a demand with no service mass.
  std::vector<std::pair<int, int>> intervals;
};

// Holding becomes 0 from the earliest x-supported slot of each demand to its
// deadline and infeasible before it.
DeadlineReduction reduce_to_deadlines(const Instance& instance, const FractionalSolution& lpsol);

}  // namespace jrp
