#pragma once

#include <map>
#include <utility>
#include <vector>

#include "jrp/model.hpp"

namespace jrp {

struct IgoPlan {
  int horizon = 0;
  std::vector<int> igos;  // sorted
  double increment = 1.0;
  std::vector<double> z;  // z[t] = Σ_{s≤t} y_s, z[0] = 0
  // Maximal runs [first, last] of timesteps without an IGO.
  std::vector<std::pair<int, int>> batches;

  bool is_igo(int t) const;
  // Index into batches of the run containing t, or -1 for an IGO.
  int batch_of(int t) const;
  // Last IGO not after t, or 0.
  int last_igo_upto(int t) const;
  // Last IGO strictly before t, or 0.
  int prev_igo(int t) const;
  // First IGO strictly after t, or horizon + 1.
  int next_igo(int t) const;
};

// IGOs at the first timestep with y_t > 0, the first timesteps where Z_t
// reaches k·increment (k = 1..⌊Z_T/increment⌋) and the first where it reaches
// Z_T. An all-zero y gives an empty plan.
IgoPlan place_igos(const std::map<int, double>& y, int horizon, double increment = 1.0);

// [first finite-holding slot, deadline] per demand, {0, 0} if none.
std::vector<std::pair<int, int>> zero_windows(const Instance& instance);

// Instance-1 seed in original numbering: item orders moved to the previous
// and next IGO, service mass moved to the next IGO (the last partial batch
// moves back to the last IGO before the deadline).
FractionalSolution shift_to_igos(const Instance& instance, const FractionalSolution& lpsol,
                                 const IgoPlan& plan);

struct SplitPart {
  SubInstance sub;
  FractionalSolution seed;  // in sub-instance numbering
};

struct SplitResult {
  // D1: the interval of the demand contains an IGO.
  std::vector<int> d1;
  // D2: the rest. Those with no servable slot outside the IGOs are rejected
  // directly and kept out of Instance 2.
  std::vector<int> d2;
  std::vector<int> rejected_outright;
  SplitPart inst1;  // IGO timesteps, k0 = 0, all general orders open
  SplitPart inst2;  // non-IGO timesteps
  // Batches of Instance 2 in its own timestep numbering.
  std::vector<std::pair<int, int>> inst2_batches;
};

// intervals[d] is I(d): the zero-holding window for deadline instances or the
// reduced interval from reduce_to_deadlines. Limits of each part are the LP's
// weighted rejections within it.
SplitResult split_instances(const Instance& instance, const FractionalSolution& lpsol,
                            const IgoPlan& plan, const std::vector<std::pair<int, int>>& intervals);

struct NlpSolution {
  FractionalSolution sol;  // original numbering
  std::vector<double> x_left;
  std::vector<double> x_right;
};

// IGO values are 1/(1−β) times the mass of the batch before (and including)
// the IGO; non-IGO values are kept except service before the last IGO.
NlpSolution build_nlp_scaled(const Instance& instance, const FractionalSolution& lpsol,
                             const IgoPlan& plan);

// Item orders shifted to both neighbouring IGOs; service shifted forward and,
// from the deadline batch, back to the last IGO by at most β/(1−β) times the
// mass already before it.
NlpSolution build_nlp_bidirectional(const Instance& instance, const FractionalSolution& lpsol,
                                    const IgoPlan& plan);

struct BetaChoice {
  double beta1 = 0.5;
  double beta2 = 0.5;
  double predicted = 0.0;
};

// Factors of the two constructions as functions of a = LP_gen/LP and
// c = LP_hold/LP.
double scaled_factor(double a, double c);
double bidirectional_factor(double a, double c);
BetaChoice choose_beta(double a, double c);

// max over the simplex a, c ≥ 0, a + c ≤ 1 of min(f1, f2), on an n×n grid.
double maximin_factor(int grid);

// Deadline instances: min(2a + 3b, 4a + 2.5b) for cost shares a (general)
// and b (item).
double deadline_mix_factor(double a, double b);

}  // namespace jrp
