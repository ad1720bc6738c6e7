// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jrp/baseline.hpp"
#include "jrp/exact.hpp"
#include "jrp/generate.hpp"
#include "jrp/iterround.hpp"
#include "jrp/lpcore.hpp"
#include "jrp/pipage.hpp"
#include "jrp/pipeline.hpp"
#include "jrp/split.hpp"
#include "support.hpp"

using namespace jrp;

namespace {

// Tolerances pinned for the whole run.
constexpr double kLpTol = 1e-8;
constexpr double kGapTol = 1e-7;
constexpr double kDriftTol = 1e-8;
constexpr double kRatioTol = 1e-9;
constexpr double kBoundTol = 1e-7;
constexpr double kMaximinTol = 1e-3;
constexpr double kMixTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  int failures = 0;
  std::string first_failure;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (failures++ == 0) first_failure = what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double relative(double v) { return 1.0 + std::abs(v); }

// Brute force, with +inf for an infeasible instance.
double oracle_cost(const Instance& inst) {
  try {
    return brute_force_opt(inst).cost;
  } catch (const Error& e) {
    if (e.code() == Errc::kInfeasibleInstance) return std::numeric_limits<double>::infinity();
    throw;
  }
}

testkit::RandomOptions tiny_options(int k) {
  testkit::RandomOptions opt;
  opt.max_items = 3;
  opt.max_horizon = 6;
  opt.max_demands = 8;
  opt.max_colors = 2;
  opt.holding = k % 2 ? testkit::Holding::kGeneral : testkit::Holding::kDeadline;
  opt.penalties = k % 3 == 0;
  return opt;
}

std::vector<Instance> tiny_corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  for (int k = 0; k < count; ++k) out.push_back(testkit::random_instance(rng, tiny_options(k)));
  return out;
}

void criterion_gap(Outcome& o) {
  auto start = std::chrono::steady_clock::now();
  for (int t : {5, 10, 100}) {
    Instance inst = generate_instance("gap(" + std::to_string(t) + ")", 1);
    double lp = solve_extreme(build_lp(inst)).objective;
    o.require(std::abs(lp - 1.0 / t) <= kLpTol, "LP of gap(" + std::to_string(t) + ") is " + std::to_string(lp));
    // Brute force covers the short horizons; the single-item DP the long one.
    double opt = t <= 10 ? brute_force_opt(inst).cost : single_item_rejection_dp(inst).cost;
    o.require(opt == 1.0, "OPT of gap(" + std::to_string(t) + ") is " + std::to_string(opt));
    if (t <= 10) o.require(testkit::enumerate_opt(inst) == 1.0, "enumerator disagrees on gap");
    SolveOptions so;
    so.guess = GuessMode::kNone;
    SolveResult res = solve_cjrp(inst, so);
    o.require(std::abs(res.certificate.ratio - t) <= 1e-6 * t,
              "certificate ratio for gap(" + std::to_string(t) + ") is " + std::to_string(res.certificate.ratio));
    o.detail << "T=" << t << ": lp=" << lp << " opt=" << opt << " ratio=" << res.certificate.ratio << "; ";
  }
  double secs = seconds_since(start);
  o.require(secs < 5.0, "runtime " + std::to_string(secs) + " s");
  o.detail << "time " << secs << " s";
}

void criterion_oracles(Outcome& o) {
  auto start = std::chrono::steady_clock::now();
  int compared = 0, infeasible = 0;
  for (const Instance& inst : tiny_corpus(2024, 240)) {
    double bf = oracle_cost(inst);
    double en = testkit::enumerate_opt(inst);
    o.require(bf == en || (std::isinf(bf) && std::isinf(en)), "brute force differs from the enumerator");
    infeasible += std::isinf(bf);
    ++compared;
  }
  std::mt19937_64 rng(77);
  testkit::RandomOptions opt;
  opt.max_items = 1;
  opt.max_colors = 1;
  opt.max_horizon = 8;
  opt.holding = testkit::Holding::kGeneral;
  int ww = 0;
  for (int k = 0; k < 100; ++k) {
    Instance inst = testkit::random_instance(rng, opt);
    inst.rejection_limits = {0.0};
    for (auto& d : inst.demands) {
      d.weights = {1.0};
      d.penalty = 0.0;
    }
    o.require(wagner_whitin(inst).cost == brute_force_opt(inst).cost, "lot sizing differs from brute force");
    ++ww;
  }
  double secs = seconds_since(start);
  o.require(compared >= 200 && ww >= 100, "too few instances");
  o.require(secs < 180.0, "runtime " + std::to_string(secs) + " s");
  o.detail << compared << " instances (" << infeasible << " infeasible) vs enumerator, " << ww
           << " lot-sizing instances; time " << secs << " s";
}

void criterion_sandwich(Outcome& o) {
  int solves = 0;
  double worst_gap = 0.0;
  for (const Instance& inst : tiny_corpus(2025, 200)) {
    double opt = oracle_cost(inst);
    LPModel model = build_lp(inst);
    LpSolution sol;
    try {
      sol = solve_extreme(model);
    } catch (const Error& e) {
      o.require(e.code() == Errc::kInfeasible && std::isinf(opt), "LP infeasible on a feasible instance");
      continue;
    }
    o.require(sol.objective <= opt + kLpTol * relative(opt), "LP above OPT");
    DualCheck dual = solve_dual_and_verify(model, sol);
    double rel = dual.gap / relative(sol.objective);
    worst_gap = std::max(worst_gap, rel);
    o.require(rel <= kGapTol, "duality gap " + std::to_string(rel));
    ++solves;
  }
  o.detail << solves << " LP solves, worst relative duality gap " << worst_gap;
}

void criterion_pipage(Outcome& o) {
  std::mt19937_64 rng(4242);
  int runs = 0, mono = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 360; ++rep) {
    bool deadline_only = rep % 2 == 0;
    bool penalties = rep % 5 == 0;
    testkit::PipageInput in = testkit::random_pipage_input(rng, 3, deadline_only, penalties);
    const Instance& inst = in.instance;
    PipageResult res = pipage_round(inst, in.seed, in.batches);
    double seed = evaluate(inst, in.seed).total;
    const int c = inst.n_colors;
    double bound = seed + 2.0 * c * inst.k0 + 2.0 * c * inst.max_item_cost() + c * inst.max_finite_holding();
    if (penalties) bound = seed + pipage_allowance(inst, inst.max_item_cost(), inst.max_finite_holding());
    o.require(check_feasible(inst, res.solution).ok(), "pipage output infeasible");
    o.require(res.report.final_cost <= bound + kBoundTol * relative(bound), "pipage additive bound");
    o.require(res.report.max_row_drift <= kDriftTol, "row drift " + std::to_string(res.report.max_row_drift));
    o.require(!res.report.roundup_increased_rejection, "a round-up increased rejection");
    worst_slack = std::min(worst_slack, bound - res.report.final_cost);
    if (c == 1 && deadline_only && !penalties) {
      ++mono;
      double tight = seed + 2.0 * inst.k0 + 2.0 * inst.max_item_cost();
      o.require(res.report.final_cost <= tight + kBoundTol * relative(tight), "monochromatic bound");
    }
    ++runs;
  }
  o.require(runs >= 300, "too few runs");
  o.detail << runs << " runs (" << mono << " monochromatic), smallest slack " << worst_slack;
}

void check_iterations(Outcome& o, const Instance& inst, const IterRoundReport& rep, double& worst_ratio,
                      int& iterations) {
  const int rows = rep.rows;
  const double h = inst.max_finite_holding();
  for (const ItemRounding& it : rep.items) {
    double k = inst.k_item[it.item];
    if (it.single_path) {
      o.require(it.iterations <= single_path_iteration_bound(it.q_init), "iteration count above the bound");
      o.require(it.extra() <= single_path_extra_bound(it.q_init, k) + kBoundTol, "single-color extra bound");
    } else {
      o.require(it.extra() <= general_path_extra_bound(it.q_init, k, rows) + kBoundTol, "general extra bound");
    }
    iterations += it.iterations;
  }
  o.require(rep.service_extra <= rows * h + kBoundTol, "service extra above C·Hmax");
  for (const IterationRecord& r : rep.iterations) {
    bool single = false;
    for (const ItemRounding& it : rep.items) single = single || (it.item == r.item && it.single_path);
    double limit = single ? 7.0 / 8.0 * (1.0 + kRatioTol) : 1.0 - 1.0 / (8.0 * (rows + 1)) + kRatioTol;
    o.require(r.ratio() <= limit, "contraction ratio " + std::to_string(r.ratio()));
    worst_ratio = std::max(worst_ratio, r.ratio());
  }
}

void criterion_contraction(Outcome& o) {
  std::mt19937_64 rng(5151);
  double worst_single = 0.0, worst_general = 0.0;
  int single_iters = 0, general_iters = 0;
  for (int horizon : {40, 60, 80, 120, 160}) {
    testkit::RoundInput in = testkit::chain_input(rng, horizon, 2, 1, false);
    IterRoundResult res = iterative_round(in.instance, in.seed);
    o.require(check_feasible(in.instance, res.solution).ok(), "single-color output infeasible");
    for (const ItemRounding& it : res.report.items) o.require(it.single_path, "expected the single-color path");
    check_iterations(o, in.instance, res.report, worst_single, single_iters);
  }
  for (int colors : {1, 2, 3}) {
    for (bool holding : {false, true}) {
      for (int extra : {0, 40}) {
        testkit::RoundInput in = testkit::chain_input(rng, 80 + 40 * (colors - 1) + extra, 2, colors, holding);
        IterRoundOptions opt;
        opt.force_general = true;
        IterRoundResult res = iterative_round(in.instance, in.seed, opt);
        o.require(check_feasible(in.instance, res.solution).ok(), "general output infeasible");
        check_iterations(o, in.instance, res.report, worst_general, general_iters);
      }
    }
  }
  o.require(single_iters > 0 && general_iters > 0, "no iterations exercised");
  o.detail << single_iters << " single-color iterations (worst ratio " << worst_single << "), " << general_iters
           << " general iterations (worst ratio " << worst_general << ")";
}

void criterion_structure(Outcome& o) {
  int vertices = 0, inst1 = 0;
  int worst_mb = 0;
  std::vector<Instance> corpus = tiny_corpus(2026, 200);
  std::mt19937_64 rng(6262);
  for (int k = 0; k < 100; ++k) {
    testkit::RandomOptions opt = tiny_options(k);
    opt.max_horizon = 12;
    opt.max_demands = 16;
    opt.unique_pairs = false;
    corpus.push_back(testkit::random_instance(rng, opt));
  }
  for (const Instance& inst : corpus) {
    LPModel model = build_lp(inst, {}, {false, 1.0, inst.is_deadline_only() ? LpForm::kDeadline : LpForm::kFull});
    LpSolution lp;
    try {
      lp = solve_extreme(model);
    } catch (const Error&) {
      continue;
    }
    o.require(check_vertex(model, lp).ok(), "vertex bound fails");
    ++vertices;
    std::vector<std::pair<int, int>> intervals =
        inst.is_deadline_only() ? zero_windows(model.instance) : reduce_to_deadlines(model.instance, lp.sol).intervals;
    Instance work = inst.is_deadline_only() ? model.instance : reduce_to_deadlines(model.instance, lp.sol).instance;
    IgoPlan plan = place_igos(lp.sol.y, inst.horizon, 1.0);
    SplitResult split = split_instances(work, lp.sol, plan, intervals);
    const Instance& i1 = split.inst1.sub.instance;
    if (i1.n_demands() == 0) continue;
    // The perturbed-holding optimum is computed inside the rounding run.
    IterRoundOptions opt;
    opt.force_general = true;
    IterRoundResult res = iterative_round(i1, split.inst1.seed, opt);
    const IterRoundReport& rep = res.report;
    o.require(rep.initial_lean, "Instance-1 optimum is not lean");
    o.require(rep.all_lean, "an intermediate optimum is not lean");
    o.require(rep.initial_multibatches <= rep.rows + 1, "more than C+1 multibatches");
    o.require(rep.max_multibatches <= rep.rows + 1, "more than C+1 multibatches during rounding");
    worst_mb = std::max(worst_mb, rep.max_multibatches);
    ++inst1;
  }
  o.detail << vertices << " extreme points checked, " << inst1 << " Instance-1 optima lean, max multibatches "
           << worst_mb;
}

void criterion_end_to_end(Outcome& o) {
  std::mt19937_64 rng(7373);
  int runs = 0, big = 0;
  double worst = 0.0, sum = 0.0, worst_bound_ratio = 0.0;
  while (runs < 120) {
    testkit::RandomOptions opt;
    opt.max_items = 3;
    opt.max_horizon = 6;
    opt.max_demands = 8;
    opt.max_colors = 2;
    Instance inst = testkit::random_instance(rng, opt);
    double opt_cost = oracle_cost(inst);
    if (!std::isfinite(opt_cost)) continue;
    SolveOptions so;
    so.variant = Variant::kRjrpd;
    SolveResult res = solve_cjrp(inst, so);
    const Certificate& cert = res.certificate;
    o.require(check_feasible(inst, res.solution).ok(), "pipeline output infeasible");
    o.require(certificate_check(inst, res.solution, cert).ok(), "certificate check fails");
    const AdditiveBound* form = nullptr;
    for (const AdditiveBound& b : cert.additive_bounds) {
      if (b.name.rfind("deadline form", 0) == 0) form = &b;
    }
    o.require(form != nullptr, "no deadline-form bound recorded");
    if (form) {
      double core = 2.0 * cert.lp_components.general + 3.0 * cert.lp_components.item + cert.lp_components.penalty;
      double additive = form->bound - core;
      o.require(additive >= -kBoundTol, "negative additive term");
      o.require(cert.cost <= core + additive + kBoundTol * relative(form->bound), "end-to-end bound");
      if (form->bound > 0) worst_bound_ratio = std::max(worst_bound_ratio, cert.cost / form->bound);
    }
    big += cert.path == "big";
    double r = cost_ratio(cert.cost, opt_cost);
    worst = std::max(worst, r);
    sum += r;
    ++runs;
  }
  o.detail << runs << " instances (" << big << " from LP rounding), cost/OPT max " << worst << " mean " << sum / runs
           << ", cost/bound max " << worst_bound_ratio;
}

void criterion_maximin(Outcome& o) {
  auto start = std::chrono::steady_clock::now();
  double value = maximin_factor(2001);
  double target = (3.0 * std::sqrt(5.0) - 1.0) / 2.0;
  double mix = deadline_mix_factor(0.2, 0.8);
  double secs = seconds_since(start);
  o.require(std::abs(value - target) <= kMaximinTol, "maximin " + std::to_string(value));
  o.require(std::abs(mix - 2.8) <= kMixTol, "deadline mix " + std::to_string(mix));
  o.require(secs < 10.0, "runtime " + std::to_string(secs) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "maximin %.6f (target %.6f), mix %.12f, time %.2f s", value, target, mix, secs);
  o.detail << buf;
}

void criterion_set_cover(Outcome& o) {
  std::mt19937_64 rng(8484);
  int systems = 0;
  for (int k = 0; k < 20; ++k) {
    int elements = 2 + k % 3;
    auto sets = testkit::random_set_system(rng, 2 + k % 5, elements);
    double opt = brute_force_opt(build_set_cover_instance(sets, elements)).cost;
    int cover = testkit::min_set_cover(sets, elements);
    o.require(opt == cover, "set cover " + std::to_string(opt) + " vs " + std::to_string(cover));
    ++systems;
  }
  o.detail << systems << " set systems, every optimum equals the minimum cover";
}

void criterion_penalties(Outcome& o) {
  std::mt19937_64 rng(9595);
  int runs = 0, with_penalty = 0;
  for (int k = 0; k < 120; ++k) {
    testkit::RandomOptions opt = tiny_options(k);
    opt.penalties = true;
    opt.max_colors = 1 + k % 3;
    Instance inst = testkit::random_instance(rng, opt);
    if (!std::isfinite(oracle_cost(inst))) continue;
    for (GuessMode g : {GuessMode::kOracle, GuessMode::kNone}) {
      for (Variant v : {Variant::kGeneral, Variant::kImproved}) {
        SolveOptions so;
        so.guess = g;
        so.variant = v;
        so.small_cases = false;
        SolveResult res = solve_cjrp(inst, so);
        double pen = res.certificate.components.penalty;
        double limit = res.certificate.lp_components.penalty;
        o.require(pen <= limit + kBoundTol * relative(limit), "penalty above the LP penalty");
        with_penalty += pen > 0.0;
        ++runs;
      }
    }
  }
  o.detail << runs << " runs, " << with_penalty << " with a positive penalty cost";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
  };
  std::vector<Criterion> criteria = {
      {1, "integrality gap instance", criterion_gap},
      {2, "exact oracles agree", criterion_oracles},
      {3, "LP below OPT with tight duality", criterion_sandwich},
      {4, "pipage additive bound and conservation", criterion_pipage},
      {5, "iterative rounding contraction and extras", criterion_contraction},
      {6, "extreme-point structure", criterion_structure},
      {7, "end-to-end deadline bound", criterion_end_to_end},
      {8, "maximin constant and deadline mix", criterion_maximin},
      {9, "set-cover reduction", criterion_set_cover},
      {10, "penalty conservation", criterion_penalties},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = seconds_since(start);
    std::printf("%s criterion %d (%s): %s [%.2f s]", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(),
                secs);
    if (!o.pass) std::printf(" -- %d failures, first: %s", o.failures, o.first_failure.c_str());
    std::printf("\n");
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
