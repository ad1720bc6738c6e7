#include "jrp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "jrp/baseline.hpp"
#include "jrp/exact.hpp"
#include "jrp/iterround.hpp"
#include "jrp/pipage.hpp"
#include "jrp/split.hpp"

namespace jrp {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kRjrpd: return "rjrpd";
    case Variant::kGeneral: return "general";
    case Variant::kImproved: return "improved";
  }
  return "?";
}

const char* guess_mode_name(GuessMode g) {
  switch (g) {
    case GuessMode::kOracle: return "oracle";
    case GuessMode::kExhaustive: return "exhaustive";
    case GuessMode::kNone: return "none";
  }
  return "?";
}

std::optional<Variant> parse_variant(const std::string& name) {
  for (Variant v : {Variant::kRjrpd, Variant::kGeneral, Variant::kImproved}) {
    if (name == variant_name(v)) return v;
  }
  return std::nullopt;
}

std::optional<GuessMode> parse_guess_mode(const std::string& name) {
  for (GuessMode g : {GuessMode::kOracle, GuessMode::kExhaustive, GuessMode::kNone}) {
    if (name == guess_mode_name(g)) return g;
  }
  return std::nullopt;
}

long compute_m(double epsilon, int colors, MPath path) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(Errc::kBadInput, "epsilon must lie in (0, 1]");
  if (colors < 1) throw Error(Errc::kBadInput, "at least one color is required");
  if (path == MPath::kSingleColor) {
    double q = 1000.0 / epsilon;
    return static_cast<long>(std::ceil(1000.0 + q * std::log(q) - 1e-9));
  }
  const double c2 = static_cast<double>(colors) * colors;
  auto g = [&](double m) { return (colors + 1) * (40.0 * c2 + 90.0 * c2 * std::log(m)) / m; };
  // g decreases for m > e^{5/9}, so the first m that passes stays passing.
  long lo = static_cast<long>(std::floor(50.0 * colors / epsilon)) + 1;
  if (g(static_cast<double>(lo)) <= epsilon / 8.0) return lo;
  long hi = lo;
  while (g(static_cast<double>(hi)) > epsilon / 8.0) hi *= 2;
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (g(static_cast<double>(mid)) <= epsilon / 8.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

int thread_count() {
  if (const char* env = std::getenv("JRP_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& f) {
  int workers = std::min(n, thread_count());
  if (workers <= 1) {
    for (int k = 0; k < n; ++k) f(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int k = next++; k < n; k = next++) {
        try {
          f(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

nlohmann::json breakdown_json(const CostBreakdown& c) {
  return {{"general", c.general}, {"item", c.item}, {"holding", c.holding}, {"penalty", c.penalty}, {"total", c.total}};
}

CostBreakdown breakdown_from(const nlohmann::json& j) {
  CostBreakdown c;
  c.general = j.at("general").get<double>();
  c.item = j.at("item").get<double>();
  c.holding = j.at("holding").get<double>();
  c.penalty = j.at("penalty").get<double>();
  c.total = j.at("total").get<double>();
  return c;
}

// JSON has no infinity; an unbounded ratio is stored as null.
nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::vector<double> color_limits(const Instance& inst) { return inst.rejection_limits; }

std::optional<IntegralSolution> serve_schedule(const Instance& inst, const std::map<int, std::set<int>>& orders,
                                               std::optional<double> penalty_limit = {}) {
  try {
    return round_service_vars(inst, orders, color_limits(inst), penalty_limit);
  } catch (const Error& e) {
    if (e.code() == Errc::kInfeasible) return std::nullopt;
    throw;
  }
}

}  // namespace

double cost_ratio(double cost, double lp) {
  if (lp > 1e-12) return cost / lp;
  return cost > 1e-12 ? std::numeric_limits<double>::infinity() : 1.0;
}

nlohmann::json certificate_to_json(const Certificate& cert) {
  nlohmann::json bounds = nlohmann::json::array();
  for (const AdditiveBound& b : cert.additive_bounds) {
    bounds.push_back({{"name", b.name}, {"value", b.value}, {"bound", b.bound}});
  }
  nlohmann::json j = {{"format", "jrp-certificate"},
                      {"version", 1},
                      {"variant", cert.variant},
                      {"guess_mode", cert.guess_mode},
                      {"path", cert.path},
                      {"epsilon", cert.epsilon},
                      {"theoretical_m", cert.theoretical_m},
                      {"m", cert.m},
                      {"lp_value", cert.lp_value},
                      {"lp_components", breakdown_json(cert.lp_components)},
                      {"cost", cert.cost},
                      {"components", breakdown_json(cert.components)},
                      {"ratio", number_or_null(cert.ratio)},
                      {"additive_bounds", bounds},
                      {"opt", cert.opt ? nlohmann::json(*cert.opt) : nlohmann::json(nullptr)},
                      {"notes", cert.notes}};
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "jrp-certificate") {
      throw Error(Errc::kBadInput, "not a certificate file");
    }
    Certificate c;
    c.variant = j.at("variant").get<std::string>();
    c.guess_mode = j.at("guess_mode").get<std::string>();
    c.path = j.at("path").get<std::string>();
    c.epsilon = j.at("epsilon").get<double>();
    c.theoretical_m = j.at("theoretical_m").get<long>();
    c.m = j.at("m").get<int>();
    c.lp_value = j.at("lp_value").get<double>();
    c.lp_components = breakdown_from(j.at("lp_components"));
    c.cost = j.at("cost").get<double>();
    c.components = breakdown_from(j.at("components"));
    c.ratio = j.at("ratio").is_null() ? std::numeric_limits<double>::infinity() : j.at("ratio").get<double>();
    for (const auto& b : j.at("additive_bounds")) {
      c.additive_bounds.push_back({b.at("name").get<std::string>(), b.at("value").get<double>(),
                                   b.at("bound").get<double>()});
    }
    if (!j.at("opt").is_null()) c.opt = j.at("opt").get<double>();
    c.notes = j.at("notes").get<std::vector<std::string>>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kBadInput, std::string("malformed certificate: ") + e.what());
  }
}

IntegralSolution prune_orders(const Instance& instance, const IntegralSolution& sol) {
  IntegralSolution best = sol;
  double best_cost = evaluate(instance, best).total;
  const double penalty_cap = evaluate(instance, sol).penalty + 1e-9;
  auto orders_of = [](const IntegralSolution& s) { return s.orders; };

  // Orders that serve nothing go first.
  {
    std::map<int, std::set<int>> used;
    for (int d = 0; d < instance.n_demands(); ++d) {
      const Disposition& disp = best.disposition[d];
      if (disp.is_served()) used[disp.slot].insert(instance.demands[d].item);
    }
    IntegralSolution trimmed = best;
    trimmed.orders = used;
    double c = evaluate(instance, trimmed).total;
    if (c <= best_cost) {
      best = trimmed;
      best_cost = c;
    }
  }
  const int max_rounds = 4 * static_cast<int>(best.orders.size()) + 4;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<std::pair<int, int>> candidates;
    for (const auto& [s, items] : best.orders) {
      for (int i : items) candidates.push_back({s, i});
    }
    // Most expensive removals first.
    std::stable_sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
      auto weight = [&](const std::pair<int, int>& o) {
        double k = instance.k_item[o.second];
        if (best.orders.at(o.first).size() == 1) k += instance.k0;
        return k;
      };
      return weight(a) > weight(b);
    });
    bool improved = false;
    for (auto [s, i] : candidates) {
      std::map<int, std::set<int>> orders = orders_of(best);
      orders[s].erase(i);
      if (orders[s].empty()) orders.erase(s);
      std::optional<IntegralSolution> cand = serve_schedule(instance, orders, penalty_cap);
      if (!cand) continue;
      double c = evaluate(instance, *cand).total;
      if (c < best_cost - 1e-9) {
        best = *cand;
        best_cost = c;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return best;
}

namespace {

struct BigRun {
  IntegralSolution solution;
  LpSolution lp;
  CostBreakdown lp_components;
  std::vector<AdditiveBound> bounds;
  std::vector<std::string> notes;
  std::vector<std::string> trace;
};

// Item and holding allowance recorded by iterative rounding.
double iterative_allowance(const Instance& inst, const IterRoundReport& rep) {
  double a = rep.rows * inst.max_finite_holding();
  for (const ItemRounding& it : rep.items) {
    double k = inst.k_item[it.item];
    a += it.single_path ? single_path_extra_bound(it.q_init, k) : general_path_extra_bound(it.q_init, k, rep.rows);
  }
  return a;
}

// Runs of consecutive non-IGO timesteps, in the numbering of the kept
// timesteps.
std::vector<std::pair<int, int>> gap_batches(const std::vector<int>& kept) {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < static_cast<int>(kept.size()); ++k) {
    if (k > 0 && kept[k] == kept[k - 1] + 1) {
      out.back().second = k + 1;
    } else {
      out.push_back({k + 1, k + 1});
    }
  }
  return out;
}

struct Candidate {
  IntegralSolution solution;
  double cost = 0.0;
  std::vector<AdditiveBound> bounds;
  std::string label;
};

// IGO split, iterative rounding on Instance 1, pipage on Instance 2.
Candidate run_split(const Instance& orig, const LPModel& model, const LpSolution& lp,
                    const CostBreakdown& lpc, std::vector<std::string>& trace) {
  const bool deadline = model.instance.is_deadline_only();
  // General holding is first reduced to deadlines at the earliest LP
  // service slot of each demand.
  DeadlineReduction reduction;
  if (deadline) {
    reduction.instance = model.instance;
    reduction.intervals = zero_windows(model.instance);
  } else {
    reduction = reduce_to_deadlines(model.instance, lp.sol);
  }
  const Instance& inst = reduction.instance;
  const std::vector<std::pair<int, int>>& intervals = reduction.intervals;
  const int n = inst.n_demands();
  IgoPlan plan = place_igos(lp.sol.y, inst.horizon, 1.0);
  SplitResult split = split_instances(inst, lp.sol, plan, intervals);
  trace.push_back("IGOs " + std::to_string(plan.igos.size()) + ", |D1| " + std::to_string(split.d1.size()) +
                  ", |D2| " + std::to_string(split.d2.size()) + ", rejected outright " +
                  std::to_string(split.rejected_outright.size()));

  Candidate out;
  out.label = "split";
  IntegralSolution merged = IntegralSolution::empty_for(orig);
  double allowance1 = 0.0, allowance2 = 0.0;
  if (split.inst1.sub.instance.n_demands() > 0) {
    const Instance& i1 = split.inst1.sub.instance;
    IterRoundResult r1 = iterative_round(i1, split.inst1.seed);
    allowance1 = iterative_allowance(i1, r1.report);
    out.bounds.push_back({"instance 1 iterative rounding", r1.report.final_cost, r1.report.lp_cost + allowance1});
    merged = merge(merged, lift(split.inst1.sub, r1.solution, n));
    trace.push_back("instance 1: LP " + std::to_string(r1.report.lp_cost) + " -> " +
                    std::to_string(r1.report.final_cost));
  }
  if (split.inst2.sub.instance.n_demands() > 0) {
    const Instance& i2 = split.inst2.sub.instance;
    PipageResult r2 = pipage_round(i2, split.inst2.seed, split.inst2_batches);
    allowance2 = pipage_allowance(i2, i2.max_item_cost(), i2.max_finite_holding());
    out.bounds.push_back({"instance 2 pipage rounding", r2.report.final_cost, r2.report.seed_cost + allowance2});
    merged = merge(merged, lift(split.inst2.sub, r2.solution, n));
    trace.push_back("instance 2: seed " + std::to_string(r2.report.seed_cost) + " -> " +
                    std::to_string(r2.report.final_cost));
  }
  for (int d : split.rejected_outright) merged.disposition[d] = Disposition::rejected();
  for (int d = 0; d < n; ++d) {
    if (!merged.disposition[d].is_set()) merged.disposition[d] = Disposition::rejected();
  }

  int igo_used = 0;
  for (int s : plan.igos) {
    if (merged.orders.count(s)) ++igo_used;
  }
  out.bounds.push_back({"initial general orders", orig.k0 * igo_used,
                        orig.k0 * (std::floor(plan.z[inst.horizon] + 1e-9) + 2.0)});
  CostBreakdown c = evaluate(orig, merged);
  double bound = 2.0 * lpc.general + 3.0 * lpc.item + lpc.penalty + 2.0 * orig.k0 + allowance1 + allowance2;
  if (deadline) {
    out.bounds.push_back({"deadline form 2·gen + 3·item", c.total, bound});
  } else {
    // Holding is monotone, so service inside I(d) costs at most the holding
    // at its first slot.
    double holding = 0.0;
    for (int d = 0; d < n; ++d) {
      if (merged.disposition[d].is_served()) holding += model.instance.demands[d].holding_at(intervals[d].first);
    }
    out.bounds.push_back({"reduced form 2·gen + 3·item + holding at I(d)", c.total, bound + holding});
  }
  out.solution = std::move(merged);
  out.cost = c.total;
  return out;
}

// Rounds one NLP construction: its IGO part by iterative rounding with
// weights scaled by 1 − x_right, then the rest by pipage.
Candidate run_nlp(const Instance& orig, const Instance& inst, const NlpSolution& nlp, const IgoPlan& plan,
                  const std::string& label, std::vector<std::string>& trace) {
  const int n = inst.n_demands();
  Candidate out;
  out.label = label;
  std::vector<int> last_igo(n, 0);
  for (int d = 0; d < n; ++d) last_igo[d] = plan.last_igo_upto(inst.demands[d].deadline);

  std::vector<int> left_demands;
  for (int d = 0; d < n; ++d) {
    const Demand& dem = inst.demands[d];
    for (int s : plan.igos) {
      if (s > last_igo[d]) break;
      if (dem.servable_at(s)) {
        left_demands.push_back(d);
        break;
      }
    }
  }
  IntegralSolution merged = IntegralSolution::empty_for(orig);
  std::vector<char> served_left(n, 0);
  double allowance1 = 0.0, allowance2 = 0.0, left_penalty = 0.0;
  if (!left_demands.empty()) {
    SubInstance sub = restrict_instance(inst, plan.igos, left_demands);
    Instance& li = sub.instance;
    li.k0 = 0.0;
    FractionalSolution seed;
    for (int s = 1; s <= li.horizon; ++s) {
      seed.y[s] = 1.0;
      for (int i = 0; i < li.n_items; ++i) {
        double v = nlp.sol.get_y_item(i, sub.timesteps[s - 1]);
        if (v > 0.0) seed.y_item[{i, s}] = v;
      }
    }
    std::vector<double> limits(li.n_colors, 0.0);
    for (int k = 0; k < li.n_demands(); ++k) {
      int d = left_demands[k];
      Demand& dem = li.demands[k];
      double keep = 1.0 - nlp.x_right[d];
      for (double& w : dem.weights) w *= keep;
      dem.penalty *= keep;
      double served = 0.0;
      for (int s = 1; s <= dem.deadline; ++s) {
        double v = nlp.sol.get_x(d, sub.timesteps[s - 1]);
        if (v > 0.0 && dem.servable_at(s)) {
          seed.x[{k, s}] = v;
          served += v;
        }
      }
      seed.r.push_back(std::max(0.0, 1.0 - served));
      for (int c = 0; c < li.n_colors; ++c) limits[c] += dem.weights[c] * seed.r.back();
      left_penalty += dem.penalty * seed.r.back();
    }
    for (int c = 0; c < li.n_colors; ++c) li.rejection_limits[c] = limits[c] + 1e-9;
    IterRoundResult r1 = iterative_round(li, seed);
    allowance1 = iterative_allowance(li, r1.report);
    out.bounds.push_back({label + ": IGO phase", r1.report.final_cost, r1.report.lp_cost + allowance1});
    IntegralSolution lifted = lift(sub, r1.solution, n);
    for (int d : left_demands) {
      if (lifted.disposition[d].is_served()) {
        served_left[d] = 1;
      } else {
        lifted.disposition[d] = Disposition{};
      }
    }
    merged = merge(merged, lifted);
  }

  std::vector<int> kept;
  for (int s = 1; s <= inst.horizon; ++s) {
    if (!plan.is_igo(s)) kept.push_back(s);
  }
  std::vector<int> right_demands;
  std::vector<double> outright(inst.n_colors, 0.0);
  for (int d = 0; d < n; ++d) {
    if (served_left[d]) continue;
    const Demand& dem = inst.demands[d];
    bool any = false;
    for (int s = last_igo[d] + 1; s <= dem.deadline; ++s) any = any || dem.servable_at(s);
    if (any) {
      right_demands.push_back(d);
    } else {
      merged.disposition[d] = Disposition::rejected();
      for (int c = 0; c < inst.n_colors; ++c) outright[c] += dem.weights[c];
    }
  }
  if (!right_demands.empty()) {
    SubInstance sub = restrict_instance(inst, kept, right_demands);
    Instance& ri = sub.instance;
    FractionalSolution seed;
    for (int s = 1; s <= ri.horizon; ++s) {
      int t = kept[s - 1];
      if (nlp.sol.get_y(t) > 0.0) seed.y[s] = nlp.sol.get_y(t);
      for (int i = 0; i < ri.n_items; ++i) {
        double v = nlp.sol.get_y_item(i, t);
        if (v > 0.0) seed.y_item[{i, s}] = v;
      }
    }
    for (int k = 0; k < ri.n_demands(); ++k) {
      int d = right_demands[k];
      Demand& dem = ri.demands[k];
      double served = 0.0;
      for (int s = 1; s <= dem.deadline; ++s) {
        int t = kept[s - 1];
        // Service stays inside the deadline batch.
        if (t <= last_igo[d]) {
          dem.holding[s - 1] = kInfeasible;
          continue;
        }
        double v = nlp.sol.get_x(d, t);
        if (v > 0.0 && dem.servable_at(s)) {
          seed.x[{k, s}] = v;
          served += v;
        }
      }
      seed.r.push_back(std::max(0.0, 1.0 - served));
    }
    for (int c = 0; c < ri.n_colors; ++c) {
      double seed_rejected = 0.0;
      for (int k = 0; k < ri.n_demands(); ++k) seed_rejected += ri.demands[k].weights[c] * seed.r[k];
      ri.rejection_limits[c] = std::max(inst.rejection_limits[c] - outright[c], seed_rejected) + 1e-9;
    }
    PipageResult r2 = pipage_round(ri, seed, gap_batches(kept));
    allowance2 = pipage_allowance(ri, ri.max_item_cost(), ri.max_finite_holding());
    out.bounds.push_back({label + ": gap phase", r2.report.final_cost, r2.report.seed_cost + allowance2});
    merged = merge(merged, lift(sub, r2.solution, n));
  }
  for (int d = 0; d < n; ++d) {
    if (!merged.disposition[d].is_set()) merged.disposition[d] = Disposition::rejected();
  }
  out.cost = evaluate(orig, merged).total;
  out.bounds.push_back({label + ": NLP form", out.cost,
                        evaluate(inst, nlp.sol).total + left_penalty + allowance1 + allowance2});
  trace.push_back(label + ": increment " + std::to_string(plan.increment) + ", cost " + std::to_string(out.cost));
  out.solution = std::move(merged);
  return out;
}

BigRun run_big(const Instance& inst, const SideInformation& side, Variant variant, double epsilon) {
  BigRun out;
  const bool deadline = inst.is_deadline_only();
  if (variant == Variant::kRjrpd && !deadline) {
    throw Error(Errc::kBadInput, "the rjrpd variant needs zero-or-infeasible holding costs");
  }
  LpBuildOptions build;
  build.form = deadline ? LpForm::kDeadline : LpForm::kFull;
  build.epsilon = epsilon;
  LPModel model = build_lp(inst, side, build);
  try {
    out.lp = solve_extreme(model);
  } catch (const Error& e) {
    if (e.code() != Errc::kInfeasible) throw;
    if (side.empty()) throw Error(Errc::kInfeasibleInstance, "the LP relaxation is infeasible");
    throw Error(Errc::kLpInfeasibleAfterConstraints, "the LP with side information is infeasible");
  }
  out.lp_components = evaluate(model.instance, out.lp.sol);
  out.trace.push_back("LP " + std::to_string(out.lp.objective));

  std::vector<Candidate> cands;
  cands.push_back(run_split(inst, model, out.lp, out.lp_components, out.trace));
  if (variant == Variant::kImproved) {
    double total = std::max(out.lp_components.total, 1e-12);
    double a = out.lp_components.general / total;
    double c = out.lp_components.holding / total;
    BetaChoice beta = choose_beta(a, c);
    out.notes.push_back("improved: a = " + std::to_string(a) + ", c = " + std::to_string(c) +
                        ", predicted factor " + std::to_string(beta.predicted));
    IgoPlan p1 = place_igos(out.lp.sol.y, inst.horizon, beta.beta1);
    cands.push_back(run_nlp(inst, model.instance, build_nlp_scaled(model.instance, out.lp.sol, p1), p1, "scaled",
                            out.trace));
    IgoPlan p2 = place_igos(out.lp.sol.y, inst.horizon, beta.beta2);
    cands.push_back(run_nlp(inst, model.instance, build_nlp_bidirectional(model.instance, out.lp.sol, p2), p2,
                            "bidirectional", out.trace));
  }
  const Candidate* best = &cands[0];
  for (const Candidate& c : cands) {
    if (c.cost < best->cost - 1e-12) best = &c;
    out.bounds.insert(out.bounds.end(), c.bounds.begin(), c.bounds.end());
  }
  out.trace.push_back("chose " + best->label);
  IntegralSolution pruned = prune_orders(inst, best->solution);
  out.trace.push_back("pruned " + std::to_string(best->cost) + " -> " + std::to_string(evaluate(inst, pruned).total));
  // Pruning only lowers the cost, so the recorded bounds cover the final value.
  double final_cost = evaluate(inst, pruned).total;
  for (AdditiveBound& b : out.bounds) {
    if (b.name.find("form") != std::string::npos && b.name.find(best->label) != std::string::npos) {
      b.value = final_cost;
    }
    if (best->label == "split" && (b.name.rfind("deadline form", 0) == 0 || b.name.rfind("reduced form", 0) == 0)) {
      b.value = final_cost;
    }
  }
  out.bounds.push_back({"penalty within the LP penalty", evaluate(inst, pruned).penalty, out.lp_components.penalty});
  out.solution = std::move(pruned);
  return out;
}

// Every side information with at most m guessed item orders.
std::vector<SideInformation> enumerate_guesses(const Instance& inst, int m) {
  std::vector<SideInformation> out;
  out.push_back({});
  std::vector<ItemSlot> slots;
  for (int i = 0; i < inst.n_items; ++i) {
    for (int s = 1; s <= inst.horizon; ++s) slots.push_back({i, s});
  }
  std::function<void(std::size_t, std::vector<ItemSlot>&)> rec = [&](std::size_t from, std::vector<ItemSlot>& cur) {
    if (!cur.empty()) {
      SideInformation side;
      side.m = m;
      double k_max = std::numeric_limits<double>::infinity();
      for (const ItemSlot& is : cur) {
        side.forced_item.insert(is);
        k_max = std::min(k_max, inst.k_item[is.first]);
      }
      side.k_max = k_max;
      out.push_back(side);
    }
    if (static_cast<int>(cur.size()) == m) return;
    for (std::size_t k = from; k < slots.size(); ++k) {
      cur.push_back(slots[k]);
      rec(k + 1, cur);
      cur.pop_back();
    }
  };
  std::vector<ItemSlot> cur;
  rec(0, cur);
  return out;
}

std::optional<ExactResult> try_brute_force(const Instance& inst) {
  try {
    return brute_force_opt(inst);
  } catch (const Error& e) {
    if (e.code() == Errc::kTooLarge) return std::nullopt;
    throw;
  }
}

}  // namespace

std::optional<IntegralSolution> solve_small_cases(const Instance& instance, int m, SmallMode mode) {
  instance.validate();
  const int n = instance.n_demands();
  if (n == 0) return IntegralSolution::empty_for(instance);
  std::optional<IntegralSolution> best;
  double best_cost = std::numeric_limits<double>::infinity();
  auto offer = [&](const std::optional<IntegralSolution>& sol) {
    if (!sol || !check_feasible(instance, *sol).ok()) return;
    double c = evaluate(instance, *sol).total;
    if (c < best_cost) {
      best_cost = c;
      best = sol;
    }
  };
  // General orders fixed at the given timesteps, then iterative rounding on
  // the restriction to them.
  auto with_schedule = [&](const std::vector<int>& steps, const SideInformation& extra) -> std::optional<IntegralSolution> {
    if (steps.empty()) return std::nullopt;
    SideInformation side = extra;
    for (int s = 1; s <= instance.horizon; ++s) {
      if (std::binary_search(steps.begin(), steps.end(), s)) {
        side.forced_general.insert(s);
      } else {
        side.forced_zero_general.insert(s);
      }
    }
    LpBuildOptions build;
    build.form = instance.is_deadline_only() ? LpForm::kDeadline : LpForm::kFull;
    LPModel model;
    LpSolution lp;
    try {
      model = build_lp(instance, side, build);
      lp = solve_extreme(model);
    } catch (const Error& e) {
      if (e.code() == Errc::kInfeasible || e.code() == Errc::kInconsistentSideInfo) return std::nullopt;
      throw;
    }
    const Instance& inst = model.instance;
    std::vector<int> kept;
    IntegralSolution out = IntegralSolution::empty_for(instance);
    for (int d = 0; d < n; ++d) {
      bool any = false;
      for (int s : steps) any = any || (s <= inst.demands[d].deadline && inst.demands[d].servable_at(s));
      if (any) {
        kept.push_back(d);
      } else {
        out.disposition[d] = Disposition::rejected();
      }
    }
    if (kept.empty()) return out;
    SubInstance sub = restrict_instance(inst, steps, kept);
    sub.instance.k0 = 0.0;
    FractionalSolution seed;
    for (int s = 1; s <= sub.instance.horizon; ++s) {
      seed.y[s] = 1.0;
      for (int i = 0; i < instance.n_items; ++i) {
        double v = lp.sol.get_y_item(i, steps[s - 1]);
        if (v > 0.0) seed.y_item[{i, s}] = v;
      }
    }
    std::vector<double> outright(instance.n_colors, 0.0);
    for (int d = 0; d < n; ++d) {
      if (!out.disposition[d].is_rejected()) continue;
      for (int c = 0; c < instance.n_colors; ++c) outright[c] += instance.demands[d].weights[c];
    }
    for (int c = 0; c < instance.n_colors; ++c) {
      sub.instance.rejection_limits[c] = instance.rejection_limits[c] - outright[c] + 1e-9;
    }
    for (int k = 0; k < static_cast<int>(kept.size()); ++k) {
      double served = 0.0;
      for (int s = 1; s <= sub.instance.demands[k].deadline; ++s) {
        double v = lp.sol.get_x(kept[k], steps[s - 1]);
        if (v > 0.0) {
          seed.x[{k, s}] = v;
          served += v;
        }
      }
      seed.r.push_back(std::clamp(lp.sol.r[kept[k]], 1.0 - served, 1.0));
    }
    try {
      IterRoundResult res = iterative_round(sub.instance, seed);
      IntegralSolution lifted = lift(sub, res.solution, n);
      for (int d : kept) out.disposition[d] = lifted.disposition[d];
      out.orders = lifted.orders;
      return out;
    } catch (const Error& e) {
      if (e.code() == Errc::kInfeasible || e.code() == Errc::kLpInfeasibleAfterConstraints) return std::nullopt;
      throw;
    }
  };

  if (mode == SmallMode::kOracle) {
    std::optional<ExactResult> opt = try_brute_force(instance);
    if (!opt) return std::nullopt;
    const IntegralSolution& o = opt->solution;
    int served = 0, item_orders = 0;
    for (const Disposition& d : o.disposition) served += d.is_served();
    for (const auto& [s, items] : o.orders) item_orders += static_cast<int>(items.size());
    if (served <= m) {
      // The served demands and their slots determine the whole solution.
      IntegralSolution sol = IntegralSolution::empty_for(instance);
      for (int d = 0; d < n; ++d) {
        sol.disposition[d] = o.disposition[d];
        if (o.disposition[d].is_served()) sol.add_order(o.disposition[d].slot, instance.demands[d].item);
      }
      offer(sol);
    }
    if (item_orders <= m) offer(serve_schedule(instance, o.orders));
    if (o.order_count() <= m) {
      std::vector<int> steps;
      for (const auto& [s, items] : o.orders) steps.push_back(s);
      offer(with_schedule(steps, derive_side_info(instance, o, m)));
    }
    return best;
  }

  if (m > kExhaustiveMaxM || instance.n_items * instance.horizon > kExhaustiveMaxSlots) return std::nullopt;
  std::vector<int> all_steps;
  for (int s = 1; s <= instance.horizon; ++s) all_steps.push_back(s);
  // Subsets of size 1..m of a sorted ground set.
  auto subsets = [&](const auto& ground, auto&& visit) {
    using T = typename std::decay_t<decltype(ground)>::value_type;
    std::vector<T> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      if (!cur.empty()) visit(cur);
      if (static_cast<int>(cur.size()) == m) return;
      for (std::size_t k = from; k < ground.size(); ++k) {
        cur.push_back(ground[k]);
        rec(k + 1);
        cur.pop_back();
      }
    };
    rec(0);
  };
  // Case 3: general order timesteps.
  subsets(all_steps, [&](const std::vector<int>& steps) { offer(with_schedule(steps, {})); });
  // Case 2: item order schedules.
  std::vector<ItemSlot> item_slots;
  for (int i = 0; i < instance.n_items; ++i) {
    for (int s = 1; s <= instance.horizon; ++s) item_slots.push_back({i, s});
  }
  subsets(item_slots, [&](const std::vector<ItemSlot>& chosen) {
    std::map<int, std::set<int>> orders;
    for (auto [i, s] : chosen) orders[s].insert(i);
    offer(serve_schedule(instance, orders));
  });
  // Case 1: served demands with their slots.
  std::vector<DemandSlot> demand_slots;
  for (int d = 0; d < n; ++d) {
    for (int s = 1; s <= instance.demands[d].deadline; ++s) {
      if (instance.demands[d].servable_at(s)) demand_slots.push_back({d, s});
    }
  }
  subsets(demand_slots, [&](const std::vector<DemandSlot>& chosen) {
    IntegralSolution sol = IntegralSolution::empty_for(instance);
    std::set<int> seen;
    for (auto [d, s] : chosen) {
      if (!seen.insert(d).second) return;
      sol.disposition[d] = Disposition::served(s);
      sol.add_order(s, instance.demands[d].item);
    }
    for (int d = 0; d < n; ++d) {
      if (!sol.disposition[d].is_set()) sol.disposition[d] = Disposition::rejected();
    }
    offer(sol);
  });
  // Serving nothing at all.
  IntegralSolution none = IntegralSolution::empty_for(instance);
  for (auto& disp : none.disposition) disp = Disposition::rejected();
  offer(none);
  return best;
}

SolveResult solve_cjrp(const Instance& instance, const SolveOptions& options) {
  instance.validate();
  SolveResult out;
  Certificate& cert = out.certificate;
  cert.variant = variant_name(options.variant);
  cert.guess_mode = guess_mode_name(options.guess);
  cert.epsilon = options.epsilon;
  cert.m = options.m;
  const int rows = instance.n_colors + (instance.has_penalties() ? 1 : 0);
  cert.theoretical_m = compute_m(options.epsilon, std::max(1, rows),
                                 rows <= 1 && instance.is_deadline_only() ? MPath::kSingleColor : MPath::kGeneral);
  cert.notes.push_back("bounds are checked in additive form with exact constants; the multiplicative (1+eps) "
                       "form needs m near theoretical_m and does not hold at desk scale");

  if (instance.n_demands() == 0) {
    out.solution = IntegralSolution::empty_for(instance);
    cert.path = "big";
    cert.ratio = 1.0;
    return out;
  }

  std::optional<ExactResult> opt;
  if (options.guess == GuessMode::kOracle) {
    opt = try_brute_force(instance);
    if (!opt) cert.notes.push_back("instance too large for the oracle; solved without side information");
  }
  if (opt) cert.opt = opt->cost;

  BigRun big;
  if (options.guess == GuessMode::kOracle && opt) {
    big = run_big(instance, derive_side_info(instance, opt->solution, options.m), options.variant, options.epsilon);
  } else if (options.guess == GuessMode::kExhaustive) {
    int m = std::min(options.m, kExhaustiveMaxM);
    if (instance.n_items * instance.horizon > kExhaustiveMaxSlots) {
      throw Error(Errc::kTooLarge, "exhaustive guessing is limited to " + std::to_string(kExhaustiveMaxSlots) +
                                       " item slots");
    }
    std::vector<SideInformation> guesses = enumerate_guesses(instance, m);
    std::vector<std::optional<BigRun>> runs(guesses.size());
    parallel_for(static_cast<int>(guesses.size()), [&](int k) {
      try {
        runs[k] = run_big(instance, guesses[k], options.variant, options.epsilon);
      } catch (const Error& e) {
        if (e.code() != Errc::kLpInfeasibleAfterConstraints && e.code() != Errc::kInconsistentSideInfo) throw;
      }
    });
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(runs.size()); ++k) {
      if (!runs[k]) continue;
      double c = evaluate(instance, runs[k]->solution).total;
      if (c < best_cost - 1e-12) {
        best_cost = c;
        best = k;
      }
    }
    if (best < 0) throw Error(Errc::kInfeasibleInstance, "no guess leads to a feasible LP");
    big = std::move(*runs[best]);
    cert.notes.push_back("exhaustive guessing over " + std::to_string(guesses.size()) + " side informations");
  } else {
    big = run_big(instance, {}, options.variant, options.epsilon);
  }
  out.solution = big.solution;
  cert.path = "big";
  cert.lp_value = big.lp.objective;
  cert.lp_components = big.lp_components;
  cert.additive_bounds = big.bounds;
  cert.notes.insert(cert.notes.end(), big.notes.begin(), big.notes.end());
  out.trace = big.trace;

  if (options.small_cases && options.guess != GuessMode::kNone) {
    SmallMode mode = options.guess == GuessMode::kOracle ? SmallMode::kOracle : SmallMode::kExhaustive;
    std::optional<IntegralSolution> small;
    if (mode == SmallMode::kExhaustive || opt) small = solve_small_cases(instance, options.m, mode);
    if (small && evaluate(instance, *small).total < evaluate(instance, out.solution).total - 1e-9) {
      out.solution = *small;
      cert.path = "small";
      out.trace.push_back("small-solution enumeration found a cheaper solution");
    }
  }
  if (!check_feasible(instance, out.solution).ok()) {
    throw Error(Errc::kInternal, "pipeline produced an infeasible solution: " +
                                     check_feasible(instance, out.solution).describe());
  }
  cert.components = evaluate(instance, out.solution);
  cert.cost = cert.components.total;
  cert.ratio = cost_ratio(cert.cost, cert.lp_value);
  if (cert.path == "small") {
    // Bounds of the discarded run no longer describe the returned solution.
    std::vector<AdditiveBound> kept;
    for (AdditiveBound b : cert.additive_bounds) {
      if (b.name.find("form") != std::string::npos) b.value = cert.cost;
      if (b.name.rfind("penalty", 0) == 0) continue;
      kept.push_back(b);
    }
    cert.additive_bounds = kept;
  }
  return out;
}

std::string CertificateReport::describe() const {
  std::ostringstream os;
  if (!feasibility.ok()) os << feasibility.describe();
  for (const std::string& p : problems) os << p << "\n";
  return os.str();
}

CertificateReport certificate_check(const Instance& instance, const IntegralSolution& solution,
                                    const Certificate& cert, bool use_oracle) {
  CertificateReport rep;
  rep.feasibility = check_feasible(instance, solution);
  // Costs of an infeasible solution may be undefined.
  if (!rep.feasibility.ok()) return rep;
  CostBreakdown c = evaluate(instance, solution);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-7 * (1.0 + std::abs(b)); };
  auto mismatch = [&](const std::string& what, double recorded, double actual) {
    std::ostringstream os;
    os << what << " recorded as " << recorded << " but is " << actual;
    rep.problems.push_back(os.str());
  };
  if (!close(cert.cost, c.total)) mismatch("cost", cert.cost, c.total);
  if (!close(cert.components.general, c.general)) mismatch("general cost", cert.components.general, c.general);
  if (!close(cert.components.item, c.item)) mismatch("item cost", cert.components.item, c.item);
  if (!close(cert.components.holding, c.holding)) mismatch("holding cost", cert.components.holding, c.holding);
  if (!close(cert.components.penalty, c.penalty)) mismatch("penalty cost", cert.components.penalty, c.penalty);
  double lp_sum = cert.lp_components.general + cert.lp_components.item + cert.lp_components.holding +
                  cert.lp_components.penalty;
  if (!close(cert.lp_components.total, lp_sum)) mismatch("LP component total", cert.lp_components.total, lp_sum);
  double ratio = cost_ratio(c.total, cert.lp_value);
  if (std::isfinite(ratio) != std::isfinite(cert.ratio) || (std::isfinite(ratio) && !close(cert.ratio, ratio))) {
    mismatch("ratio", cert.ratio, ratio);
  }
  for (const AdditiveBound& b : cert.additive_bounds) {
    if (!b.holds()) {
      std::ostringstream os;
      os << "bound '" << b.name << "' fails: " << b.value << " > " << b.bound;
      rep.problems.push_back(os.str());
    }
    if (b.name.find("form") != std::string::npos && b.value < c.total - 1e-7 * (1.0 + c.total)) {
      mismatch("bound '" + b.name + "' value", b.value, c.total);
    }
  }
  if (use_oracle && instance.n_demands() > 0) {
    std::optional<ExactResult> opt = try_brute_force(instance);
    if (opt) {
      if (c.total < opt->cost - 1e-7) mismatch("cost below the optimum", c.total, opt->cost);
      if (cert.guess_mode != "exhaustive" && cert.lp_value > opt->cost + 1e-7 * (1.0 + opt->cost)) {
        mismatch("LP value above the optimum", cert.lp_value, opt->cost);
      }
      if (cert.opt && !close(*cert.opt, opt->cost)) mismatch("optimum", *cert.opt, opt->cost);
    }
  }
  return rep;
}

}  // namespace jrp
