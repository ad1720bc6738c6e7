#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "jrp/lpcore.hpp"

namespace testkit {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double quarter(std::mt19937_64& rng, int max_quarters) {
  return uniform(rng, 0, max_quarters) / 4.0;
}

}  // namespace

Instance gap_instance(int horizon) {
  Instance inst;
  inst.n_items = 1;
  inst.horizon = horizon;
  inst.k0 = 1.0;
  inst.k_item = {0.0};
  inst.n_colors = 1;
  inst.rejection_limits = {static_cast<double>(horizon - 1)};
  for (int t = 1; t <= horizon; ++t) {
    jrp::Demand d;
    d.item = 0;
    d.deadline = t;
    d.holding.assign(t, 0.0);
    d.weights = {1.0};
    inst.demands.push_back(d);
  }
  return inst;
}

Instance random_instance(std::mt19937_64& rng, const RandomOptions& opt) {
  Instance inst;
  inst.n_items = uniform(rng, 1, opt.max_items);
  inst.horizon = uniform(rng, opt.min_horizon, opt.max_horizon);
  inst.k0 = uniform(rng, 0, 8) / 2.0;
  for (int i = 0; i < inst.n_items; ++i) inst.k_item.push_back(uniform(rng, 0, 8) / 2.0);
  inst.n_colors = uniform(rng, 1, opt.max_colors);
  int n_demands = uniform(rng, 1, opt.max_demands);
  std::vector<std::pair<int, int>> used;
  std::bernoulli_distribution colored(opt.weight_density);
  for (int k = 0; k < n_demands; ++k) {
    jrp::Demand d;
    bool fresh = false;
    for (int attempt = 0; attempt < 20 && !fresh; ++attempt) {
      d.item = uniform(rng, 0, inst.n_items - 1);
      d.deadline = uniform(rng, 1, inst.horizon);
      fresh = !opt.unique_pairs ||
              std::find(used.begin(), used.end(), std::make_pair(d.item, d.deadline)) == used.end();
    }
    if (!fresh) continue;
    used.push_back({d.item, d.deadline});
    int start = uniform(rng, 1, d.deadline);
    d.holding.assign(d.deadline, kInf);
    if (opt.holding == Holding::kDeadline) {
      for (int s = start; s <= d.deadline; ++s) d.holding[s - 1] = 0.0;
    } else {
      double h = 0.0;
      for (int s = d.deadline; s >= start; --s) {
        d.holding[s - 1] = h;
        h += quarter(rng, 8);
      }
    }
    d.weights.assign(inst.n_colors, 0.0);
    for (int c = 0; c < inst.n_colors; ++c) {
      if (colored(rng)) d.weights[c] = uniform(rng, 1, 2);
    }
    d.penalty = opt.penalties ? quarter(rng, 16) : 0.0;
    inst.demands.push_back(d);
  }
  std::uniform_real_distribution<double> frac(0.0, opt.max_limit_fraction);
  for (int c = 0; c < inst.n_colors; ++c) {
    inst.rejection_limits.push_back(std::floor(frac(rng) * inst.total_weight(c)));
  }
  return inst;
}

double naive_cost(const Instance& inst, const IntegralSolution& sol) {
  double total = 0.0;
  for (int s = 1; s <= inst.horizon; ++s) {
    bool any = false;
    for (int i = 0; i < inst.n_items; ++i) {
      if (sol.has_order(s, i)) {
        any = true;
        total += inst.k_item[i];
      }
    }
    if (any) total += inst.k0;
  }
  for (int d = 0; d < inst.n_demands(); ++d) {
    const auto& disp = sol.disposition[d];
    if (disp.is_rejected()) total += inst.demands[d].penalty;
    if (disp.is_served()) total += inst.demands[d].holding[disp.slot - 1];
  }
  return total;
}

double enumerate_opt(const Instance& inst) {
  const int N = inst.n_items;
  const int T = inst.horizon;
  const int D = inst.n_demands();
  const long n_schedules = 1L << (N * T);
  double best = kInf;
  for (long code = 0; code < n_schedules; ++code) {
    double order_cost = 0.0;
    for (int s = 0; s < T; ++s) {
      long mask = (code >> (s * N)) & ((1L << N) - 1);
      if (mask == 0) continue;
      order_cost += inst.k0;
      for (int i = 0; i < N; ++i) {
        if (mask >> i & 1L) order_cost += inst.k_item[i];
      }
    }
    if (order_cost >= best) continue;
    std::vector<double> serve(D, kInf);
    for (int d = 0; d < D; ++d) {
      const auto& dem = inst.demands[d];
      for (int s = 1; s <= dem.deadline; ++s) {
        if ((code >> ((s - 1) * N + dem.item)) & 1L) serve[d] = std::min(serve[d], dem.holding[s - 1]);
      }
    }
    double floor_cost = order_cost;
    for (int d = 0; d < D; ++d) floor_cost += std::min(serve[d], inst.demands[d].penalty);
    if (floor_cost >= best) continue;
    for (long rej = 0; rej < (1L << D); ++rej) {
      double cost = order_cost;
      std::vector<double> used(inst.n_colors, 0.0);
      for (int d = 0; d < D && cost < best; ++d) {
        if (rej >> d & 1L) {
          cost += inst.demands[d].penalty;
          for (int c = 0; c < inst.n_colors; ++c) used[c] += inst.demands[d].weights[c];
        } else {
          cost += serve[d];
        }
      }
      bool ok = true;
      for (int c = 0; c < inst.n_colors; ++c) ok = ok && used[c] <= inst.rejection_limits[c];
      if (ok && cost < best) best = cost;
    }
  }
  return best;
}

int min_set_cover(const std::vector<std::vector<int>>& sets, int n_elements) {
  const int k = static_cast<int>(sets.size());
  int best = std::numeric_limits<int>::max();
  for (long mask = 0; mask < (1L << k); ++mask) {
    std::vector<bool> hit(n_elements, false);
    int size = 0;
    for (int j = 0; j < k; ++j) {
      if (!(mask >> j & 1L)) continue;
      ++size;
      for (int e : sets[j]) hit[e] = true;
    }
    if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) best = std::min(best, size);
  }
  return best;
}

std::vector<std::vector<int>> random_set_system(std::mt19937_64& rng, int n_sets, int n_elements) {
  std::vector<std::vector<int>> sets(n_sets);
  std::bernoulli_distribution pick(0.4);
  for (auto& set : sets) {
    for (int e = 0; e < n_elements; ++e) {
      if (pick(rng)) set.push_back(e);
    }
  }
  // Make sure every element appears somewhere.
  for (int e = 0; e < n_elements; ++e) {
    bool found = false;
    for (const auto& set : sets) found = found || std::find(set.begin(), set.end(), e) != set.end();
    if (!found) {
      auto& set = sets[uniform(rng, 0, n_sets - 1)];
      set.push_back(e);
      std::sort(set.begin(), set.end());
    }
  }
  return sets;
}

PipageInput random_pipage_input(std::mt19937_64& rng, int max_colors, bool deadline_only, bool penalties) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PipageInput in;
  Instance& inst = in.instance;
  inst.n_items = uniform(rng, 1, 3);
  inst.horizon = uniform(rng, 3, 10);
  inst.n_colors = uniform(rng, 1, max_colors);
  inst.k0 = 0.5 + quarter(rng, 12);
  for (int i = 0; i < inst.n_items; ++i) inst.k_item.push_back(quarter(rng, 12));

  int first = 1;
  for (int s = 2; s <= inst.horizon + 1; ++s) {
    if (s == inst.horizon + 1 || unit(rng) < 0.35) {
      in.batches.push_back({first, s - 1});
      first = s;
    }
  }
  std::vector<double> y(inst.horizon + 1, 0.0);
  for (auto [a, b] : in.batches) {
    double total = 0.0;
    for (int s = a; s <= b; ++s) {
      y[s] = unit(rng) < 0.2 ? 0.0 : unit(rng);
      total += y[s];
    }
    double mass = 0.3 + 0.7 * unit(rng);
    for (int s = a; s <= b && total > 0.0; ++s) y[s] *= mass / total;
  }

  int n_demands = uniform(rng, 1, 10);
  std::map<std::pair<int, int>, double> item_need;
  for (int k = 0; k < n_demands; ++k) {
    jrp::Demand d;
    d.item = uniform(rng, 0, inst.n_items - 1);
    d.deadline = uniform(rng, 1, inst.horizon);
    int batch_start = 1;
    for (auto [a, b] : in.batches) {
      if (a <= d.deadline && d.deadline <= b) batch_start = a;
    }
    int start = uniform(rng, batch_start, d.deadline);
    d.holding.assign(d.deadline, kInf);
    double h = 0.0;
    for (int s = d.deadline; s >= start; --s) {
      d.holding[s - 1] = h;
      if (!deadline_only) h += quarter(rng, 8);
    }
    d.weights.assign(inst.n_colors, 0.0);
    for (int c = 0; c < inst.n_colors; ++c) d.weights[c] = uniform(rng, 0, 2);
    d.weights[uniform(rng, 0, inst.n_colors - 1)] = uniform(rng, 1, 2);
    d.penalty = penalties ? quarter(rng, 16) : 0.0;
    int index = inst.n_demands();
    inst.demands.push_back(d);
    double served = 0.0;
    for (int s = start; s <= d.deadline; ++s) {
      if (y[s] <= 0.0 || unit(rng) < 0.3) continue;
      double v = unit(rng) < 0.5 ? y[s] : y[s] * (0.2 + 0.8 * unit(rng));
      in.seed.x[{index, s}] = v;
      served += v;
      double& need = item_need[{d.item, s}];
      need = std::max(need, v);
    }
    in.seed.r.push_back(std::max(0.0, 1.0 - served));
  }
  for (auto [key, need] : item_need) {
    double yi = unit(rng) < 0.7 ? need : std::min(y[key.second], need * (1.0 + unit(rng)));
    in.seed.y_item[{key.first, key.second}] = yi;
  }
  for (int s = 1; s <= inst.horizon; ++s) {
    if (y[s] > 0.0) in.seed.y[s] = y[s];
  }
  inst.rejection_limits.assign(inst.n_colors, 0.0);
  for (int d = 0; d < inst.n_demands(); ++d) {
    for (int c = 0; c < inst.n_colors; ++c) inst.rejection_limits[c] += inst.demands[d].weights[c] * in.seed.r[d];
  }
  return in;
}

RoundInput random_round_input(std::mt19937_64& rng, Holding holding, int max_colors, bool penalties,
                              int max_horizon, int max_demands, int max_items) {
  RandomOptions opt;
  opt.holding = holding;
  opt.max_colors = max_colors;
  opt.penalties = penalties;
  opt.min_horizon = 2;
  opt.max_horizon = max_horizon;
  opt.max_demands = max_demands;
  opt.max_items = max_items;
  opt.unique_pairs = false;
  Instance inst = random_instance(rng, opt);
  inst.k0 = 0.0;
  for (double& k : inst.k_item) k += 1.0;
  jrp::LpForm form = holding == Holding::kDeadline ? jrp::LpForm::kDeadline : jrp::LpForm::kFull;
  jrp::LpSolution lp = jrp::solve_extreme(jrp::build_lp(inst, {}, {false, 1.0, form}));
  return {inst, lp.sol};
}

RoundInput chain_input(std::mt19937_64& rng, int horizon, int window, int colors, bool general_holding,
                       bool penalties) {
  std::uniform_int_distribution<int> quarter(1, 4);
  Instance inst;
  inst.n_items = 1;
  inst.horizon = horizon;
  inst.k_item = {1.0 + quarter(rng) / 4.0};
  inst.n_colors = colors;
  jrp::FractionalSolution seed;
  for (int s = 1; s < horizon; ++s) seed.y_item[{0, s}] = 1.0 / window;
  seed.y_item[{0, horizon}] = 1.0;
  auto add = [&](int first, int last, int color, double r) {
    jrp::Demand d;
    d.deadline = last;
    d.holding.assign(last, jrp::kInfeasible);
    for (int s = first; s <= last; ++s) d.holding[s - 1] = general_holding ? (last - s) * quarter(rng) / 8.0 : 0.0;
    d.weights.assign(colors, 0.0);
    if (color >= 0) d.weights[color] = 1.0;
    if (penalties && color >= 0) d.penalty = quarter(rng);
    inst.demands.push_back(d);
    seed.r.push_back(r);
  };
  for (int t = 1; t + window - 1 <= horizon; ++t) add(t, t + window - 1, -1, 0.0);
  add(horizon, horizon, -1, 0.0);
  for (int c = 0; c < colors; ++c) {
    add(c + 1, c + 1, c, 1.0 - 1.0 / window);
    inst.rejection_limits.push_back(1.0 - 1.0 / window);
  }
  for (int s = 1; s <= horizon; ++s) seed.y[s] = 1.0;
  for (int d = 0; d < inst.n_demands(); ++d) {
    const jrp::Demand& dem = inst.demands[d];
    double need = 1.0 - seed.r[d];
    for (int s = dem.deadline; s >= 1 && need > 1e-12; --s) {
      if (!dem.servable_at(s)) continue;
      double v = std::min(need, seed.get_y_item(0, s));
      seed.x[{d, s}] = v;
      need -= v;
    }
  }
  return {inst, seed};
}

}  // namespace testkit
