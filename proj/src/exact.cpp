#include "jrp/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>

namespace jrp {

namespace {

bool is_integral(double v) { return std::abs(v - std::round(v)) <= 1e-12; }

// Chooses which servable demands to reject given their serve costs. Demands
// with infinite serve cost are always rejected.
class RejectionSolver {
 public:
  explicit RejectionSolver(const Instance& instance) : inst_(instance) {
    integral_ = true;
    for (const Demand& d : inst_.demands) {
      for (double w : d.weights) integral_ = integral_ && is_integral(w);
    }
  }

  // Returns the total serve-or-reject cost, or +inf if the limits cannot be
  // met. When rejected is non-null it receives the chosen set.
  double solve(const std::vector<double>& serve, std::vector<bool>* rejected) const {
    const int C = inst_.n_colors;
    const int n = inst_.n_demands();
    double base = 0.0;
    std::vector<double> room(inst_.rejection_limits);
    std::vector<int> cands;
    if (rejected) rejected->assign(n, false);
    for (int d = 0; d < n; ++d) {
      const Demand& dem = inst_.demands[d];
      if (is_infeasible(serve[d])) {
        base += dem.penalty;
        for (int c = 0; c < C; ++c) room[c] -= dem.weights[c];
        if (rejected) (*rejected)[d] = true;
      } else {
        base += serve[d];
        if (dem.penalty < serve[d]) cands.push_back(d);
      }
    }
    for (int c = 0; c < C; ++c) {
      if (room[c] < -kTol * (1.0 + inst_.rejection_limits[c])) return kInfeasible;
    }
    if (cands.empty()) return base;

    std::vector<int> cap(C);
    double states = 1.0;
    for (int c = 0; c < C; ++c) {
      cap[c] = static_cast<int>(std::floor(std::max(0.0, room[c]) + 1e-9));
      states *= cap[c] + 1.0;
    }
    if (integral_ && states <= 1e6) return base - knapsack(serve, cands, cap, rejected);
    if (cands.size() > 24) throw Error(Errc::kTooLarge, "rejection subset enumeration too large");
    return base - enumerate(serve, cands, room, rejected);
  }

 private:
  double gain(const std::vector<double>& serve, int d) const {
    return serve[d] - inst_.demands[d].penalty;
  }

  double knapsack(const std::vector<double>& serve, const std::vector<int>& cands,
                  const std::vector<int>& cap, std::vector<bool>* rejected) const {
    const int C = inst_.n_colors;
    std::vector<long> stride(C);
    long total = 1;
    for (int c = 0; c < C; ++c) {
      stride[c] = total;
      total *= cap[c] + 1;
    }
    std::vector<double> best(total, 0.0);
    std::vector<std::vector<bool>> take;
    if (rejected) take.assign(cands.size(), std::vector<bool>(total, false));
    std::vector<int> coord(C);
    for (size_t k = 0; k < cands.size(); ++k) {
      const Demand& dem = inst_.demands[cands[k]];
      std::vector<int> w(C);
      long offset = 0;
      bool fits = true;
      for (int c = 0; c < C; ++c) {
        w[c] = static_cast<int>(std::lround(dem.weights[c]));
        if (w[c] > cap[c]) fits = false;
        offset += w[c] * stride[c];
      }
      if (!fits) continue;
      double g = gain(serve, cands[k]);
      // Descending order keeps this a 0/1 update in place.
      for (long idx = total - 1; idx >= 0; --idx) {
        long rest = idx;
        bool ok = true;
        for (int c = C - 1; c >= 0; --c) {
          coord[c] = static_cast<int>(rest / stride[c]);
          rest %= stride[c];
          if (coord[c] < w[c]) ok = false;
        }
        if (!ok) continue;
        double cand = best[idx - offset] + g;
        if (cand > best[idx]) {
          best[idx] = cand;
          if (rejected) take[k][idx] = true;
        }
      }
    }
    if (rejected) {
      long idx = total - 1;
      for (size_t k = cands.size(); k-- > 0;) {
        if (!take[k][idx]) continue;
        (*rejected)[cands[k]] = true;
        for (int c = 0; c < C; ++c) idx -= std::lround(inst_.demands[cands[k]].weights[c]) * stride[c];
      }
    }
    return best[total - 1];
  }

  double enumerate(const std::vector<double>& serve, const std::vector<int>& cands,
                   const std::vector<double>& room, std::vector<bool>* rejected) const {
    const int C = inst_.n_colors;
    const int k = static_cast<int>(cands.size());
    double best = 0.0;
    unsigned long best_mask = 0;
    std::vector<double> used(C);
    for (unsigned long mask = 1; mask < (1UL << k); ++mask) {
      std::fill(used.begin(), used.end(), 0.0);
      double g = 0.0;
      for (int j = 0; j < k; ++j) {
        if (!(mask >> j & 1UL)) continue;
        g += gain(serve, cands[j]);
        for (int c = 0; c < C; ++c) used[c] += inst_.demands[cands[j]].weights[c];
      }
      bool ok = true;
      for (int c = 0; c < C; ++c) {
        if (used[c] > room[c] + kTol * (1.0 + inst_.rejection_limits[c])) ok = false;
      }
      if (ok && g > best) {
        best = g;
        best_mask = mask;
      }
    }
    if (rejected) {
      for (int j = 0; j < k; ++j) {
        if (best_mask >> j & 1UL) (*rejected)[cands[j]] = true;
      }
    }
    return best;
  }

  const Instance& inst_;
  bool integral_ = true;
};

// Demand dispositions for a fixed schedule: served at the last order of the
// item not after the deadline unless rejected.
IntegralSolution realize(const Instance& inst, const std::vector<unsigned>& masks,
                         const std::vector<bool>& rejected) {
  IntegralSolution sol = IntegralSolution::empty_for(inst);
  for (int s = 1; s <= inst.horizon; ++s) {
    for (int i = 0; i < inst.n_items; ++i) {
      if (masks[s - 1] >> i & 1U) sol.add_order(s, i);
    }
  }
  for (int d = 0; d < inst.n_demands(); ++d) {
    const Demand& dem = inst.demands[d];
    if (rejected[d]) {
      sol.disposition[d] = Disposition::rejected();
      continue;
    }
    for (int s = dem.deadline; s >= 1; --s) {
      if (masks[s - 1] >> dem.item & 1U) {
        sol.disposition[d] = Disposition::served(s);
        break;
      }
    }
  }
  return sol;
}

}  // namespace

ExactResult brute_force_opt(const Instance& instance) {
  instance.validate();
  const int T = instance.horizon;
  const int N = instance.n_items;
  if (static_cast<double>(N) * T > std::log2(kBruteForceCap)) {
    throw Error(Errc::kTooLarge, "order schedule space exceeds 2^24");
  }
  RejectionSolver solver(instance);
  std::vector<std::vector<int>> due(T + 1);
  for (int d = 0; d < instance.n_demands(); ++d) due[instance.demands[d].deadline].push_back(d);

  const unsigned n_masks = 1U << N;
  std::vector<double> mask_cost(n_masks, 0.0);
  for (unsigned mask = 1; mask < n_masks; ++mask) {
    mask_cost[mask] = instance.k0;
    for (int i = 0; i < N; ++i) {
      if (mask >> i & 1U) mask_cost[mask] += instance.k_item[i];
    }
  }

  std::map<std::vector<double>, double> memo;
  std::vector<unsigned> masks(T, 0), best_masks;
  std::vector<int> last(N, 0);
  std::vector<double> serve(instance.n_demands(), kInfeasible);
  double best = kInfeasible;

  // Masks are tried in descending order so that among equal-cost schedules
  // the one with the earliest orders is kept.
  std::function<void(int, double)> dfs = [&](int s, double order_cost) {
    if (order_cost >= best) return;
    if (s > T) {
      auto [it, fresh] = memo.try_emplace(serve, 0.0);
      if (fresh) it->second = solver.solve(serve, nullptr);
      double total = order_cost + it->second;
      if (total < best) {
        best = total;
        best_masks = masks;
      }
      return;
    }
    std::vector<int> saved = last;
    for (unsigned mask = n_masks; mask-- > 0;) {
      masks[s - 1] = mask;
      for (int i = 0; i < N; ++i) last[i] = (mask >> i & 1U) ? s : saved[i];
      for (int d : due[s]) {
        int at = last[instance.demands[d].item];
        serve[d] = at == 0 ? kInfeasible : instance.demands[d].holding_at(at);
      }
      dfs(s + 1, order_cost + mask_cost[mask]);
    }
    masks[s - 1] = 0;
    last = saved;
  };
  dfs(1, 0.0);
  if (is_infeasible(best)) throw Error(Errc::kInfeasibleInstance, "no schedule meets the rejection limits");

  std::fill(last.begin(), last.end(), 0);
  for (int s = 1; s <= T; ++s) {
    for (int i = 0; i < N; ++i) {
      if (best_masks[s - 1] >> i & 1U) last[i] = s;
    }
    for (int d : due[s]) {
      int at = last[instance.demands[d].item];
      serve[d] = at == 0 ? kInfeasible : instance.demands[d].holding_at(at);
    }
  }
  std::vector<bool> rejected;
  solver.solve(serve, &rejected);
  ExactResult out;
  out.solution = realize(instance, best_masks, rejected);
  out.cost = evaluate(instance, out.solution).total;
  return out;
}

ExactResult wagner_whitin(const Instance& instance) {
  instance.validate();
  if (instance.n_items != 1) throw Error(Errc::kBadInput, "lot sizing needs exactly one item");
  const int T = instance.horizon;
  for (const Demand& d : instance.demands) {
    if (d.first_servable() == 0) throw Error(Errc::kInfeasibleDemand, "demand has no servable slot");
  }
  ExactResult out;
  out.solution = IntegralSolution::empty_for(instance);
  if (instance.demands.empty()) return out;
  std::vector<std::vector<int>> due(T + 2);
  for (int d = 0; d < instance.n_demands(); ++d) due[instance.demands[d].deadline].push_back(d);
  const double K = instance.k0 + instance.k_item[0];

  int first_due = T + 1;
  for (const Demand& d : instance.demands) first_due = std::min(first_due, d.deadline);
  // cost[s]: cheapest schedule whose last order so far is at s with every
  // demand due before s served.
  std::vector<double> cost(T + 2, kInfeasible);
  std::vector<int> prev(T + 2, 0);
  for (int s = 1; s <= first_due && s <= T; ++s) cost[s] = K;
  for (int s = 1; s <= T; ++s) {
    if (is_infeasible(cost[s])) continue;
    double h = 0.0;
    for (int e = s + 1; e <= T + 1; ++e) {
      for (int d : due[e - 1]) h += instance.demands[d].holding_at(s);
      if (is_infeasible(h)) break;
      double next = cost[s] + h + (e <= T ? K : 0.0);
      if (next < cost[e]) {
        cost[e] = next;
        prev[e] = s;
      }
    }
  }
  if (is_infeasible(cost[T + 1])) throw Error(Errc::kInfeasibleDemand, "no feasible schedule");
  std::vector<int> order_at;
  for (int e = prev[T + 1]; e != 0; e = prev[e]) order_at.push_back(e);
  std::reverse(order_at.begin(), order_at.end());
  for (size_t k = 0; k < order_at.size(); ++k) {
    int s = order_at[k];
    int e = k + 1 < order_at.size() ? order_at[k + 1] : T + 1;
    out.solution.add_order(s, 0);
    for (int t = s; t < e; ++t) {
      for (int d : due[t]) out.solution.disposition[d] = Disposition::served(s);
    }
  }
  out.cost = evaluate(instance, out.solution).total;
  return out;
}

ExactResult single_item_rejection_dp(const Instance& instance) {
  instance.validate();
  if (instance.n_items != 1 || instance.n_colors > 1) {
    throw Error(Errc::kBadInput, "rejection DP needs one item and at most one color");
  }
  const int C = instance.n_colors;
  auto weight = [&](int d) { return C == 0 ? 0.0 : instance.demands[d].weights[0]; };
  for (int d = 0; d < instance.n_demands(); ++d) {
    if (!is_integral(weight(d))) throw Error(Errc::kBadInput, "rejection DP needs integer weights");
  }
  const int T = instance.horizon;
  const int W = C == 0 ? 0 : static_cast<int>(std::floor(instance.rejection_limits[0] + 1e-9));
  const double K = instance.k0 + instance.k_item[0];
  std::vector<std::vector<int>> due(T + 1);
  for (int d = 0; d < instance.n_demands(); ++d) due[instance.demands[d].deadline].push_back(d);

  // Knapsack over the demands due in [s, e), each either served from s (at
  // serve_at = s) or rejected. s = 0 means there is no order to serve from.
  auto extend = [&](std::vector<double>& g, int d, int serve_at) {
    const Demand& dem = instance.demands[d];
    double h = serve_at == 0 ? kInfeasible : dem.holding_at(serve_at);
    int w = static_cast<int>(std::lround(weight(d)));
    std::vector<double> next(W + 1, kInfeasible);
    for (int u = 0; u <= W; ++u) {
      if (is_infeasible(g[u])) continue;
      if (!is_infeasible(h)) next[u] = std::min(next[u], g[u] + h);
      if (u + w <= W) next[u + w] = std::min(next[u + w], g[u] + dem.penalty);
    }
    g = std::move(next);
  };
  // f[s][u]: cheapest cost with last order at s (0: none yet), demands due
  // before s resolved, rejected weight u.
  std::vector<std::vector<double>> f(T + 2, std::vector<double>(W + 1, kInfeasible));
  std::vector<std::vector<std::pair<int, int>>> parent(T + 2, std::vector<std::pair<int, int>>(W + 1, {-1, -1}));
  f[0][0] = 0.0;
  for (int s = 0; s <= T; ++s) {
    std::vector<double> g(W + 1, kInfeasible);
    g[0] = 0.0;
    for (int e = s + 1; e <= T + 1; ++e) {
      for (int d : due[e - 1]) {
        if (e - 1 >= std::max(s, 1)) extend(g, d, s);
      }
      double add = e <= T ? K : 0.0;
      for (int u = 0; u <= W; ++u) {
        if (is_infeasible(f[s][u])) continue;
        for (int v = 0; u + v <= W; ++v) {
          if (is_infeasible(g[v])) continue;
          double c = f[s][u] + g[v] + add;
          if (c < f[e][u + v]) {
            f[e][u + v] = c;
            parent[e][u + v] = {s, u};
          }
        }
      }
    }
  }
  int best_u = -1;
  for (int u = 0; u <= W; ++u) {
    if (!is_infeasible(f[T + 1][u]) && (best_u < 0 || f[T + 1][u] < f[T + 1][best_u])) best_u = u;
  }
  if (best_u < 0) throw Error(Errc::kInfeasibleInstance, "no schedule meets the rejection limit");

  ExactResult out;
  out.solution = IntegralSolution::empty_for(instance);
  int e = T + 1, u = best_u;
  while (e != 0) {
    auto [s, pu] = parent[e][u];
    if (s > 0) out.solution.add_order(s, 0);
    // Recover which demands of the block were rejected.
    std::vector<int> members;
    for (int t = std::max(s, 1); t < e; ++t) {
      for (int d : due[t]) members.push_back(d);
    }
    std::vector<std::vector<double>> table;
    {
      std::vector<double> g(W + 1, kInfeasible);
      g[0] = 0.0;
      table.push_back(g);
      for (int d : members) {
        extend(g, d, s);
        table.push_back(g);
      }
    }
    int v = u - pu;
    for (size_t k = members.size(); k-- > 0;) {
      int d = members[k];
      const Demand& dem = instance.demands[d];
      double h = s == 0 ? kInfeasible : dem.holding_at(s);
      int w = static_cast<int>(std::lround(weight(d)));
      if (!is_infeasible(h) && table[k][v] + h == table[k + 1][v]) {
        out.solution.disposition[d] = Disposition::served(s);
      } else {
        out.solution.disposition[d] = Disposition::rejected();
        v -= w;
      }
    }
    e = s;
    u = pu;
  }
  out.cost = evaluate(instance, out.solution).total;
  return out;
}

SideInformation derive_side_info(const Instance& instance, const IntegralSolution& opt, int m,
                                 bool include_schedule) {
  SideInformation side;
  side.m = m;
  if (m <= 0) return side;
  // (cost, item, timestep), most expensive first.
  std::vector<std::tuple<double, int, int>> orders;
  for (const auto& [s, items] : opt.orders) {
    for (int i : items) orders.emplace_back(instance.k_item[i], i, s);
  }
  std::sort(orders.begin(), orders.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
  });
  if (static_cast<int>(orders.size()) > m) orders.resize(m);
  for (const auto& [k, i, s] : orders) side.forced_item.insert({i, s});
  if (!orders.empty()) {
    double k_max = std::get<0>(orders.back());
    side.k_max = k_max;
    for (int i = 0; i < instance.n_items; ++i) {
      if (instance.k_item[i] <= k_max) continue;
      for (int s = 1; s <= instance.horizon; ++s) {
        if (!side.forced_item.count({i, s})) side.forbidden_item.insert({i, s});
      }
    }
  }

  std::vector<std::tuple<double, int, int, int>> held;  // (cost, item, deadline, demand)
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Disposition& disp = opt.disposition[d];
    if (!disp.is_served()) continue;
    const Demand& dem = instance.demands[d];
    held.emplace_back(dem.holding_at(disp.slot), dem.item, dem.deadline, d);
  }
  std::sort(held.begin(), held.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_tuple(std::get<1>(a), std::get<2>(a), std::get<3>(a)) <
           std::make_tuple(std::get<1>(b), std::get<2>(b), std::get<3>(b));
  });
  if (static_cast<int>(held.size()) > m) held.resize(m);
  for (const auto& [h, i, t, d] : held) side.forced_service.insert({d, opt.disposition[d].slot});
  if (!held.empty()) side.h_max = std::get<0>(held.back());

  if (include_schedule) {
    for (int s = 1; s <= instance.horizon; ++s) {
      if (opt.orders.count(s)) {
        side.forced_general.insert(s);
      } else {
        side.forced_zero_general.insert(s);
      }
    }
  }
  return side;
}

Instance build_set_cover_instance(const std::vector<std::vector<int>>& sets, int n_elements) {
  Instance inst;
  inst.n_items = 1;
  inst.horizon = static_cast<int>(sets.size());
  inst.k0 = 1.0;
  inst.k_item = {0.0};
  inst.n_colors = n_elements;
  std::vector<int> count(n_elements, 0);
  for (int t = 1; t <= inst.horizon; ++t) {
    std::vector<int> elems = sets[t - 1];
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    for (int c : elems) {
      if (c < 0 || c >= n_elements) throw Error(Errc::kBadInput, "set element out of range");
      Demand d;
      d.item = 0;
      d.deadline = t;
      d.holding.assign(t, kInfeasible);
      d.holding[t - 1] = 0.0;
      d.weights.assign(n_elements, 0.0);
      d.weights[c] = 1.0;
      inst.demands.push_back(std::move(d));
      ++count[c];
    }
  }
  for (int c = 0; c < n_elements; ++c) {
    if (count[c] == 0) throw Error(Errc::kBadInput, "element " + std::to_string(c) + " is in no set");
    inst.rejection_limits.push_back(count[c] - 1.0);
  }
  return inst;
}

}  // namespace jrp
