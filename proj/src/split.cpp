#include "jrp/split.hpp"

#include <algorithm>
#include <cmath>

namespace jrp {

bool IgoPlan::is_igo(int t) const { return std::binary_search(igos.begin(), igos.end(), t); }

int IgoPlan::batch_of(int t) const {
  for (int b = 0; b < static_cast<int>(batches.size()); ++b) {
    if (batches[b].first <= t && t <= batches[b].second) return b;
  }
  return -1;
}

int IgoPlan::last_igo_upto(int t) const {
  auto it = std::upper_bound(igos.begin(), igos.end(), t);
  return it == igos.begin() ? 0 : *(it - 1);
}

int IgoPlan::prev_igo(int t) const { return last_igo_upto(t - 1); }

int IgoPlan::next_igo(int t) const {
  auto it = std::upper_bound(igos.begin(), igos.end(), t);
  return it == igos.end() ? horizon + 1 : *it;
}

IgoPlan place_igos(const std::map<int, double>& y, int horizon, double increment) {
  if (!(increment > 0.0 && increment <= 1.0)) throw Error(Errc::kBadInput, "increment must lie in (0, 1]");
  IgoPlan plan;
  plan.horizon = horizon;
  plan.increment = increment;
  plan.z.assign(horizon + 1, 0.0);
  int first_positive = 0;
  for (int t = 1; t <= horizon; ++t) {
    auto it = y.find(t);
    double v = it == y.end() ? 0.0 : it->second;
    plan.z[t] = plan.z[t - 1] + v;
    if (first_positive == 0 && v > kTol) first_positive = t;
  }
  if (first_positive != 0) {
    const double total = plan.z[horizon];
    auto first_reaching = [&](double level) {
      for (int t = 1; t <= horizon; ++t) {
        if (plan.z[t] >= level - kTol) return t;
      }
      return horizon;
    };
    plan.igos.push_back(first_positive);
    int levels = static_cast<int>(std::floor(total / increment + kTol));
    for (int k = 1; k <= levels; ++k) plan.igos.push_back(first_reaching(k * increment));
    plan.igos.push_back(first_reaching(total));
    std::sort(plan.igos.begin(), plan.igos.end());
    plan.igos.erase(std::unique(plan.igos.begin(), plan.igos.end()), plan.igos.end());
  }
  int start = 0;
  for (int t = 1; t <= horizon + 1; ++t) {
    bool open = t <= horizon && !plan.is_igo(t);
    if (open && start == 0) start = t;
    if (!open && start != 0) {
      plan.batches.push_back({start, t - 1});
      start = 0;
    }
  }
  return plan;
}

std::vector<std::pair<int, int>> zero_windows(const Instance& instance) {
  std::vector<std::pair<int, int>> out;
  for (const Demand& d : instance.demands) {
    int first = d.first_servable();
    out.push_back(first == 0 ? std::make_pair(0, 0) : std::make_pair(first, d.deadline));
  }
  return out;
}

namespace {

double sum_item(const FractionalSolution& sol, int i, int from, int to) {
  double v = 0.0;
  for (int s = std::max(from, 1); s <= to; ++s) v += sol.get_y_item(i, s);
  return v;
}

double sum_service(const FractionalSolution& sol, int d, int from, int to) {
  double v = 0.0;
  for (int s = std::max(from, 1); s <= to; ++s) v += sol.get_x(d, s);
  return v;
}

void set_if_positive(std::map<ItemSlot, double>& m, ItemSlot key, double v) {
  if (v > 0.0) m[key] = v;
}

}  // namespace

FractionalSolution shift_to_igos(const Instance& instance, const FractionalSolution& lpsol,
                                 const IgoPlan& plan) {
  FractionalSolution out;
  out.r.assign(instance.n_demands(), 1.0);
  const int L = static_cast<int>(plan.igos.size());
  for (int k = 0; k < L; ++k) {
    int s = plan.igos[k];
    out.y[s] = 1.0;
    int before = k > 0 ? plan.igos[k - 1] : 0;
    int after = k + 1 < L ? plan.igos[k + 1] : plan.horizon + 1;
    for (int i = 0; i < instance.n_items; ++i) {
      set_if_positive(out.y_item, {i, s}, std::min(1.0, sum_item(lpsol, i, before + 1, after - 1)));
    }
  }
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Demand& dem = instance.demands[d];
    int o = plan.last_igo_upto(dem.deadline);
    if (o == 0 || !dem.servable_at(o)) continue;
    double served = 0.0;
    for (int s : plan.igos) {
      if (s > o) break;
      int end = s == o ? dem.deadline : s;
      double v = std::min(sum_service(lpsol, d, plan.prev_igo(s) + 1, end), out.get_y_item(dem.item, s));
      if (v <= 0.0) continue;
      out.x[{d, s}] = v;
      served += v;
    }
    out.r[d] = std::max(0.0, 1.0 - served);
  }
  return out;
}

namespace {

// Copies the values of a solution onto a sub-instance.
FractionalSolution project(const SubInstance& sub, const FractionalSolution& sol,
                           const std::vector<double>& r) {
  FractionalSolution out;
  out.r.assign(sub.demands.size(), 0.0);
  for (int s2 = 1; s2 <= static_cast<int>(sub.timesteps.size()); ++s2) {
    int s = sub.timesteps[s2 - 1];
    double y = sol.get_y(s);
    if (y > 0.0) out.y[s2] = y;
    for (int i = 0; i < sub.instance.n_items; ++i) set_if_positive(out.y_item, {i, s2}, sol.get_y_item(i, s));
  }
  for (int d2 = 0; d2 < static_cast<int>(sub.demands.size()); ++d2) {
    int d = sub.demands[d2];
    const Demand& dem = sub.instance.demands[d2];
    double served = 0.0;
    for (int s2 = 1; s2 <= dem.deadline; ++s2) {
      double v = sol.get_x(d, sub.timesteps[s2 - 1]);
      if (v <= 0.0 || !dem.servable_at(s2)) continue;
      out.x[{d2, s2}] = v;
      served += v;
    }
    out.r[d2] = std::min(1.0, std::max(r[d], 1.0 - served));
  }
  return out;
}

void set_limits(Instance& inst, const Instance& parent, const std::vector<int>& demands,
                const std::vector<double>& r) {
  inst.rejection_limits.assign(parent.n_colors, 0.0);
  for (int d : demands) {
    for (int c = 0; c < parent.n_colors; ++c) inst.rejection_limits[c] += parent.demands[d].weights[c] * r[d];
  }
}

}  // namespace

SplitResult split_instances(const Instance& instance, const FractionalSolution& lpsol,
                            const IgoPlan& plan, const std::vector<std::pair<int, int>>& intervals) {
  SplitResult out;
  std::vector<int> kept2;
  for (int d = 0; d < instance.n_demands(); ++d) {
    auto [first, last] = intervals[d];
    if (first != 0 && plan.last_igo_upto(last) >= first) {
      out.d1.push_back(d);
      continue;
    }
    out.d2.push_back(d);
    if (first == 0) {
      out.rejected_outright.push_back(d);
    } else {
      kept2.push_back(d);
    }
  }

  out.inst1.sub = restrict_instance(instance, plan.igos, out.d1);
  Instance& i1 = out.inst1.sub.instance;
  i1.k0 = 0.0;
  set_limits(i1, instance, out.d1, lpsol.r);
  FractionalSolution shifted = shift_to_igos(instance, lpsol, plan);
  out.inst1.seed = project(out.inst1.sub, shifted, shifted.r);

  std::vector<int> others;
  for (int t = 1; t <= instance.horizon; ++t) {
    if (!plan.is_igo(t)) others.push_back(t);
  }
  out.inst2.sub = restrict_instance(instance, others, kept2);
  Instance& i2 = out.inst2.sub.instance;
  set_limits(i2, instance, kept2, lpsol.r);
  for (const auto& [a, b] : plan.batches) {
    int a2 = static_cast<int>(std::lower_bound(others.begin(), others.end(), a) - others.begin()) + 1;
    out.inst2_batches.push_back({a2, a2 + (b - a)});
  }
  // Service is confined to the batch containing the deadline.
  for (Demand& dem : i2.demands) {
    int start = dem.deadline;
    for (const auto& [a2, b2] : out.inst2_batches) {
      if (a2 <= dem.deadline && dem.deadline <= b2) start = a2;
    }
    for (int s = 1; s < start; ++s) dem.holding[s - 1] = kInfeasible;
  }
  out.inst2.seed = project(out.inst2.sub, lpsol, lpsol.r);
  return out;
}

namespace {

NlpSolution nlp_base(const Instance& instance, const FractionalSolution& lpsol, const IgoPlan& plan) {
  NlpSolution out;
  FractionalSolution& sol = out.sol;
  for (const auto& [s, v] : lpsol.y) {
    if (!plan.is_igo(s)) sol.y[s] = v;
  }
  for (const auto& [key, v] : lpsol.y_item) {
    if (!plan.is_igo(key.second)) sol.y_item[key] = v;
  }
  for (int s : plan.igos) sol.y[s] = 1.0;
  sol.r.assign(instance.n_demands(), 1.0);
  out.x_left.assign(instance.n_demands(), 0.0);
  out.x_right.assign(instance.n_demands(), 0.0);
  return out;
}

// Keeps the service after the last IGO and records the served extents.
void finish_demand(NlpSolution& out, const FractionalSolution& lpsol, int d, int o, int deadline,
                   double left) {
  double right = 0.0;
  for (int s = o + 1; s <= deadline; ++s) {
    double v = lpsol.get_x(d, s);
    if (v <= 0.0) continue;
    out.sol.x[{d, s}] = v;
    right += v;
  }
  out.x_left[d] = std::min(1.0, left);
  out.x_right[d] = std::min(1.0, right);
  double served = out.x_right[d] + (1.0 - out.x_right[d]) * out.x_left[d];
  out.sol.r[d] = std::max(0.0, 1.0 - served);
}

}  // namespace

NlpSolution build_nlp_scaled(const Instance& instance, const FractionalSolution& lpsol,
                             const IgoPlan& plan) {
  const double beta = plan.increment;
  if (!(beta > 0.0 && beta < 1.0)) throw Error(Errc::kBadInput, "scaled construction needs increment in (0, 1)");
  const double scale = 1.0 / (1.0 - beta);
  NlpSolution out = nlp_base(instance, lpsol, plan);
  for (int s : plan.igos) {
    int from = plan.prev_igo(s) + 1;
    for (int i = 0; i < instance.n_items; ++i) {
      set_if_positive(out.sol.y_item, {i, s}, std::min(1.0, scale * sum_item(lpsol, i, from, s)));
    }
  }
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Demand& dem = instance.demands[d];
    int o = plan.last_igo_upto(dem.deadline);
    double left = 0.0;
    for (int s : plan.igos) {
      if (s > o) break;
      double v = std::min(scale * sum_service(lpsol, d, plan.prev_igo(s) + 1, s),
                          out.sol.get_y_item(dem.item, s));
      if (v <= 0.0) continue;
      out.sol.x[{d, s}] = v;
      left += v;
    }
    finish_demand(out, lpsol, d, o, dem.deadline, left);
  }
  return out;
}

NlpSolution build_nlp_bidirectional(const Instance& instance, const FractionalSolution& lpsol,
                                    const IgoPlan& plan) {
  const double beta = plan.increment;
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(Errc::kBadInput, "bidirectional construction needs increment in (0, 1)");
  }
  NlpSolution out = nlp_base(instance, lpsol, plan);
  for (int s : plan.igos) {
    int from = plan.prev_igo(s) + 1;
    int to = std::min(plan.next_igo(s), plan.horizon);
    for (int i = 0; i < instance.n_items; ++i) {
      set_if_positive(out.sol.y_item, {i, s}, std::min(1.0, sum_item(lpsol, i, from, to)));
    }
  }
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Demand& dem = instance.demands[d];
    int o = plan.last_igo_upto(dem.deadline);
    double left = 0.0;
    double before = sum_service(lpsol, d, 1, o);
    double after = sum_service(lpsol, d, o + 1, dem.deadline);
    for (int s : plan.igos) {
      if (s > o) break;
      double v = sum_service(lpsol, d, plan.prev_igo(s) + 1, s);
      if (s == o) v += std::min(after, beta / (1.0 - beta) * before);
      v = std::min(v, out.sol.get_y_item(dem.item, s));
      if (v <= 0.0) continue;
      out.sol.x[{d, s}] = v;
      left += v;
    }
    finish_demand(out, lpsol, d, o, dem.deadline, left);
  }
  return out;
}

double scaled_factor(double a, double c) { return 2.0 + 2.0 * std::sqrt(a * (1.0 - a)) - c; }

double bidirectional_factor(double a, double c) { return 3.0 + 2.0 * std::sqrt(a * c) - a - 2.0 * c; }

BetaChoice choose_beta(double a, double c) {
  const double kLo = 1e-3;
  auto clamp = [kLo](double b) { return std::clamp(b, kLo, 1.0 - kLo); };
  auto from_ratio = [](double q) { return std::sqrt(q) / (1.0 + std::sqrt(q)); };
  BetaChoice out;
  out.beta1 = a >= 1.0 ? 1.0 - kLo : clamp(from_ratio(a / (1.0 - a)));
  out.beta2 = c <= 0.0 ? 0.5 : clamp(from_ratio(a / c));
  out.predicted = std::min(scaled_factor(a, c), bidirectional_factor(a, c));
  return out;
}

double maximin_factor(int grid) {
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    double a = static_cast<double>(i) / (grid - 1);
    for (int j = 0; i + j < grid; ++j) {
      double c = static_cast<double>(j) / (grid - 1);
      best = std::max(best, std::min(scaled_factor(a, c), bidirectional_factor(a, c)));
    }
  }
  return best;
}

double deadline_mix_factor(double a, double b) { return std::min(2 * a + 3 * b, 4 * a + 2.5 * b); }

}  // namespace jrp
