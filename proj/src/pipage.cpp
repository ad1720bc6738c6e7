#include "jrp/pipage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jrp/linalg.hpp"
#include "jrp/simplex.hpp"

namespace jrp {

namespace {

constexpr double kValueTol = 1e-9;

bool fractional(double v) { return v > kValueTol && v < 1.0 - kValueTol; }

double snap_unit(double v) {
  if (v < kValueTol) return 0.0;
  if (v > 1.0 - kValueTol) return 1.0;
  return v;
}

}  // namespace

double PipageState::served_extent(int d) const {
  double v = 0.0;
  for (const PipageColumn& col : columns) {
    auto it = col.x.find(d);
    if (it != col.x.end()) v += it->second;
  }
  return v;
}

std::vector<double> PipageState::rejected_rows() const {
  std::vector<double> extent(instance->n_demands(), 0.0);
  for (const PipageColumn& col : columns) {
    for (const auto& [d, v] : col.x) extent[d] += v;
  }
  std::vector<double> out(n_rows(), 0.0);
  for (int k = 0; k < n_rows(); ++k) {
    for (int d = 0; d < instance->n_demands(); ++d) out[k] += row_weights[k][d] * std::max(0.0, 1.0 - extent[d]);
  }
  return out;
}

FractionalSolution PipageState::to_fractional() const {
  FractionalSolution sol;
  for (const PipageColumn& col : columns) {
    if (col.y > 0.0) sol.y[col.timestep] += col.y;
    for (const auto& [i, v] : col.item_y) {
      if (v > 0.0) sol.y_item[{i, col.timestep}] += v;
    }
    for (const auto& [d, v] : col.x) {
      if (v > 0.0) sol.x[{d, col.timestep}] += v;
    }
  }
  sol.r.assign(instance->n_demands(), 1.0);
  for (int d = 0; d < instance->n_demands(); ++d) sol.r[d] = std::max(0.0, 1.0 - sol.served_extent(d));
  return sol;
}

FractionalSolution trim(const Instance& instance, const FractionalSolution& sol) {
  FractionalSolution out;
  out.x = sol.x;
  for (const auto& [key, v] : sol.x) {
    if (v <= 0.0) continue;
    int i = instance.demands[key.first].item;
    double& yi = out.y_item[{i, key.second}];
    yi = std::max(yi, std::min(v, sol.get_y_item(i, key.second)));
  }
  for (const auto& [key, v] : out.y_item) {
    double& y = out.y[key.second];
    y = std::max(y, std::min(v, sol.get_y(key.second)));
  }
  out.r.assign(instance.n_demands(), 1.0);
  for (int d = 0; d < instance.n_demands(); ++d) out.r[d] = std::max(0.0, 1.0 - out.served_extent(d));
  out.prune();
  return out;
}

PipageState split_for_pipage(const Instance& instance, const FractionalSolution& trimmed,
                             const std::vector<std::pair<int, int>>& batches) {
  PipageState st;
  st.instance = &instance;
  st.batches = batches;
  for (int c = 0; c < instance.n_colors; ++c) {
    std::vector<double> w(instance.n_demands());
    for (int d = 0; d < instance.n_demands(); ++d) w[d] = instance.demands[d].weights[c];
    st.row_weights.push_back(std::move(w));
    st.row_limits.push_back(instance.rejection_limits[c]);
  }
  if (instance.has_penalties()) {
    std::vector<double> p(instance.n_demands());
    double limit = 0.0;
    for (int d = 0; d < instance.n_demands(); ++d) {
      p[d] = instance.demands[d].penalty;
      limit += p[d] * trimmed.r[d];
    }
    st.row_weights.push_back(std::move(p));
    st.row_limits.push_back(limit);
  }

  auto batch_of = [&](int s) {
    for (int b = 0; b < static_cast<int>(batches.size()); ++b) {
      if (batches[b].first <= s && s <= batches[b].second) return b;
    }
    return -1;
  };
  std::vector<double> batch_mass(batches.size(), 0.0);
  std::map<int, std::vector<std::pair<int, double>>> by_step;
  for (const auto& [key, v] : trimmed.x) {
    if (v > 0.0) by_step[key.second].push_back({key.first, v});
  }
  for (auto& [s, list] : by_step) {
    int b = batch_of(s);
    if (b < 0) throw Error(Errc::kBadInput, "service at timestep " + std::to_string(s) + " outside every batch");
    batch_mass[b] += trimmed.get_y(s);
    std::vector<double> levels;
    for (const auto& [d, v] : list) levels.push_back(v);
    std::sort(levels.begin(), levels.end());
    std::vector<double> distinct;
    for (double v : levels) {
      if (distinct.empty() || v - distinct.back() > 1e-10) distinct.push_back(v);
    }
    double prev = 0.0;
    for (double level : distinct) {
      PipageColumn col;
      col.timestep = s;
      col.batch = b;
      col.y = level - prev;
      for (const auto& [d, v] : list) {
        if (v + 1e-10 >= level) {
          col.x[d] = col.y;
          col.item_y[instance.demands[d].item] = col.y;
        }
      }
      st.columns.push_back(std::move(col));
      prev = level;
    }
  }
  for (double m : batch_mass) {
    if (m > 1.0 + 1e-7) throw Error(Errc::kBadInput, "batch carries more than one order");
  }
  return st;
}

namespace {

// One perturbable value: a column's y (item < 0) or one of its item values.
struct Entity {
  int col = 0;
  int item = -1;
  int group = 0;
};

double entity_value(const PipageState& st, const Entity& e) {
  const PipageColumn& col = st.columns[e.col];
  return e.item < 0 ? col.y : col.item_y.at(e.item);
}

bool tied(const Instance& inst, const Entity& e, int d) { return e.item < 0 || inst.demands[d].item == e.item; }

void set_entity(PipageState& st, const Entity& e, double v) {
  const Instance& inst = *st.instance;
  PipageColumn& col = st.columns[e.col];
  if (e.item < 0) {
    col.y = v;
    for (auto& [i, yi] : col.item_y) yi = v;
  } else {
    col.item_y[e.item] = v;
  }
  for (auto& [d, x] : col.x) {
    if (tied(inst, e, d)) x = v;
  }
}

double entity_cost(const PipageState& st, const Entity& e) {
  const Instance& inst = *st.instance;
  const PipageColumn& col = st.columns[e.col];
  double c = 0.0;
  if (e.item < 0) {
    c += inst.k0;
    for (const auto& [i, yi] : col.item_y) c += inst.k_item[i];
  } else {
    c += inst.k_item[e.item];
  }
  for (const auto& [d, x] : col.x) {
    if (tied(inst, e, d)) c += inst.demands[d].holding_at(col.timestep) - inst.demands[d].penalty;
  }
  return c;
}

double row_coefficient(const PipageState& st, const Entity& e, int k) {
  double c = 0.0;
  for (const auto& [d, x] : st.columns[e.col].x) {
    if (tied(*st.instance, e, d)) c += st.row_weights[k][d];
  }
  return c;
}

double max_drift(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Shared perturbation loop. Groups are batches for column values and
// (item, batch) pairs for item values.
int perturb(PipageState& st, bool items, PipageReport& report, bool trace) {
  const std::vector<double> start_rows = st.rejected_rows();
  const int keep = 2 * st.n_rows();
  int steps = 0;
  while (true) {
    std::vector<Entity> ents;
    std::map<std::pair<int, int>, int> group_index;
    std::vector<double> group_sum;
    std::vector<int> group_fractional;
    auto group_of = [&](int item, int batch) {
      auto [it, fresh] = group_index.try_emplace({item, batch}, static_cast<int>(group_sum.size()));
      if (fresh) {
        group_sum.push_back(0.0);
        group_fractional.push_back(0);
      }
      return it->second;
    };
    for (int c = 0; c < static_cast<int>(st.columns.size()); ++c) {
      const PipageColumn& col = st.columns[c];
      if (!items) {
        int g = group_of(-1, col.batch);
        group_sum[g] += col.y;
        if (fractional(col.y)) {
          ents.push_back({c, -1, g});
          ++group_fractional[g];
        }
        continue;
      }
      for (const auto& [i, v] : col.item_y) {
        int g = group_of(i, col.batch);
        group_sum[g] += v;
        if (fractional(v)) {
          ents.push_back({c, i, g});
          ++group_fractional[g];
        }
      }
    }
    if (static_cast<int>(ents.size()) <= keep) {
      (items ? report.fractional_items_left : report.fractional_orders_left) = static_cast<int>(ents.size());
      break;
    }

    std::vector<int> group_rows;
    for (int g = 0; g < static_cast<int>(group_sum.size()); ++g) {
      if (group_fractional[g] >= 2 || (group_fractional[g] >= 1 && group_sum[g] >= 1.0 - kValueTol)) {
        group_rows.push_back(g);
      }
    }
    const int n = static_cast<int>(ents.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(st.n_rows() + static_cast<int>(group_rows.size()), n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < st.n_rows(); ++k) a(k, j) = row_coefficient(st, ents[j], k);
      for (int g = 0; g < static_cast<int>(group_rows.size()); ++g) {
        if (ents[j].group == group_rows[g]) a(st.n_rows() + g, j) = 1.0;
      }
    }
    std::optional<Eigen::VectorXd> dir = null_vector(a);
    if (!dir) throw Error(Errc::kNullSpaceNotFound, "no perturbation direction for " + std::to_string(n) + " values");
    Eigen::VectorXd delta = *dir;
    double derivative = 0.0;
    for (int j = 0; j < n; ++j) derivative += delta[j] * entity_cost(st, ents[j]);
    if (derivative > 0.0) delta = -delta;

    double alpha = std::numeric_limits<double>::infinity();
    std::string binding;
    for (int j = 0; j < n; ++j) {
      double v = entity_value(st, ents[j]);
      double room = delta[j] > 0.0 ? (1.0 - v) / delta[j] : delta[j] < 0.0 ? v / -delta[j] : alpha;
      if (room < alpha) {
        alpha = room;
        binding = "value " + std::to_string(j);
      }
    }
    std::vector<double> group_delta(group_sum.size(), 0.0);
    for (int j = 0; j < n; ++j) group_delta[ents[j].group] += delta[j];
    for (int g = 0; g < static_cast<int>(group_sum.size()); ++g) {
      if (group_delta[g] > 1e-12) {
        double room = std::max(0.0, 1.0 - group_sum[g]) / group_delta[g];
        if (room < alpha) {
          alpha = room;
          binding = "group " + std::to_string(g);
        }
      }
    }
    if (!std::isfinite(alpha)) throw Error(Errc::kInternal, "unbounded perturbation");
    for (int j = 0; j < n; ++j) {
      if (delta[j] != 0.0) set_entity(st, ents[j], snap_unit(entity_value(st, ents[j]) + alpha * delta[j]));
    }
    ++steps;
    report.max_row_drift = std::max(report.max_row_drift, max_drift(start_rows, st.rejected_rows()));
    if (trace) {
      std::ostringstream line;
      line << (items ? "items" : "orders") << " step=" << steps << " fractional=" << n << " alpha=" << alpha
           << " binding=" << binding << " direction=";
      for (int j = 0; j < n; ++j) line << (j ? "," : "") << delta[j];
      report.trace.push_back(line.str());
    }
    if (steps > 100000) throw Error(Errc::kInternal, "perturbation loop does not terminate");
  }
  return steps;
}

double state_cost(const PipageState& st) { return evaluate(*st.instance, st.to_fractional()).total; }

}  // namespace

void round_candidate_orders(PipageState& st, PipageReport& report, bool trace) {
  report.order_steps += perturb(st, false, report, trace);
  const Instance& inst = *st.instance;
  for (PipageColumn& col : st.columns) {
    if (!fractional(col.y)) continue;
    report.order_roundup += (1.0 - col.y) * inst.k0;
    col.y = 1.0;
  }
}

void round_item_orders(PipageState& st, PipageReport& report, bool trace) {
  for (const PipageColumn& col : st.columns) {
    if (fractional(col.y)) throw Error(Errc::kBadInput, "item rounding needs integral orders");
  }
  report.item_steps += perturb(st, true, report, trace);
  const Instance& inst = *st.instance;
  for (PipageColumn& col : st.columns) {
    for (auto& [i, v] : col.item_y) {
      if (!fractional(v)) continue;
      report.item_roundup += (1.0 - v) * inst.k_item[i];
      v = 1.0;
    }
  }
}

IntegralSolution round_service_vars(const Instance& instance, const std::map<int, std::set<int>>& orders,
                                    const std::vector<double>& limits, std::optional<double> penalty_limit,
                                    const std::vector<int>& fixed_r) {
  IntegralSolution sol = IntegralSolution::empty_for(instance);
  for (const auto& [s, items] : orders) {
    for (int i : items) sol.add_order(s, i);
  }
  LinearProgram lp;
  std::vector<int> column(instance.n_demands(), -1);
  std::vector<int> slot(instance.n_demands(), 0);
  std::vector<double> fixed(instance.n_colors, 0.0);
  double fixed_penalty = 0.0;
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Demand& dem = instance.demands[d];
    for (int s = dem.deadline; s >= 1; --s) {
      if (sol.has_order(s, dem.item) && dem.servable_at(s)) {
        slot[d] = s;
        break;
      }
    }
    int pinned = fixed_r.empty() ? -1 : fixed_r[d];
    if (pinned == 0 && slot[d] == 0) throw Error(Errc::kInfeasible, "demand required to be served has no order");
    if (slot[d] == 0 || pinned == 1) {
      slot[d] = 0;
      for (int c = 0; c < instance.n_colors; ++c) fixed[c] += dem.weights[c];
      fixed_penalty += dem.penalty;
      continue;
    }
    column[d] = lp.add_column(dem.penalty - dem.holding_at(slot[d]), 0.0, pinned == 0 ? 0.0 : 1.0);
  }
  auto add_row = [&](auto weight, double rhs) {
    LpRow row;
    row.sense = Sense::kLe;
    for (int d = 0; d < instance.n_demands(); ++d) {
      if (column[d] >= 0 && weight(d) != 0.0) row.coeffs.push_back({column[d], weight(d)});
    }
    if (rhs < -1e-7) throw Error(Errc::kInfeasible, "fixed schedule rejects too much weight");
    row.rhs = std::max(0.0, rhs);
    if (!row.coeffs.empty()) lp.rows.push_back(std::move(row));
  };
  for (int c = 0; c < instance.n_colors; ++c) {
    add_row([&](int d) { return instance.demands[d].weights[c]; }, limits[c] - fixed[c]);
  }
  if (penalty_limit) add_row([&](int d) { return instance.demands[d].penalty; }, *penalty_limit - fixed_penalty);

  std::vector<double> r(instance.n_demands(), 1.0);
  if (lp.n_cols() > 0) {
    SimplexResult res = solve_lp(lp);
    for (int d = 0; d < instance.n_demands(); ++d) {
      if (column[d] >= 0) r[d] = res.x[column[d]];
    }
  }
  for (int d = 0; d < instance.n_demands(); ++d) {
    // Fractional rejections are rounded down to service.
    sol.disposition[d] = r[d] > 1.0 - kValueTol ? Disposition::rejected() : Disposition::served(slot[d]);
  }
  return sol;
}

double pipage_allowance(const Instance& instance, double k_max, double h_max) {
  double rows = instance.n_colors + (instance.has_penalties() ? 1 : 0);
  return 2.0 * rows * instance.k0 + 2.0 * rows * k_max + rows * h_max;
}

PipageResult pipage_round(const Instance& instance, const FractionalSolution& seed,
                          const std::vector<std::pair<int, int>>& batches, const PipageOptions& options) {
  PipageResult out;
  PipageReport& rep = out.report;
  rep.seed_cost = evaluate(instance, seed).total;
  FractionalSolution trimmed = trim(instance, seed);
  rep.trimmed_cost = evaluate(instance, trimmed).total;
  PipageState st = split_for_pipage(instance, trimmed, batches);
  rep.columns = static_cast<int>(st.columns.size());

  std::vector<double> before = st.rejected_rows();
  round_candidate_orders(st, rep, options.trace);
  round_item_orders(st, rep, options.trace);
  std::vector<double> after = st.rejected_rows();
  for (int k = 0; k < st.n_rows(); ++k) {
    if (after[k] > before[k] + 1e-8) rep.roundup_increased_rejection = true;
  }
  double rounded_cost = state_cost(st);

  std::map<int, std::set<int>> orders;
  for (const PipageColumn& col : st.columns) {
    if (col.y < 1.0) continue;
    for (const auto& [i, v] : col.item_y) {
      if (v >= 1.0) orders[col.timestep].insert(i);
    }
  }
  std::vector<double> limits(instance.n_colors);
  for (int c = 0; c < instance.n_colors; ++c) limits[c] = std::min(instance.rejection_limits[c], after[c]) + 1e-9;
  std::optional<double> penalty_limit;
  if (instance.has_penalties()) penalty_limit = after.back() + 1e-9;
  out.solution = round_service_vars(instance, orders, limits, penalty_limit);
  rep.final_cost = evaluate(instance, out.solution).total;
  rep.service_roundup = std::max(0.0, rep.final_cost - rounded_cost);

  double k_max = options.k_max.value_or(instance.max_item_cost());
  double h_max = options.h_max.value_or(instance.max_finite_holding());
  double bound = rep.seed_cost + pipage_allowance(instance, k_max, h_max);
  if (rep.final_cost > bound + 1e-7 * (1.0 + std::abs(bound))) {
    throw Error(Errc::kInternal, "pipage cost " + std::to_string(rep.final_cost) + " exceeds its bound " +
                                     std::to_string(bound));
  }
  return out;
}

}  // namespace jrp
