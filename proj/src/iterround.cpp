#include "jrp/iterround.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "jrp/linalg.hpp"
#include "jrp/pipage.hpp"

namespace jrp {

namespace {

constexpr double kTau = 1e-9;

bool fractional(double v) { return v > kTau && v < 1.0 - kTau; }

double snap_unit(double v) {
  if (v < kTau) return 0.0;
  if (v > 1.0 - kTau) return 1.0;
  return v;
}

int owner_item(const Instance& inst, const VarKey& key) {
  switch (key.kind) {
    case VarKind::kGeneral: return -1;
    case VarKind::kItem: return key.a;
    case VarKind::kService:
    case VarKind::kReject: return inst.demands[key.a].item;
  }
  return -1;
}

double fractional_mass(const FractionalSolution& sol, int item, int horizon) {
  double m = 0.0;
  for (int s = 1; s <= horizon; ++s) {
    double v = sol.get_y_item(item, s);
    if (fractional(v)) m += v;
  }
  return m;
}

// One post-split piece of a fractional item slot; served demands have
// x = y on it.
struct Piece {
  int timestep = 0;
  int batch = 0;
  double y = 0.0;
  std::vector<int> served;
};

class Rounder {
 public:
  Rounder(const Instance& inst, const FractionalSolution& seed, const IterRoundOptions& opt, IterRoundReport& rep)
      : inst_(inst), opt_(opt), rep_(rep) {
    rows_ = inst.n_colors + (inst.has_penalties() ? 1 : 0);
    rep_.rows = rows_;
    single_ = !opt.force_general && inst.is_deadline_only() && rows_ == 1;
    LpBuildOptions build;
    build.form = inst.is_deadline_only() ? LpForm::kDeadline : LpForm::kFull;
    build.perturb_holding = build.form == LpForm::kFull;
    build.epsilon = opt.epsilon;
    SideInformation side;
    for (int s = 1; s <= inst.horizon; ++s) side.forced_general.insert(s);
    base_ = build_lp(inst, side, build);

    for (int i = 0; i < inst.n_items; ++i) {
      for (int s = 1; s <= inst.horizon; ++s) {
        int j = base_.find(VarKey::item(i, s));
        double v = seed.get_y_item(i, s);
        if (inst.k_item[i] <= 0.0) {
          base_.fix(j, 1.0);
        } else if (v <= kTau) {
          base_.fix(j, 0.0);
        } else if (v >= 1.0 - kTau) {
          base_.fix(j, 1.0);
        }
      }
    }
    fixed_r_.assign(inst.n_demands(), -1);
    double penalty = 0.0;
    for (int d = 0; d < inst.n_demands(); ++d) {
      double r = seed.r[d];
      penalty += inst.demands[d].penalty * r;
      if (r <= kTau) fixed_r_[d] = 0;
      if (r >= 1.0 - kTau) fixed_r_[d] = 1;
      if (fixed_r_[d] >= 0) base_.fix(base_.find(VarKey::reject(d)), fixed_r_[d]);
    }
    if (inst.has_penalties()) {
      LpRow row{{}, Sense::kLe, penalty + 1e-9};
      for (int d = 0; d < inst.n_demands(); ++d) {
        if (inst.demands[d].penalty != 0.0) row.coeffs.push_back({base_.find(VarKey::reject(d)), inst.demands[d].penalty});
      }
      persistent_.push_back(std::move(row));
    }
  }

  IntegralSolution run() {
    LPModel model = base_;
    model.extra_rows = persistent_;
    cur_ = solve(model).sol;
    for (int s = 1; s <= inst_.horizon; ++s) cur_.y[s] = 1.0;
    for (int d = 0; d < inst_.n_demands(); ++d) normalize(d);
    snap(cur_, kTau);
    rep_.lp_cost = evaluate(inst_, cur_).total;
    rep_.initial_multibatches = static_cast<int>(find_multibatches(cur_, inst_.n_items, inst_.horizon).size());
    rep_.max_multibatches = rep_.initial_multibatches;
    rep_.initial_lean = check_lean(inst_, cur_).ok();
    rep_.all_lean = rep_.initial_lean;
    log("initial LP cost " + fmt(rep_.lp_cost) + ", multibatches " + std::to_string(rep_.initial_multibatches));

    for (int i = 0; i < inst_.n_items; ++i) {
      if (fractional_mass(cur_, i, inst_.horizon) <= 0.0) {
        fix_item(i);
        continue;
      }
      round_item(i);
    }

    std::map<int, std::set<int>> orders;
    for (const auto& [is, v] : cur_.y_item) {
      if (v >= 1.0 - kTau) orders[is.second].insert(is.first);
    }
    std::vector<double> rejected = rejected_weight(inst_, cur_);
    std::vector<double> limits(inst_.n_colors);
    for (int c = 0; c < inst_.n_colors; ++c) limits[c] = std::min(inst_.rejection_limits[c], rejected[c]) + 1e-9;
    std::optional<double> penalty_limit;
    if (inst_.has_penalties()) {
      double p = 0.0;
      for (int d = 0; d < inst_.n_demands(); ++d) p += inst_.demands[d].penalty * cur_.r[d];
      penalty_limit = p + 1e-9;
    }
    double before = evaluate(inst_, cur_).total;
    IntegralSolution out = round_service_vars(inst_, orders, limits, penalty_limit, fixed_r_);
    rep_.final_cost = evaluate(inst_, out).total;
    rep_.service_extra = rep_.final_cost - before;
    log("service rounding " + fmt(before) + " -> " + fmt(rep_.final_cost));
    return out;
  }

 private:
  const Instance& inst_;
  const IterRoundOptions& opt_;
  IterRoundReport& rep_;
  int rows_ = 0;
  bool single_ = false;
  LPModel base_;
  std::vector<LpRow> persistent_;
  std::vector<int> fixed_r_;
  FractionalSolution cur_;

  static std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  void log(const std::string& line) {
    if (opt_.trace) rep_.trace.push_back(line);
  }

  LpSolution solve(const LPModel& model) {
    try {
      return solve_extreme(model);
    } catch (const Error& e) {
      if (e.code() == Errc::kInfeasible) throw Error(Errc::kLpInfeasibleAfterConstraints, e.what());
      throw;
    }
  }

  // Drops rejection the demand does not need, then service beyond 1 from
  // the earliest slots. Never raises cost.
  void normalize(int d) {
    const Demand& dem = inst_.demands[d];
    double served = cur_.served_extent(d);
    double& r = cur_.r[d];
    if (fixed_r_[d] < 0) r = std::min(r, std::max(0.0, 1.0 - served));
    double excess = served + r - 1.0;
    for (int s = 1; s <= dem.deadline && excess > kTau; ++s) {
      auto it = cur_.x.find({d, s});
      if (it == cur_.x.end()) continue;
      double cut = std::min(it->second, excess);
      it->second -= cut;
      excess -= cut;
      if (it->second <= kTau) cur_.x.erase(it);
    }
    if (fixed_r_[d] < 0 && served + r < 1.0) r = std::min(1.0, 1.0 - cur_.served_extent(d));
  }

  void fix_item(int i) {
    for (int s = 1; s <= inst_.horizon; ++s) {
      base_.fix(base_.find(VarKey::item(i, s)), snap_unit(cur_.get_y_item(i, s)));
    }
  }

  // Re-solves with every variable outside item i pinned at its current value.
  void resolve(int i, const std::vector<LpRow>& rows, const std::set<int>& roundups) {
    LPModel model = base_;
    for (int j = 0; j < model.n_vars(); ++j) {
      const VarKey& key = model.vars[j];
      int owner = owner_item(inst_, key);
      if (owner < 0 || owner == i) continue;
      double v = 0.0;
      if (key.kind == VarKind::kItem) v = cur_.get_y_item(key.a, key.b);
      if (key.kind == VarKind::kService) v = cur_.get_x(key.a, key.b);
      if (key.kind == VarKind::kReject) v = cur_.r[key.a];
      model.fix(j, std::clamp(v, 0.0, 1.0));
    }
    for (int s : roundups) model.fix(model.find(VarKey::item(i, s)), 1.0);
    model.extra_rows = persistent_;
    model.extra_rows.insert(model.extra_rows.end(), rows.begin(), rows.end());
    FractionalSolution next = solve(model).sol;

    for (int s = 1; s <= inst_.horizon; ++s) {
      double v = snap_unit(next.get_y_item(i, s));
      if (v > 0.0) {
        cur_.y_item[{i, s}] = v;
      } else {
        cur_.y_item.erase({i, s});
      }
    }
    for (int d = 0; d < inst_.n_demands(); ++d) {
      const Demand& dem = inst_.demands[d];
      if (dem.item != i) continue;
      for (int s = 1; s <= dem.deadline; ++s) {
        double v = snap_unit(next.get_x(d, s));
        if (v > 0.0) {
          cur_.x[{d, s}] = v;
        } else {
          cur_.x.erase({d, s});
        }
      }
      cur_.r[d] = snap_unit(next.r[d]);
      normalize(d);
    }
    int mbs = static_cast<int>(find_multibatches(cur_, inst_.n_items, inst_.horizon, i).size());
    rep_.max_multibatches = std::max(rep_.max_multibatches, mbs);
    if (!check_lean(inst_, cur_).ok()) rep_.all_lean = false;
  }

  LpRow interval_row(int i, int first, int last) const {
    LpRow row{{}, Sense::kGe, 1.0};
    for (int s = first; s <= last; ++s) row.coeffs.push_back({base_.find(VarKey::item(i, s)), 1.0});
    return row;
  }

  void round_item(int i) {
    ItemRounding ir;
    ir.item = i;
    ir.single_path = single_;
    std::vector<LpRow> rows;
    std::set<int> roundups;
    resolve(i, rows, roundups);
    ir.cost_before = evaluate(inst_, cur_).total;
    if (single_) {
      auto [s1, s2] = fractional_span(i);
      for (int s = s1; s >= 1 && s <= s2; ++s) ir.q_init += cur_.get_y_item(i, s);
    } else {
      for (int s = 1; s <= inst_.horizon; ++s) ir.q_init += cur_.get_y_item(i, s);
    }
    log("item " + std::to_string(i) + (single_ ? " single" : " general") + " path, Q " + fmt(ir.q_init));

    for (int guard = 0; guard < 10000; ++guard) {
      bool stepped = single_ ? single_step(i, rows, roundups) : general_step(i, rows, roundups);
      if (!stepped) break;
      ++ir.iterations;
    }
    finish(i, ir);
    fix_item(i);
    ir.cost_after = evaluate(inst_, cur_).total;
    log("item " + std::to_string(i) + " extra " + fmt(ir.extra()));
    rep_.items.push_back(ir);
  }

  std::pair<int, int> fractional_span(int i) const {
    int s1 = 0, s2 = -1;
    for (int s = 1; s <= inst_.horizon; ++s) {
      if (!fractional(cur_.get_y_item(i, s))) continue;
      if (s1 == 0) s1 = s;
      s2 = s;
    }
    return {s1, s2};
  }

  bool single_step(int i, std::vector<LpRow>& rows, std::set<int>& roundups) {
    auto [s1, s2] = fractional_span(i);
    if (s1 == 0) return false;
    double z = 0.0;
    for (int s = s1; s <= s2; ++s) z += cur_.get_y_item(i, s);
    if (z <= 4.0 + kTau) return false;
    int mid = s2;
    double acc = 0.0;
    for (int s = s1; s <= s2; ++s) {
      acc += cur_.get_y_item(i, s);
      if (acc >= z / 2.0 - kTau) {
        mid = s;
        break;
      }
    }
    IterationRecord rec{i, s1, s2, z, {mid}, fractional_mass(cur_, i, inst_.horizon)};
    for (auto [a, b] : unit_intervals(cur_, i, s1, mid - 1)) rows.push_back(interval_row(i, a, b));
    for (auto [a, b] : unit_intervals(cur_, i, mid + 1, s2)) rows.push_back(interval_row(i, a, b));
    roundups.insert(mid);
    resolve(i, rows, roundups);
    rec.mass_after = fractional_mass(cur_, i, inst_.horizon);
    rec.multibatches_after = static_cast<int>(find_multibatches(cur_, inst_.n_items, inst_.horizon, i).size());
    log("  round up " + std::to_string(mid) + ", mass " + fmt(rec.mass_before) + " -> " + fmt(rec.mass_after));
    rep_.iterations.push_back(rec);
    return true;
  }

  bool general_step(int i, std::vector<LpRow>& rows, std::set<int>& roundups) {
    std::vector<Multibatch> mbs = find_multibatches(cur_, inst_.n_items, inst_.horizon, i);
    if (mbs.empty()) return false;
    const Multibatch& big =
        *std::max_element(mbs.begin(), mbs.end(), [](const auto& a, const auto& b) { return a.size < b.size; });
    const double z = big.size;
    if (z < 16.0 * (rows_ + 1) - kTau) return false;
    std::vector<std::pair<int, int>> intervals = unit_intervals(cur_, i, big.first, big.last);
    const int a = interval_group_size(z, rows_);
    IterationRecord rec{i, big.first, big.last, z, {}, fractional_mass(cur_, i, inst_.horizon)};
    for (int j = 1; j <= 2 * rows_ + 1; ++j) {
      std::size_t k = static_cast<std::size_t>(j) * (a + 1);
      if (k > intervals.size()) break;
      int t = intervals[k - 1].second;
      rec.rounded.push_back(t);
      roundups.insert(t);
    }
    for (auto [lo, hi] : intervals) {
      auto it = roundups.lower_bound(lo);
      if (it != roundups.end() && *it <= hi) continue;
      rows.push_back(interval_row(i, lo, hi));
    }
    double total = 0.0;
    for (int s = 1; s <= inst_.horizon; ++s) total += roundups.count(s) ? 1.0 : cur_.get_y_item(i, s);
    // Only the latest cost cap is kept.
    std::vector<LpRow> with_cap = rows;
    LpRow cap{{}, Sense::kLe, total + 1e-9};
    for (int s = 1; s <= inst_.horizon; ++s) cap.coeffs.push_back({base_.find(VarKey::item(i, s)), 1.0});
    with_cap.push_back(cap);
    resolve(i, with_cap, roundups);
    rec.mass_after = fractional_mass(cur_, i, inst_.horizon);
    rec.multibatches_after = static_cast<int>(find_multibatches(cur_, inst_.n_items, inst_.horizon, i).size());
    log("  multibatch [" + std::to_string(big.first) + ", " + std::to_string(big.last) + "] size " + fmt(z) +
        ", " + std::to_string(rec.rounded.size()) + " round-ups, mass " + fmt(rec.mass_before) + " -> " +
        fmt(rec.mass_after));
    rep_.iterations.push_back(rec);
    return true;
  }

  // Anchors each multibatch at its unit-mass crossings, moves each demand's
  // early service onto its last anchor, then perturbs the remaining
  // fractional pieces with the anchored amounts as extra variables.
  void finish(int i, ItemRounding& ir) {
    const double k_item = inst_.k_item[i];
    const int T = inst_.horizon;
    for (const Multibatch& b : find_multibatches(cur_, inst_.n_items, T, i)) {
      double z = 0.0;
      int next = 0;
      for (int t = b.first; t <= b.last; ++t) {
        z += cur_.get_y_item(i, t);
        if (z < next - kTau) continue;
        while (z >= next - kTau) ++next;
        cur_.y_item[{i, t}] = 1.0;
        ++ir.anchors;
      }
    }
    std::vector<char> one(T + 1, 0);
    std::vector<int> batch_of(T + 1, 0);
    int ones = 0;
    for (int s = 1; s <= T; ++s) {
      one[s] = cur_.get_y_item(i, s) >= 1.0 - kTau;
      if (one[s]) ++ones;
      batch_of[s] = ones;
    }

    std::vector<int> demands;
    std::vector<int> anchor(inst_.n_demands(), 0);
    std::vector<double> amount(inst_.n_demands(), 0.0);
    for (int d = 0; d < inst_.n_demands(); ++d) {
      const Demand& dem = inst_.demands[d];
      if (dem.item != i) continue;
      demands.push_back(d);
      int o = 0;
      for (int s = dem.deadline; s >= 1; --s) {
        if (one[s]) {
          o = s;
          break;
        }
      }
      if (o == 0) continue;
      double a = 0.0;
      for (int s = 1; s <= o; ++s) {
        auto it = cur_.x.find({d, s});
        if (it == cur_.x.end()) continue;
        a += it->second;
        cur_.x.erase(it);
      }
      anchor[d] = o;
      amount[d] = std::min(1.0, a);
    }

    // Trim and split the fractional slots into pieces.
    std::vector<Piece> pieces;
    for (int s = 1; s <= T; ++s) {
      if (one[s]) continue;
      std::vector<std::pair<double, int>> level;
      for (int d : demands) {
        double v = cur_.get_x(d, s);
        if (v > kTau) level.push_back({v, d});
      }
      std::sort(level.begin(), level.end());
      double prev = 0.0;
      for (std::size_t k = 0; k < level.size(); ++k) {
        if (level[k].first <= prev + kTau) continue;
        Piece p{s, batch_of[s], level[k].first - prev, {}};
        for (std::size_t m = k; m < level.size(); ++m) p.served.push_back(level[m].second);
        pieces.push_back(std::move(p));
        prev = level[k].first;
      }
    }

    // free: rejection moves with service. Anchored demands keep their
    // total service through their anchor; pinned ones keep it directly.
    auto is_anchored = [&](int d) { return fractional(amount[d]); };
    auto is_free = [&](int d) { return !is_anchored(d) && fixed_r_[d] < 0 && amount[d] <= 0.0; };
    std::vector<std::vector<double>> weights(rows_, std::vector<double>(inst_.n_demands(), 0.0));
    for (int d : demands) {
      for (int c = 0; c < inst_.n_colors; ++c) weights[c][d] = inst_.demands[d].weights[c];
      if (inst_.has_penalties()) weights[rows_ - 1][d] = inst_.demands[d].penalty;
    }

    for (int guard = 0; guard < 100000; ++guard) {
      std::vector<int> frac;
      for (int p = 0; p < static_cast<int>(pieces.size()); ++p) {
        if (fractional(pieces[p].y)) frac.push_back(p);
      }
      if (static_cast<int>(frac.size()) <= 2 * rows_) break;
      std::vector<int> gammas;
      for (int d : demands) {
        if (is_anchored(d)) gammas.push_back(d);
      }
      std::map<int, double> batch_mass;
      std::map<int, int> batch_frac;
      for (const Piece& p : pieces) batch_mass[p.batch] += p.y;
      for (int p : frac) ++batch_frac[pieces[p].batch];

      const int n = static_cast<int>(frac.size() + gammas.size());
      std::vector<std::vector<double>> mat;
      for (int k = 0; k < rows_; ++k) {
        std::vector<double> row(n, 0.0);
        for (std::size_t e = 0; e < frac.size(); ++e) {
          for (int d : pieces[frac[e]].served) {
            if (is_free(d)) row[e] += weights[k][d];
          }
        }
        mat.push_back(std::move(row));
      }
      for (auto [b, cnt] : batch_frac) {
        if (cnt < 2 && batch_mass[b] < 1.0 - kTau) continue;
        std::vector<double> row(n, 0.0);
        for (std::size_t e = 0; e < frac.size(); ++e) {
          if (pieces[frac[e]].batch == b) row[e] = 1.0;
        }
        mat.push_back(std::move(row));
      }
      for (int d : demands) {
        bool anchored = is_anchored(d);
        if (!anchored && !(fixed_r_[d] == 0 && amount[d] <= 0.0)) continue;
        std::vector<double> row(n, 0.0);
        bool any = false;
        for (std::size_t e = 0; e < frac.size(); ++e) {
          const auto& sv = pieces[frac[e]].served;
          if (std::find(sv.begin(), sv.end(), d) != sv.end()) {
            row[e] = 1.0;
            any = true;
          }
        }
        if (anchored) {
          auto g = std::find(gammas.begin(), gammas.end(), d) - gammas.begin();
          row[frac.size() + g] = 1.0;
        }
        if (any || anchored) mat.push_back(std::move(row));
      }
      Eigen::MatrixXd a(static_cast<Eigen::Index>(mat.size()), n);
      for (std::size_t r = 0; r < mat.size(); ++r) {
        for (int c = 0; c < n; ++c) a(static_cast<Eigen::Index>(r), c) = mat[r][c];
      }
      std::optional<Eigen::VectorXd> dir = null_vector(a);
      if (!dir) {
        ir.direction_missing = true;
        break;
      }
      Eigen::VectorXd v = *dir;
      double slope = 0.0;
      for (std::size_t e = 0; e < frac.size(); ++e) {
        const Piece& p = pieces[frac[e]];
        double g = k_item;
        for (int d : p.served) {
          g += inst_.demands[d].holding_at(p.timestep);
          if (is_free(d)) g -= inst_.demands[d].penalty;
        }
        slope += g * v[static_cast<Eigen::Index>(e)];
      }
      for (std::size_t g = 0; g < gammas.size(); ++g) {
        int d = gammas[g];
        slope += inst_.demands[d].holding_at(anchor[d]) * v[static_cast<Eigen::Index>(frac.size() + g)];
      }
      if (slope > 0.0) v = -v;

      double step = std::numeric_limits<double>::infinity();
      auto bound = [&](double value, double dv) {
        if (dv > 1e-12) step = std::min(step, (1.0 - value) / dv);
        if (dv < -1e-12) step = std::min(step, value / -dv);
      };
      std::map<int, double> batch_rate;
      for (std::size_t e = 0; e < frac.size(); ++e) {
        bound(pieces[frac[e]].y, v[static_cast<Eigen::Index>(e)]);
        batch_rate[pieces[frac[e]].batch] += v[static_cast<Eigen::Index>(e)];
      }
      for (std::size_t g = 0; g < gammas.size(); ++g) bound(amount[gammas[g]], v[static_cast<Eigen::Index>(frac.size() + g)]);
      for (auto [b, rate] : batch_rate) {
        if (rate > 1e-12) step = std::min(step, std::max(0.0, 1.0 - batch_mass[b]) / rate);
      }
      if (!std::isfinite(step)) {
        ir.direction_missing = true;
        break;
      }
      for (std::size_t e = 0; e < frac.size(); ++e) {
        Piece& p = pieces[frac[e]];
        p.y = snap_unit(p.y + step * v[static_cast<Eigen::Index>(e)]);
      }
      for (std::size_t g = 0; g < gammas.size(); ++g) {
        int d = gammas[g];
        amount[d] = snap_unit(amount[d] + step * v[static_cast<Eigen::Index>(frac.size() + g)]);
      }
      ++ir.pipage_steps;
    }
    for (Piece& p : pieces) {
      if (fractional(p.y)) {
        p.y = 1.0;
        ++ir.pipage_roundups;
      }
    }

    // Write the pieces back; each slot is ordered iff one of its pieces is.
    for (int s = 1; s <= T; ++s) {
      if (!one[s]) cur_.y_item.erase({i, s});
      for (int d : demands) {
        if (!one[s]) cur_.x.erase({d, s});
      }
    }
    for (const Piece& p : pieces) {
      if (p.y <= 0.0) continue;
      cur_.y_item[{i, p.timestep}] = 1.0;
      for (int d : p.served) {
        double& x = cur_.x[{d, p.timestep}];
        x = std::min(1.0, x + p.y);
      }
    }
    for (int d : demands) {
      if (anchor[d] > 0 && amount[d] > 0.0) cur_.x[{d, anchor[d]}] = amount[d];
      normalize(d);
    }
  }
};

}  // namespace

std::vector<Multibatch> find_multibatches(const FractionalSolution& sol, int n_items, int horizon, int item) {
  std::vector<Multibatch> out;
  for (int i = 0; i < n_items; ++i) {
    if (item >= 0 && i != item) continue;
    Multibatch cur{i, 0, 0, 0.0};
    auto flush = [&]() {
      if (cur.first > 0) out.push_back(cur);
      cur = {i, 0, 0, 0.0};
    };
    for (int s = 1; s <= horizon; ++s) {
      double v = sol.get_y_item(i, s);
      if (v >= 1.0 - kTau) {
        flush();
        continue;
      }
      if (v <= kTau) continue;
      if (cur.first == 0) {
        cur.first = s;
        cur.size = v;
      } else {
        cur.size += v;
      }
      cur.last = s;
    }
    flush();
  }
  return out;
}

std::vector<std::pair<int, int>> unit_intervals(const FractionalSolution& sol, int item, int first, int last) {
  std::vector<std::pair<int, int>> out;
  double acc = 0.0;
  int start = first;
  for (int t = first; t <= last; ++t) {
    acc += sol.get_y_item(item, t);
    if (acc >= 1.0 - kTau) {
      out.push_back({start, t});
      start = t + 1;
      acc = 0.0;
    }
  }
  return out;
}

LeanReport check_lean(const Instance& instance, const FractionalSolution& sol, double tol) {
  LeanReport rep;
  for (int d = 0; d < instance.n_demands(); ++d) {
    const Demand& dem = instance.demands[d];
    double gap = sol.served_extent(d) + sol.r[d] - 1.0;
    if (std::abs(gap) > tol) rep.violations.push_back({d, 0, gap});
    int first = 0;
    for (int s = 1; s <= dem.deadline; ++s) {
      if (sol.get_x(d, s) > tol) {
        first = s;
        break;
      }
    }
    if (first == 0) continue;
    for (int s = first + 1; s <= dem.deadline; ++s) {
      if (!dem.servable_at(s)) continue;
      double g = sol.get_x(d, s) - sol.get_y_item(dem.item, s);
      if (std::abs(g) > tol) rep.violations.push_back({d, s, g});
    }
  }
  return rep;
}

IterRoundResult iterative_round(const Instance& instance, const FractionalSolution& seed,
                                const IterRoundOptions& options) {
  instance.validate();
  if (static_cast<int>(seed.r.size()) != instance.n_demands()) {
    throw Error(Errc::kBadInput, "seed rejection vector has the wrong length");
  }
  IterRoundResult out;
  Rounder rounder(instance, seed, options, out.report);
  out.solution = rounder.run();
  return out;
}

int interval_group_size(double z, int rows) {
  return std::max(1, static_cast<int>(std::floor(z / (4.0 * (rows + 1)) + 1e-9)) - 1);
}

int single_path_iteration_bound(double q_init) {
  if (q_init <= 4.0) return 0;
  return static_cast<int>(std::ceil(std::log(q_init / 4.0) / std::log(8.0 / 7.0) - 1e-9));
}

double single_path_extra_bound(double q_init, double k_item) {
  return 10.0 * std::log(std::max(q_init, std::numbers::e)) * k_item;
}

double general_path_extra_bound(double q_init, double k_item, int rows) {
  double c2 = static_cast<double>(rows) * rows;
  return (40.0 * c2 + 90.0 * c2 * std::log(std::max(q_init, std::numbers::e))) * k_item;
}

}  // namespace jrp
