#include "jrp/lpcore.hpp"

#include <algorithm>
#include <sstream>

namespace jrp {

bool SideInformation::empty() const {
  return forced_general.empty() && forced_zero_general.empty() && forced_item.empty() &&
         forbidden_item.empty() && forced_service.empty() && !k_max && !h_max;
}

int LPModel::find(const VarKey& key) const {
  auto it = index.find(key);
  return it == index.end() ? -1 : it->second;
}

void LPModel::fix(int column, double value) {
  lower[column] = value;
  upper[column] = value;
}

LinearProgram LPModel::to_program() const {
  LinearProgram lp;
  lp.cost = cost;
  lp.lower = lower;
  lp.upper = upper;
  lp.rows = rows;
  lp.rows.insert(lp.rows.end(), extra_rows.begin(), extra_rows.end());
  return lp;
}

Instance perturb_holding(const Instance& instance, double epsilon) {
  double kappa = kInfeasible;
  for (const Demand& d : instance.demands) {
    for (double h : d.holding) {
      if (!is_infeasible(h) && h > 0.0) kappa = std::min(kappa, h);
    }
  }
  if (is_infeasible(kappa)) kappa = 1.0;
  Instance out = instance;
  double scale = epsilon * kappa /
                 (static_cast<double>(std::max(1, instance.n_demands())) * std::max(1, instance.horizon));
  for (Demand& d : out.demands) {
    for (int s = 1; s <= d.deadline; ++s) {
      double& h = d.holding[s - 1];
      if (!is_infeasible(h)) h += scale * (d.deadline - s);
    }
  }
  return out;
}

namespace {

void check_side_info(const Instance& instance, const SideInformation& side) {
  auto bad = [](const std::string& msg) { throw Error(Errc::kInconsistentSideInfo, msg); };
  for (int s : side.forced_general) {
    if (s < 1 || s > instance.horizon) bad("forced general order out of range");
    if (side.forced_zero_general.count(s)) bad("general order forced both open and closed");
  }
  for (int s : side.forced_zero_general) {
    if (s < 1 || s > instance.horizon) bad("closed general order out of range");
  }
  for (const ItemSlot& is : side.forced_item) {
    if (is.first < 0 || is.first >= instance.n_items || is.second < 1 ||
        is.second > instance.horizon) {
      bad("forced item order out of range");
    }
    if (side.forbidden_item.count(is)) bad("item order both forced and forbidden");
    if (side.forced_zero_general.count(is.second)) bad("forced item order at a closed timestep");
  }
  if (!side.forced_item.empty() && side.k_max) {
    double cheapest = kInfeasible;
    for (const ItemSlot& is : side.forced_item) cheapest = std::min(cheapest, instance.k_item[is.first]);
    if (cheapest != *side.k_max) bad("k_max differs from the cheapest forced item order");
  }
  for (const DemandSlot& ds : side.forced_service) {
    if (ds.first < 0 || ds.first >= instance.n_demands()) bad("forced service of unknown demand");
    const Demand& d = instance.demands[ds.first];
    if (!d.servable_at(ds.second)) bad("forced service at an unservable slot");
  }
}

}  // namespace

LPModel build_lp(const Instance& instance, const SideInformation& side,
                 const LpBuildOptions& options) {
  instance.validate();
  check_side_info(instance, side);
  LPModel model;
  model.form = options.form;
  model.instance = options.perturb_holding ? perturb_holding(instance, options.epsilon) : instance;
  Instance& inst = model.instance;
  if (side.h_max) {
    std::set<int> guessed;
    for (const DemandSlot& ds : side.forced_service) guessed.insert(ds.first);
    for (int d = 0; d < inst.n_demands(); ++d) {
      if (guessed.count(d)) continue;
      for (int s = 1; s <= inst.demands[d].deadline; ++s) {
        // Compare against the unperturbed value so the guess is not lost to
        // the perturbation.
        if (instance.demands[d].holding_at(s) > *side.h_max) inst.demands[d].holding[s - 1] = kInfeasible;
      }
    }
  }
  if (options.form == LpForm::kDeadline && !instance.is_deadline_only()) {
    throw Error(Errc::kBadInput, "deadline form requires zero-or-infeasible holding");
  }

  auto add_var = [&](VarKey key, double c) {
    int j = model.n_vars();
    model.vars.push_back(key);
    model.lower.push_back(0.0);
    model.upper.push_back(1.0);
    model.cost.push_back(c);
    model.index[key] = j;
    return j;
  };
  const int T = inst.horizon;
  for (int s = 1; s <= T; ++s) add_var(VarKey::general(s), inst.k0);
  for (int i = 0; i < inst.n_items; ++i) {
    for (int s = 1; s <= T; ++s) add_var(VarKey::item(i, s), inst.k_item[i]);
  }
  if (options.form == LpForm::kFull) {
    for (int d = 0; d < inst.n_demands(); ++d) {
      const Demand& dem = inst.demands[d];
      for (int s = 1; s <= dem.deadline; ++s) {
        if (dem.servable_at(s)) add_var(VarKey::service(d, s), dem.holding_at(s));
      }
    }
  }
  for (int d = 0; d < inst.n_demands(); ++d) add_var(VarKey::reject(d), inst.demands[d].penalty);

  auto add_row = [&](LpRow row, RowTag tag) {
    model.rows.push_back(std::move(row));
    model.row_tags.push_back(tag);
  };
  for (int d = 0; d < inst.n_demands(); ++d) {
    const Demand& dem = inst.demands[d];
    LpRow row{{{model.find(VarKey::reject(d)), 1.0}}, Sense::kGe, 1.0};
    for (int s = 1; s <= dem.deadline; ++s) {
      if (!dem.servable_at(s)) continue;
      VarKey key = options.form == LpForm::kFull ? VarKey::service(d, s) : VarKey::item(dem.item, s);
      row.coeffs.push_back({model.find(key), 1.0});
    }
    add_row(std::move(row), {RowKind::kCover, d, 0});
  }
  for (int i = 0; i < inst.n_items; ++i) {
    for (int s = 1; s <= T; ++s) {
      add_row({{{model.find(VarKey::item(i, s)), 1.0}, {model.find(VarKey::general(s)), -1.0}},
               Sense::kLe, 0.0},
              {RowKind::kLink, i, s});
    }
  }
  if (options.form == LpForm::kFull) {
    for (int d = 0; d < inst.n_demands(); ++d) {
      const Demand& dem = inst.demands[d];
      for (int s = 1; s <= dem.deadline; ++s) {
        if (!dem.servable_at(s)) continue;
        add_row({{{model.find(VarKey::service(d, s)), 1.0}, {model.find(VarKey::item(dem.item, s)), -1.0}},
                 Sense::kLe, 0.0},
                {RowKind::kService, d, s});
      }
    }
  }
  for (int c = 0; c < inst.n_colors; ++c) {
    LpRow row{{}, Sense::kLe, inst.rejection_limits[c]};
    for (int d = 0; d < inst.n_demands(); ++d) {
      double w = inst.demands[d].weights[c];
      if (w != 0.0) row.coeffs.push_back({model.find(VarKey::reject(d)), w});
    }
    add_row(std::move(row), {RowKind::kColor, c, 0});
  }

  for (int s : side.forced_general) model.fix(model.find(VarKey::general(s)), 1.0);
  for (int s : side.forced_zero_general) model.fix(model.find(VarKey::general(s)), 0.0);
  for (const ItemSlot& is : side.forbidden_item) {
    model.fix(model.find(VarKey::item(is.first, is.second)), 0.0);
  }
  if (side.k_max) {
    for (int i = 0; i < inst.n_items; ++i) {
      if (inst.k_item[i] <= *side.k_max) continue;
      for (int s = 1; s <= T; ++s) {
        if (!side.forced_item.count({i, s})) model.fix(model.find(VarKey::item(i, s)), 0.0);
      }
    }
  }
  for (const ItemSlot& is : side.forced_item) {
    model.fix(model.find(VarKey::item(is.first, is.second)), 1.0);
  }
  for (const DemandSlot& ds : side.forced_service) {
    if (options.form == LpForm::kFull) {
      model.fix(model.find(VarKey::service(ds.first, ds.second)), 1.0);
    } else {
      model.fix(model.find(VarKey::item(inst.demands[ds.first].item, ds.second)), 1.0);
    }
  }
  return model;
}

namespace {

// In deadline form a demand is served lean: from its deadline backwards,
// each slot takes as much of y^i as the remaining need allows.
void reconstruct_service(const LPModel& model, FractionalSolution& sol) {
  const Instance& inst = model.instance;
  for (int d = 0; d < inst.n_demands(); ++d) {
    const Demand& dem = inst.demands[d];
    double need = 1.0 - sol.r[d];
    for (int s = dem.deadline; s >= 1 && need > 0.0; --s) {
      if (!dem.servable_at(s)) continue;
      double v = std::min(sol.get_y_item(dem.item, s), need);
      if (v <= 0.0) continue;
      sol.x[{d, s}] = v;
      need -= v;
    }
  }
}

}  // namespace

LpSolution solve_extreme(const LPModel& model) {
  if (model.n_vars() == 0) throw Error(Errc::kBadInput, "model has no variables");
  LpSolution out;
  out.basis = solve_lp(model.to_program());
  out.values = out.basis.x;
  out.objective = out.basis.objective;
  FractionalSolution& sol = out.sol;
  sol.r.assign(model.instance.n_demands(), 0.0);
  for (int j = 0; j < model.n_vars(); ++j) {
    double v = out.values[j];
    const VarKey& key = model.vars[j];
    switch (key.kind) {
      case VarKind::kGeneral: if (v != 0.0) sol.y[key.a] = v; break;
      case VarKind::kItem: if (v != 0.0) sol.y_item[{key.a, key.b}] = v; break;
      case VarKind::kService: if (v != 0.0) sol.x[{key.a, key.b}] = v; break;
      case VarKind::kReject: sol.r[key.a] = v; break;
    }
  }
  if (model.form == LpForm::kDeadline) reconstruct_service(model, sol);
  return out;
}

DualCheck solve_dual_and_verify(const LPModel& model, const LpSolution& solution) {
  LinearProgram lp = model.to_program();
  const int m = lp.n_rows();
  std::vector<double> pi = solution.basis.row_duals;
  // Clamp to the sign each row sense requires so the bound below is valid
  // by weak duality.
  double sign_violation = 0.0;
  for (int r = 0; r < m; ++r) {
    Sense sense = lp.rows[r].sense;
    if (sense == Sense::kLe && pi[r] > 0.0) {
      sign_violation = std::max(sign_violation, pi[r]);
      pi[r] = 0.0;
    } else if (sense == Sense::kGe && pi[r] < 0.0) {
      sign_violation = std::max(sign_violation, -pi[r]);
      pi[r] = 0.0;
    }
  }
  std::vector<double> reduced = lp.cost;
  for (int r = 0; r < m; ++r) {
    if (pi[r] == 0.0) continue;
    for (auto [j, a] : lp.rows[r].coeffs) reduced[j] -= pi[r] * a;
  }
  DualCheck check;
  double dual_obj = 0.0;
  for (int r = 0; r < m; ++r) dual_obj += pi[r] * lp.rows[r].rhs;
  for (int j = 0; j < lp.n_cols(); ++j) {
    dual_obj += reduced[j] >= 0.0 ? lp.lower[j] * reduced[j] : lp.upper[j] * reduced[j];
  }
  check.primal = solution.objective;
  check.gap = std::abs(check.primal - dual_obj);
  DualSolution& dual = check.dual;
  dual.objective = dual_obj;
  const Instance& inst = model.instance;
  dual.b.assign(inst.n_demands(), 0.0);
  dual.lam.assign(inst.n_colors, 0.0);
  for (int r = 0; r < static_cast<int>(model.rows.size()); ++r) {
    const RowTag& tag = model.row_tags[r];
    switch (tag.kind) {
      case RowKind::kCover: dual.b[tag.a] = pi[r]; break;
      case RowKind::kLink: if (pi[r] != 0.0) dual.z[{tag.a, tag.b}] = -pi[r]; break;
      case RowKind::kService: if (pi[r] != 0.0) dual.l[{tag.a, tag.b}] = -pi[r]; break;
      case RowKind::kColor: dual.lam[tag.a] = -pi[r]; break;
    }
  }
  for (int r = static_cast<int>(model.rows.size()); r < m; ++r) dual.extra.push_back(pi[r]);

  if (check.gap > 1e-7 * (1.0 + std::abs(check.primal))) {
    std::ostringstream msg;
    msg << "primal " << check.primal << " dual " << dual_obj << " sign violation " << sign_violation;
    throw Error(Errc::kDualityGapExceeded, msg.str());
  }
  if (model.form == LpForm::kFull) {
    for (const auto& [key, v] : solution.sol.x) {
      if (v <= kTol) continue;
      double h = inst.demands[key.first].holding_at(key.second);
      if (dual.b[key.first] < h - 1e-8 * (1.0 + std::abs(h))) {
        throw Error(Errc::kSlacknessViolated, "served slot above its demand dual");
      }
    }
  }
  for (int d = 0; d < inst.n_demands(); ++d) {
    double r = solution.sol.r[d];
    if (r <= kTol) continue;
    const Demand& dem = inst.demands[d];
    double price = dem.penalty;
    for (int c = 0; c < inst.n_colors; ++c) price += dem.weights[c] * dual.lam[c];
    double tol = 1e-8 * (1.0 + std::abs(price));
    bool interior = r < 1.0 - kTol;
    if ((interior && std::abs(dual.b[d] - price) > tol) || dual.b[d] < price - tol) {
      throw Error(Errc::kSlacknessViolated, "rejected demand dual differs from its rejection price");
    }
  }
  return check;
}

double holding_cost_bound(const LPModel& model, const FractionalSolution& primal,
                          const DualSolution& dual, const std::vector<int>& served) {
  double total = 0.0;
  for (int d : served) {
    const Demand& dem = model.instance.demands[d];
    for (int s = 1; s <= dem.deadline; ++s) {
      if (primal.get_x(d, s) <= kTol) continue;
      double h = dem.holding_at(s);
      if (dual.b[d] < h - 1e-8 * (1.0 + std::abs(h))) {
        throw Error(Errc::kSlacknessViolated, "demand " + std::to_string(d));
      }
    }
    total += dual.b[d];
  }
  return total;
}

VertexReport check_vertex(const LPModel& model, const LpSolution& solution) {
  VertexReport report;
  for (int j = 0; j < model.n_vars(); ++j) {
    double v = solution.values[j];
    if (v > model.lower[j] + kTol && v < model.upper[j] - kTol) ++report.fractional;
  }
  LinearProgram lp = model.to_program();
  for (int r = 0; r < lp.n_rows(); ++r) {
    const LpRow& row = lp.rows[r];
    if (row.sense == Sense::kEq ||
        std::abs(solution.basis.row_activity[r] - row.rhs) <= kTol * (1.0 + std::abs(row.rhs))) {
      ++report.active_rows;
    }
  }
  return report;
}

namespace {

std::string var_name(const VarKey& key) {
  switch (key.kind) {
    case VarKind::kGeneral: return "y_" + std::to_string(key.a);
    case VarKind::kItem: return "yi_" + std::to_string(key.a) + "_" + std::to_string(key.b);
    case VarKind::kService: return "x_" + std::to_string(key.a) + "_" + std::to_string(key.b);
    case VarKind::kReject: return "r_" + std::to_string(key.a);
  }
  return "v";
}

void write_terms(std::ostream& out, const std::vector<std::pair<int, double>>& terms,
                 const LPModel& model) {
  bool first = true;
  for (auto [j, a] : terms) {
    if (a == 0.0) continue;
    out << (a < 0 ? " - " : (first ? " " : " + ")) << std::abs(a) << " " << var_name(model.vars[j]);
    first = false;
  }
  if (first) out << " 0 " << var_name(model.vars.front());
}

}  // namespace

std::string export_lp_text(const LPModel& model) {
  std::ostringstream out;
  out.precision(17);
  out << "Minimize\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < model.n_vars(); ++j) obj.push_back({j, model.cost[j]});
  write_terms(out, obj, model);
  out << "\nSubject To\n";
  LinearProgram lp = model.to_program();
  for (int r = 0; r < lp.n_rows(); ++r) {
    out << " c" << r << ":";
    write_terms(out, lp.rows[r].coeffs, model);
    const char* op = lp.rows[r].sense == Sense::kLe ? "<=" : lp.rows[r].sense == Sense::kGe ? ">=" : "=";
    out << " " << op << " " << lp.rows[r].rhs << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < model.n_vars(); ++j) {
    out << " " << model.lower[j] << " <= " << var_name(model.vars[j]) << " <= " << model.upper[j] << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace jrp
