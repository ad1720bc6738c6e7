#include "jrp/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "jrp/baseline.hpp"
#include "jrp/exact.hpp"
#include "jrp/generate.hpp"
#include "jrp/io.hpp"

namespace jrp {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kBadInput:
    case Errc::kNonMonotoneHolding:
    case Errc::kBadDeadline:
    case Errc::kDanglingReference:
    case Errc::kBadProfile:
    case Errc::kTooLarge:
      return kExitInput;
    case Errc::kInfeasible:
    case Errc::kInfeasibleInstance:
    case Errc::kInfeasibleDemand:
    case Errc::kRejectionRequired:
    case Errc::kNoFeasibleShift:
    case Errc::kLpInfeasibleAfterConstraints:
      return kExitInfeasible;
    default:
      return kExitInternal;
  }
}

namespace {

// Shortest round-trip text, with a decimal point kept on whole numbers.
std::string decimal(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string compact(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double lp_value(const Instance& inst) {
  if (inst.n_demands() == 0) return 0.0;
  LpBuildOptions build;
  build.form = inst.is_deadline_only() ? LpForm::kDeadline : LpForm::kFull;
  try {
    return solve_extreme(build_lp(inst, {}, build)).objective;
  } catch (const Error& e) {
    if (e.code() == Errc::kInfeasible) throw Error(Errc::kInfeasibleInstance, "the LP relaxation is infeasible");
    throw;
  }
}

Certificate plain_certificate(const Instance& inst, const IntegralSolution& sol, const std::string& variant,
                              double lp) {
  Certificate cert;
  cert.variant = variant;
  cert.guess_mode = "none";
  cert.path = variant;
  cert.lp_value = lp;
  cert.components = evaluate(inst, sol);
  cert.cost = cert.components.total;
  cert.ratio = cost_ratio(cert.cost, lp);
  return cert;
}

IntegralSolution baseline_solution(const Instance& inst) {
  Instance work = inst;
  if (!inst.is_deadline_only()) {
    LpSolution full = solve_extreme(build_lp(inst));
    work = reduce_to_deadlines(inst, full.sol).instance;
  }
  LpSolution lp = solve_extreme(build_lp(work, {}, {false, 1.0, LpForm::kDeadline}));
  try {
    return simple_two_approx(work, lp.sol);
  } catch (const Error& e) {
    if (e.code() != Errc::kRejectionRequired) throw;
    if (work.n_items != 1) {
      throw Error(Errc::kBadInput, "the baseline needs an LP without rejection or a single item");
    }
    return random_shift_round(work, lp.sol);
  }
}

std::string default_path(const std::string& instance, const std::string& suffix) {
  std::filesystem::path p(instance);
  std::string stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

}  // namespace

std::string summary_line(const Certificate& cert) {
  return "lp=" + decimal(cert.lp_value) + " cost=" + decimal(cert.cost) + " ratio=" + compact(cert.ratio);
}

RunOutcome run_algorithm(const Instance& instance, const SolveArgs& args) {
  instance.validate();
  RunOutcome out;
  if (args.algo == "exact") {
    ExactResult ex{IntegralSolution::empty_for(instance), 0.0};
    if (instance.n_demands() > 0) {
      try {
        ex = brute_force_opt(instance);
      } catch (const Error& e) {
        // One item and one color admit a polynomial exact method.
        if (e.code() != Errc::kTooLarge || instance.n_items != 1 || instance.n_colors > 1) throw;
        ex = single_item_rejection_dp(instance);
      }
    }
    out.solution = ex.solution;
    out.certificate = plain_certificate(instance, ex.solution, "exact", lp_value(instance));
    out.certificate.opt = ex.cost;
    return out;
  }
  if (args.algo == "baseline") {
    out.solution = instance.n_demands() == 0 ? IntegralSolution::empty_for(instance) : baseline_solution(instance);
    out.certificate = plain_certificate(instance, out.solution, "baseline", lp_value(instance));
    return out;
  }
  if (args.algo != "approx" && args.algo != "improved") {
    throw Error(Errc::kBadInput, "unknown algorithm '" + args.algo + "'");
  }
  SolveOptions opt;
  opt.epsilon = args.epsilon;
  opt.m = args.m;
  opt.trace = args.trace;
  std::optional<GuessMode> guess = parse_guess_mode(args.guess);
  if (!guess) throw Error(Errc::kBadInput, "unknown guess mode '" + args.guess + "'");
  opt.guess = *guess;
  if (args.algo == "improved") {
    opt.variant = Variant::kImproved;
  } else {
    opt.variant = instance.is_deadline_only() ? Variant::kRjrpd : Variant::kGeneral;
  }
  SolveResult res = solve_cjrp(instance, opt);
  out.solution = std::move(res.solution);
  out.certificate = std::move(res.certificate);
  out.trace = std::move(res.trace);
  return out;
}

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::string text = dump_json(instance_to_json(generate_instance(args.profile, args.seed)));
    if (args.out.empty()) {
      out << text;
    } else {
      write_text_file(args.out, text);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  try {
    Instance inst = read_instance(args.instance);
    RunOutcome run = run_algorithm(inst, args);
    if (args.trace) {
      for (const std::string& line : run.trace) out << "trace: " << line << "\n";
    }
    FeasibilityReport feas = check_feasible(inst, run.solution);
    std::string sol_path = args.solution_out.empty() ? default_path(args.instance, ".sol.json") : args.solution_out;
    std::string cert_path =
        args.certificate_out.empty() ? default_path(args.instance, ".cert.json") : args.certificate_out;
    write_text_file(sol_path, dump_json(solution_to_json(run.solution)));
    write_text_file(cert_path, dump_json(certificate_to_json(run.certificate)));
    out << "algo=" << args.algo << " " << summary_line(run.certificate) << "\n";
    const CostBreakdown& c = run.certificate.components;
    out << "general=" << compact(c.general) << " item=" << compact(c.item) << " holding=" << compact(c.holding)
        << " penalty=" << compact(c.penalty) << "\n";
    if (run.certificate.opt) out << "opt=" << decimal(*run.certificate.opt) << "\n";
    for (const AdditiveBound& b : run.certificate.additive_bounds) {
      out << "bound " << b.name << ": " << compact(b.value) << " <= " << compact(b.bound)
          << (b.holds() ? "" : "  VIOLATED") << "\n";
    }
    out << "solution: " << sol_path << "\ncertificate: " << cert_path << "\n";
    if (!feas.ok()) {
      err << "infeasible output:\n" << feas.describe();
      return kExitInfeasible;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  try {
    Instance inst = read_instance(args.instance);
    IntegralSolution sol = solution_from_json(parse_json(read_text_file(args.solution)));
    if (static_cast<int>(sol.disposition.size()) != inst.n_demands()) {
      throw Error(Errc::kBadInput, "solution has " + std::to_string(sol.disposition.size()) +
                                       " dispositions for " + std::to_string(inst.n_demands()) + " demands");
    }
    FeasibilityReport feas = check_feasible(inst, sol);
    if (!feas.ok()) {
      out << "FAIL feasibility\n" << feas.describe();
      return kExitInfeasible;
    }
    if (args.certificate.empty()) {
      out << "cost=" << decimal(evaluate(inst, sol).total) << "\n";
      out << "PASS feasibility (no certificate given)\n";
      return kExitOk;
    }
    Certificate cert = certificate_from_json(parse_json(read_text_file(args.certificate)));
    CertificateReport rep = certificate_check(inst, sol, cert);
    out << "cost=" << decimal(evaluate(inst, sol).total) << "\n";
    if (!rep.ok()) {
      out << "FAIL\n" << rep.describe();
      return kExitInfeasible;
    }
    out << "PASS feasibility and certificate (" << cert.additive_bounds.size() << " bounds)\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

namespace {

struct BenchCell {
  bool ok = false;
  double cost = 0.0;
  double ratio = 0.0;
  double slack = std::numeric_limits<double>::infinity();
  double ms = 0.0;
  std::string error;
};

struct BenchRow {
  std::string name;
  double lp = 0.0;
  std::string error;
  std::vector<BenchCell> cells;
};

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

}  // namespace

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  try {
    for (const auto& entry : fs::directory_iterator(args.corpus)) {
      const fs::path& p = entry.path();
      std::string name = p.filename().string();
      if (p.extension() != ".json" || name.find(".sol.") != std::string::npos ||
          name.find(".cert.") != std::string::npos) {
        continue;
      }
      files.push_back(p);
    }
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  std::sort(files.begin(), files.end());
  for (const std::string& a : args.algos) {
    if (a != "exact" && a != "baseline" && a != "approx" && a != "improved") {
      err << "error: unknown algorithm '" << a << "'\n";
      return kExitInput;
    }
  }
  std::vector<BenchRow> rows(files.size());
  parallel_for(static_cast<int>(files.size()), [&](int k) {
    BenchRow& row = rows[k];
    row.name = files[k].filename().string();
    row.cells.resize(args.algos.size());
    Instance inst;
    try {
      inst = read_instance(files[k].string());
      row.lp = lp_value(inst);
    } catch (const std::exception& e) {
      row.error = e.what();
      return;
    }
    for (std::size_t a = 0; a < args.algos.size(); ++a) {
      BenchCell& cell = row.cells[a];
      SolveArgs sa;
      sa.algo = args.algos[a];
      auto start = std::chrono::steady_clock::now();
      try {
        RunOutcome run = run_algorithm(inst, sa);
        cell.ok = check_feasible(inst, run.solution).ok();
        if (!cell.ok) cell.error = "infeasible output";
        cell.cost = run.certificate.cost;
        cell.ratio = cost_ratio(cell.cost, row.lp);
        for (const AdditiveBound& b : run.certificate.additive_bounds) {
          cell.slack = std::min(cell.slack, b.bound - b.value);
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cell.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });

  const int exact_col = static_cast<int>(std::find(args.algos.begin(), args.algos.end(), "exact") - args.algos.begin());
  const bool has_exact = exact_col < static_cast<int>(args.algos.size());
  auto vs_exact = [&](const BenchRow& row, std::size_t a) -> std::optional<double> {
    if (!has_exact || static_cast<int>(a) == exact_col || !row.error.empty()) return std::nullopt;
    const BenchCell& e = row.cells[exact_col];
    const BenchCell& c = row.cells[a];
    if (!e.ok || !c.ok) return std::nullopt;
    return cost_ratio(c.cost, e.cost);
  };

  std::vector<std::string> header = {"instance", "lp"};
  for (std::size_t a = 0; a < args.algos.size(); ++a) {
    const std::string& n = args.algos[a];
    header.insert(header.end(), {n + ".cost", n + ".ratio", n + ".slack", n + ".ms"});
    if (has_exact && static_cast<int>(a) != exact_col) header.push_back(n + "/exact");
  }
  std::vector<std::vector<std::string>> table;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const BenchRow& row : rows) {
    std::vector<std::string> line = {row.name, row.error.empty() ? compact(row.lp) : "error"};
    nlohmann::json jr = {{"instance", row.name}};
    if (row.error.empty()) {
      jr["lp"] = row.lp;
    } else {
      jr["error"] = row.error;
    }
    for (std::size_t a = 0; a < args.algos.size(); ++a) {
      const BenchCell& c = row.cells.empty() ? BenchCell{} : row.cells[a];
      nlohmann::json jc;
      if (c.ok) {
        line.insert(line.end(), {compact(c.cost), compact(c.ratio), std::isfinite(c.slack) ? compact(c.slack) : "-",
                                 compact(std::round(c.ms * 10.0) / 10.0)});
        jc = {{"cost", c.cost}, {"ratio", std::isfinite(c.ratio) ? nlohmann::json(c.ratio) : nlohmann::json(nullptr)},
              {"ms", c.ms}};
        if (std::isfinite(c.slack)) jc["slack"] = c.slack;
      } else {
        line.insert(line.end(), {"fail", "-", "-", "-"});
        jc = {{"error", c.error.empty() ? row.error : c.error}};
      }
      if (has_exact && static_cast<int>(a) != exact_col) {
        std::optional<double> v = vs_exact(row, a);
        line.push_back(v ? compact(*v) : "-");
        if (v) jc["vs_exact"] = *v;
      }
      jr[args.algos[a]] = jc;
    }
    table.push_back(line);
    rows_json.push_back(jr);
  }

  // Aggregates over rows where the algorithm succeeded.
  nlohmann::json agg = nlohmann::json::object();
  std::vector<std::string> agg_lines;
  for (std::size_t a = 0; a < args.algos.size(); ++a) {
    double max_r = 0.0, sum_r = 0.0, max_e = 0.0, sum_e = 0.0;
    int cnt = 0, cnt_e = 0, fails = 0;
    for (const BenchRow& row : rows) {
      const BenchCell& c = row.cells.empty() ? BenchCell{} : row.cells[a];
      if (!c.ok) {
        ++fails;
        continue;
      }
      if (std::isfinite(c.ratio)) {
        max_r = std::max(max_r, c.ratio);
        sum_r += c.ratio;
        ++cnt;
      }
      if (std::optional<double> v = vs_exact(row, a); v && std::isfinite(*v)) {
        max_e = std::max(max_e, *v);
        sum_e += *v;
        ++cnt_e;
      }
    }
    nlohmann::json ja = {{"failures", fails}, {"rows", cnt}};
    std::string text = args.algos[a] + ": failures=" + std::to_string(fails);
    if (cnt > 0) {
      ja["max_ratio"] = max_r;
      ja["mean_ratio"] = sum_r / cnt;
      text += " max_ratio=" + compact(max_r) + " mean_ratio=" + compact(sum_r / cnt);
    }
    if (cnt_e > 0) {
      ja["max_vs_exact"] = max_e;
      ja["mean_vs_exact"] = sum_e / cnt_e;
      text += " max_vs_exact=" + compact(max_e) + " mean_vs_exact=" + compact(sum_e / cnt_e);
    }
    agg[args.algos[a]] = ja;
    agg_lines.push_back(text);
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t k = 0; k < header.size(); ++k) width[k] = header[k].size();
  for (const auto& line : table) {
    for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], line[k].size());
  }
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (k == 0) {
        out << line[k] << std::string(width[k] - line[k].size(), ' ');
      } else {
        out << "  " << pad(line[k], width[k]);
      }
    }
    out << "\n";
  };
  emit(header);
  for (const auto& line : table) emit(line);
  for (const std::string& l : agg_lines) out << l << "\n";

  try {
    if (!args.csv_out.empty()) {
      std::ostringstream csv;
      auto csv_line = [&](const std::vector<std::string>& line) {
        for (std::size_t k = 0; k < line.size(); ++k) csv << (k ? "," : "") << line[k];
        csv << "\n";
      };
      csv_line(header);
      for (const auto& line : table) csv_line(line);
      write_text_file(args.csv_out, csv.str());
    }
    if (!args.json_out.empty()) {
      nlohmann::json doc = {{"algos", args.algos}, {"rows", rows_json}, {"aggregate", agg}};
      write_text_file(args.json_out, dump_json(doc));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kExitOk;
}

}  // namespace jrp
