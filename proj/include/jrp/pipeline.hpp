#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jrp/lpcore.hpp"
#include "jrp/model.hpp"
#include "json.hpp"

namespace jrp {

enum class Variant { kRjrpd, kGeneral, kImproved };
enum class GuessMode { kOracle, kExhaustive, kNone };

const char* variant_name(Variant v);
const char* guess_mode_name(GuessMode g);
std::optional<Variant> parse_variant(const std::string& name);
std::optional<GuessMode> parse_guess_mode(const std::string& name);

enum class MPath { kSingleColor, kGeneral };

// Single color: ⌈1000 + (1000/ε)·ln(1000/ε)⌉. General: the least m > 50C/ε
// with (C+1)(40C² + 90C²·ln m)/m ≤ ε/8. Throws kBadInput outside
// 0 < ε ≤ 1, C ≥ 1.
long compute_m(double epsilon, int colors, MPath path);

// Worker count for parallel maps: JRP_THREADS if set and positive, else the
// hardware concurrency.
int thread_count();

// Runs f(0..n-1) on up to thread_count() workers.
void parallel_for(int n, const std::function<void(int)>& f);

struct AdditiveBound {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool holds(double tol = 1e-7) const { return value <= bound + tol * (1.0 + std::abs(bound)); }
};

struct Certificate {
  std::string variant;
  std::string guess_mode;
  // "big" for the LP rounding path, "small" when the small-solution
  // enumeration won.
  std::string path;
  double epsilon = 1.0;
  long theoretical_m = 0;
  int m = 0;
  double lp_value = 0.0;
  CostBreakdown lp_components;
  double cost = 0.0;
  CostBreakdown components;
  double ratio = 1.0;
  std::vector<AdditiveBound> additive_bounds;
  std::optional<double> opt;
  std::vector<std::string> notes;
};

nlohmann::json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& j);

// cost / lp, with 0/0 = 1 and x/0 = inf.
double cost_ratio(double cost, double lp);

enum class SmallMode { kExhaustive, kOracle };

// Desk-scale caps for exhaustive enumeration.
inline constexpr int kExhaustiveMaxM = 2;
inline constexpr int kExhaustiveMaxSlots = 36;

// Best solution over the cases that apply: at most m served demands, at most
// m item orders, or at most m general orders. Oracle mode reads the guesses
// off a brute-force optimum; exhaustive mode enumerates them and returns
// nullopt beyond the caps.
std::optional<IntegralSolution> solve_small_cases(const Instance& instance, int m, SmallMode mode);

// Removes item orders one at a time while the cheapest service of the
// remaining schedule lowers the cost, keeping the penalty cost from rising.
IntegralSolution prune_orders(const Instance& instance, const IntegralSolution& sol);

struct SolveOptions {
  double epsilon = 1.0;
  GuessMode guess = GuessMode::kOracle;
  Variant variant = Variant::kGeneral;
  // Number of guessed item orders and holding costs.
  int m = 1;
  bool small_cases = true;
  bool trace = false;
};

struct SolveResult {
  IntegralSolution solution;
  Certificate certificate;
  std::vector<std::string> trace;
};

// Throws kInfeasibleInstance, kBadInput (rjrpd on general holding) or
// kTooLarge (exhaustive guessing beyond the caps).
SolveResult solve_cjrp(const Instance& instance, const SolveOptions& options = {});

struct CertificateReport {
  FeasibilityReport feasibility;
  std::vector<std::string> problems;
  bool ok() const { return feasibility.ok() && problems.empty(); }
  std::string describe() const;
};

// Re-checks feasibility, costs, the recorded bounds and, when use_oracle and
// brute force fits, LP ≤ OPT ≤ cost.
CertificateReport certificate_check(const Instance& instance, const IntegralSolution& solution,
                                    const Certificate& cert, bool use_oracle = true);

}  // namespace jrp
