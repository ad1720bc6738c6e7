#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jrp/pipeline.hpp"

namespace jrp {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

int exit_code_for(Errc code);

struct GenerateArgs {
  std::uint64_t seed = 1;
  std::string profile = "tiny-exact";
  std::string out;  // empty: stdout
};

struct SolveArgs {
  std::string instance;
  std::string algo = "approx";  // exact, baseline, approx or improved
  double epsilon = 1.0;
  std::string guess = "oracle";
  int m = 1;
  bool trace = false;
  std::string solution_out;     // default <instance>.sol.json
  std::string certificate_out;  // default <instance>.cert.json
};

struct VerifyArgs {
  std::string instance;
  std::string solution;
  std::string certificate;  // empty: feasibility only
};

struct BenchArgs {
  std::string corpus;
  std::vector<std::string> algos = {"exact", "approx"};
  std::string csv_out;
  std::string json_out;
};

// One solver run as the commands report it.
struct RunOutcome {
  IntegralSolution solution;
  Certificate certificate;
  std::vector<std::string> trace;
};

// Dispatches one algorithm. Throws Error.
RunOutcome run_algorithm(const Instance& instance, const SolveArgs& args);

// "lp=0.1 cost=1.0 ratio=10".
std::string summary_line(const Certificate& cert);

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

}  // namespace jrp
