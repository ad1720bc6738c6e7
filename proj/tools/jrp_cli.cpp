#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "jrp/commands.hpp"
#include "jrp/generate.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Joint replenishment solver with outliers and color constraints"};
  app.require_subcommand(1);

  jrp::GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "Write a generated instance");
  g->add_option("--seed", gen.seed, "Random seed");
  std::string profiles;
  for (const std::string& p : jrp::profile_names()) profiles += (profiles.empty() ? "" : ", ") + p;
  g->add_option("--profile", gen.profile, "One of: " + profiles);
  g->add_option("--out,-o", gen.out, "Output file (default: stdout)");

  jrp::SolveArgs solve;
  CLI::App* s = app.add_subcommand("solve", "Solve an instance and write solution and certificate");
  s->add_option("instance", solve.instance, "Instance file")->required();
  s->add_option("--algo", solve.algo, "exact, baseline, approx or improved")
      ->check(CLI::IsMember({"exact", "baseline", "approx", "improved"}));
  s->add_option("--eps", solve.epsilon, "Accuracy parameter in (0, 1]");
  s->add_option("--guess", solve.guess, "oracle, exhaustive or none")
      ->check(CLI::IsMember({"oracle", "exhaustive", "none"}));
  s->add_option("--m", solve.m, "Number of guessed item orders and holding costs");
  s->add_flag("--trace", solve.trace, "Print the rounding trace");
  s->add_option("--solution", solve.solution_out, "Solution output file");
  s->add_option("--certificate", solve.certificate_out, "Certificate output file");

  jrp::VerifyArgs verify;
  CLI::App* v = app.add_subcommand("verify", "Check a solution and optionally its certificate");
  v->add_option("instance", verify.instance, "Instance file")->required();
  v->add_option("solution", verify.solution, "Solution file")->required();
  v->add_option("--certificate", verify.certificate, "Certificate file");

  jrp::BenchArgs bench;
  CLI::App* b = app.add_subcommand("bench", "Solve every instance of a directory and tabulate");
  b->add_option("corpus", bench.corpus, "Directory of instance files")->required();
  b->add_option("--algos", bench.algos, "Algorithms to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"exact", "baseline", "approx", "improved"}));
  b->add_option("--csv", bench.csv_out, "Machine-readable table");
  b->add_option("--json", bench.json_out, "Machine-readable table with aggregates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? jrp::kExitOk : jrp::kExitInput;
  }
  if (g->parsed()) return jrp::cmd_generate(gen, std::cout, std::cerr);
  if (s->parsed()) return jrp::cmd_solve(solve, std::cout, std::cerr);
  if (v->parsed()) return jrp::cmd_verify(verify, std::cout, std::cerr);
  return jrp::cmd_bench(bench, std::cout, std::cerr);
}
