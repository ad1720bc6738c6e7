#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "jrp/commands.hpp"
#include "jrp/exact.hpp"
#include "jrp/generate.hpp"
#include "jrp/io.hpp"

using namespace jrp;
namespace fs = std::filesystem;

namespace {

// A fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("jrp_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_generated(const fs::path& dir, const std::string& profile, std::uint64_t seed,
                            const std::string& name) {
  std::string path = (dir / name).string();
  GenerateArgs g;
  g.profile = profile;
  g.seed = seed;
  g.out = path;
  std::ostringstream out, err;
  REQUIRE(cmd_generate(g, out, err) == kExitOk);
  return path;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(JRP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli: generation is deterministic and round-trips byte for byte") {
  for (const std::string profile : {"tiny-exact", "jrpd", "general", "colorful", "gap(7)", "setcover"}) {
    for (std::uint64_t seed : {1u, 2u, 99u}) {
      std::string a = dump_json(instance_to_json(generate_instance(profile, seed)));
      std::string b = dump_json(instance_to_json(generate_instance(profile, seed)));
      CHECK(a == b);
      std::string again = dump_json(instance_to_json(instance_from_json(parse_json(a))));
      CHECK(again == a);
    }
  }
  CHECK(dump_json(instance_to_json(generate_instance("jrpd", 1))) !=
        dump_json(instance_to_json(generate_instance("jrpd", 2))));
  CHECK_THROWS_AS(generate_instance("bogus", 1), Error);
  CHECK_THROWS_AS(generate_instance("gap(0)", 1), Error);
}

TEST_CASE("cli: gap profile shape") {
  Instance inst = generate_instance("gap(10)", 3);
  CHECK(inst.n_items == 1);
  CHECK(inst.horizon == 10);
  CHECK(inst.k0 == 1.0);
  CHECK(inst.k_item[0] == 0.0);
  CHECK(inst.rejection_limits[0] == 9.0);
  CHECK(inst.n_demands() == 10);
  CHECK(inst.is_deadline_only());
}

TEST_CASE("cli: tiny-exact instances stay within brute force") {
  auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Instance inst = generate_instance("tiny-exact", seed);
    CHECK(inst.n_items <= 3);
    CHECK(inst.horizon <= 6);
    CHECK(inst.n_demands() <= 8);
    CHECK(inst.n_colors <= 2);
    CHECK_NOTHROW(brute_force_opt(inst));
  }
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 5.0);
}

TEST_CASE("cli: solve prints the gap summary and verify accepts it") {
  fs::path dir = scratch("solve");
  std::string inst = write_generated(dir, "gap(10)", 1, "gap.json");
  SolveArgs s;
  s.instance = inst;
  s.algo = "approx";
  s.guess = "none";
  std::ostringstream out, err;
  REQUIRE(cmd_solve(s, out, err) == kExitOk);
  CHECK(out.str().find("lp=0.1 cost=1.0 ratio=10\n") != std::string::npos);
  CHECK(fs::exists(dir / "gap.sol.json"));
  CHECK(fs::exists(dir / "gap.cert.json"));

  VerifyArgs v{inst, (dir / "gap.sol.json").string(), (dir / "gap.cert.json").string()};
  std::ostringstream vout, verr;
  CHECK(cmd_verify(v, vout, verr) == kExitOk);
  v.certificate.clear();
  std::ostringstream fout, ferr;
  CHECK(cmd_verify(v, fout, ferr) == kExitOk);
  CHECK(fout.str().find("no certificate") != std::string::npos);

  // Every served demand turned into a late service.
  nlohmann::json sol = parse_json(read_text_file(v.solution));
  for (auto& d : sol["disposition"]) {
    if (d.is_number()) d = 10;
  }
  sol["orders"] = nlohmann::json::array();
  write_text_file(v.solution, dump_json(sol));
  std::ostringstream bout, berr;
  CHECK(cmd_verify(v, bout, berr) == kExitInfeasible);
  CHECK(bout.str().find("FAIL") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: every algorithm's output verifies") {
  fs::path dir = scratch("algos");
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    std::string inst = write_generated(dir, "tiny-exact", seed, "t" + std::to_string(seed) + ".json");
    double opt = brute_force_opt(read_instance(inst)).cost;
    for (const std::string algo : {"exact", "approx", "improved"}) {
      SolveArgs s;
      s.instance = inst;
      s.algo = algo;
      std::ostringstream out, err;
      REQUIRE_MESSAGE(cmd_solve(s, out, err) == kExitOk, err.str());
      Certificate cert = certificate_from_json(parse_json(read_text_file((dir / ("t" + std::to_string(seed) + ".cert.json")).string())));
      if (algo == "exact") CHECK(cert.cost == doctest::Approx(opt));
      CHECK(cert.cost >= opt - 1e-9);
      VerifyArgs v{inst, (dir / ("t" + std::to_string(seed) + ".sol.json")).string(),
                   (dir / ("t" + std::to_string(seed) + ".cert.json")).string()};
      std::ostringstream vout, verr;
      CHECK_MESSAGE(cmd_verify(v, vout, verr) == kExitOk, vout.str());
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("cli: bench tables") {
  fs::path empty = scratch("bench_empty");
  BenchArgs b;
  b.corpus = empty.string();
  b.json_out = (empty / "out.txt").string();
  std::ostringstream out, err;
  CHECK(cmd_bench(b, out, err) == kExitOk);
  nlohmann::json doc = parse_json(read_text_file(b.json_out));
  CHECK(doc["rows"].empty());
  fs::remove_all(empty);

  fs::path dir = scratch("bench_gap");
  for (int t : {5, 10, 20}) write_generated(dir, "gap(" + std::to_string(t) + ")", 1, "gap" + std::to_string(t) + ".json");
  write_generated(dir, "tiny-exact", 4, "tiny.json");
  BenchArgs g;
  g.corpus = dir.string();
  g.algos = {"exact", "approx"};
  g.json_out = (dir / "bench.out").string();
  g.csv_out = (dir / "bench.csv").string();
  std::ostringstream gout, gerr;
  REQUIRE(cmd_bench(g, gout, gerr) == kExitOk);
  nlohmann::json rows = parse_json(read_text_file(g.json_out))["rows"];
  REQUIRE(rows.size() == 4);
  CHECK(rows[0]["instance"] == "gap10.json");
  for (const auto& r : rows) {
    std::string name = r["instance"];
    if (name.rfind("gap", 0) != 0) continue;
    int t = std::stoi(name.substr(3));
    CHECK(r["lp"].get<double>() * t == doctest::Approx(1.0));
    CHECK(r["approx"]["cost"].get<double>() == doctest::Approx(1.0));
    CHECK(r["approx"]["vs_exact"].get<double>() == doctest::Approx(1.0));
  }
  CHECK(gout.str().find("max_vs_exact") != std::string::npos);
  CHECK(read_text_file(g.csv_out).rfind("instance,lp,exact.cost", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("cli: exit codes of the binary") {
  fs::path dir = scratch("exit");
  std::string good = write_generated(dir, "gap(5)", 1, "g.json");
  write_text_file((dir / "bad.json").string(), "{ not json");
  CHECK(run_cli("solve " + good + " --algo approx --guess none") == 0);
  CHECK(run_cli("verify " + good + " " + (dir / "g.sol.json").string() + " --certificate " +
                (dir / "g.cert.json").string()) == 0);
  CHECK(run_cli("solve " + (dir / "bad.json").string()) == 2);
  CHECK(run_cli("solve " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("generate --profile nothing") == 2);
  CHECK(run_cli("solve") == 2);
  CHECK(run_cli("solve " + good + " --algo magic") == 2);
  CHECK(run_cli("generate --profile 'gap(4)' --seed 3 -o " + (dir / "a.json").string()) == 0);
  CHECK(run_cli("generate --profile 'gap(4)' --seed 3 -o " + (dir / "b.json").string()) == 0);
  CHECK(read_text_file((dir / "a.json").string()) == read_text_file((dir / "b.json").string()));
  fs::remove_all(dir);
}
