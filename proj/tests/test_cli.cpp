// End-to-end checks of the command-line tool through its public surface:
// subcommands, file formats, config handling and exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "vnpert/harness.hpp"
#include "vnpert/linalg.hpp"

using namespace vnpert;

namespace {

int run_command(const std::string& args) {
  const std::string command = std::string(VNPERT_BIN) + " " + args;
  const int status = std::system(command.c_str());
  return status < 0 ? status : (status >> 8) & 0xff;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  return nlohmann::json::parse(is);
}

struct Files {
  std::string n = "cli_n.alg";
  std::string m = "cli_m.alg";
  double certificate = 0.0;

  Files() {
    Scenario s;
    s.ambient_dim = 2;
    s.epsilon = 0.01;
    s.seed = 77;
    const Instance inst = make_instance(s, 0);
    inst.N.save(n);
    inst.M.save(m);
    certificate = inst.certificate;
  }
};

}  // namespace

TEST_CASE("run subcommand writes a report and exits cleanly") {
  CHECK(run_command("run --dim 2 --epsilon 0.005 --trials 2 --seed 9 --out cli_run.json") == 0);
  const auto report = read_json("cli_run.json");
  CHECK(report["summary"]["passes"] == 2);
  CHECK(report["summary"]["all_pass"] == true);
  CHECK(report["trials"].size() == 2);
}

TEST_CASE("run subcommand is byte-deterministic for a fixed scenario") {
  REQUIRE(run_command("run --dim 2 --epsilon 0.01 --trials 2 --seed 5 --out cli_a.json") == 0);
  REQUIRE(run_command("run --dim 2 --epsilon 0.01 --trials 2 --seed 5 --out cli_b.json") == 0);
  const auto a = read_json("cli_a.json");
  const auto b = read_json("cli_b.json");
  CHECK(a["summary"].dump() == b["summary"].dump());
  CHECK(a["trials"][0]["report"].dump() == b["trials"][0]["report"].dump());
}

TEST_CASE("config file drives run and flags override it") {
  {
    std::ofstream config("cli_config.txt");
    config << "dim = 2\n"
           << "epsilon = 0.04\n"  // would be refused
           << "trials = 2\n"
           << "seed = 12\n";
  }
  CHECK(run_command("run --config cli_config.txt --out cli_cfg.json") == 0);
  auto refused = read_json("cli_cfg.json");
  CHECK(refused["summary"]["refusals"] == 2);

  // the epsilon flag overrides the config value
  CHECK(run_command("run --config cli_config.txt --epsilon 0.005 --out cli_cfg2.json") == 0);
  auto overridden = read_json("cli_cfg2.json");
  CHECK(overridden["scenario"]["epsilon"] == 0.005);
  CHECK(overridden["summary"]["passes"] == 2);
}

TEST_CASE("distance subcommand reads subalgebra files and reports the interval") {
  const Files files;
  std::ostringstream cmd;
  cmd << "distance " << files.n << " " << files.m << " --certificate " << files.certificate
      << " --out cli_distance.json";
  CHECK(run_command(cmd.str()) == 0);
  const auto interval = read_json("cli_distance.json");
  CHECK(interval["d_lo"].get<double>() <= interval["d_hi"].get<double>());
  CHECK(interval["d_hi"].get<double>() <= files.certificate + 1e-12);
}

TEST_CASE("conjugate subcommand produces a certified report") {
  const Files files;
  std::ostringstream cmd;
  cmd << "conjugate " << files.n << " " << files.m << " --certificate " << files.certificate
      << " --out cli_conjugate.json";
  CHECK(run_command(cmd.str()) == 0);
  const auto report = read_json("cli_conjugate.json");
  CHECK(report["bound_20_ok"] == true);
  CHECK(report["bound_14_ok"] == true);
  CHECK(report["conjugacy_residual"].get<double>() <= 1e-8);
  CHECK(report["u_minus_I"].get<double>() <= 20.0 * report["d_hi"].get<double>());
}

TEST_CASE("malformed input files yield a distinct exit code") {
  {
    std::ofstream bad("cli_bad.alg");
    bad << "2 1\n2 2\n1 0\n0 0\n0 0\n0 0\n";  // span{e11}: not unital
  }
  const Files files;
  CHECK(run_command("distance cli_bad.alg " + files.m + " --out cli_bad.json") == 2);
}
