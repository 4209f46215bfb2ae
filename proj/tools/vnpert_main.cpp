// vnpert: randomized perturbed-inclusion experiments for close matrix
// subalgebras.  Subcommands: run, check, distance, conjugate.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vnpert/acceptance.hpp"
#include "vnpert/errors.hpp"
#include "vnpert/harness.hpp"

namespace {

using namespace vnpert;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream os(out_path);
    if (!os) fail(ErrorKind::invalid_input, "cannot open output file " + out_path);
    os << text << '\n';
  }
}

struct RunOptions {
  std::string config_path;
  std::string out_path;
  Scenario scenario;
};

int cmd_run(const RunOptions& opt, const CLI::App& cmd) {
  Scenario s = opt.scenario;
  if (!opt.config_path.empty()) {
    std::ifstream is(opt.config_path);
    if (!is) fail(ErrorKind::invalid_input, "cannot open config file " + opt.config_path);
    s = Scenario::from_config(is);
    // flags given on the command line override the config file
    if (cmd.count("--dim")) s.ambient_dim = opt.scenario.ambient_dim;
    if (cmd.count("--shape")) s.shape = opt.scenario.shape;
    if (cmd.count("--epsilon")) s.epsilon = opt.scenario.epsilon;
    if (cmd.count("--seed")) s.seed = opt.scenario.seed;
    if (cmd.count("--trials")) s.trials = opt.scenario.trials;
    if (cmd.count("--distance-samples")) s.distance_samples = opt.scenario.distance_samples;
    if (cmd.count("--attempt-beyond-gate"))
      s.attempt_beyond_gate = opt.scenario.attempt_beyond_gate;
  }

  const SuiteResult result = run_suite(s);
  emit(result.full_json(2), opt.out_path);
  if (!opt.out_path.empty()) {
    std::cout << "trials " << result.summary.trials << ": " << result.summary.passes
              << " passed, " << result.summary.failures << " failed, "
              << result.summary.refusals << " refused, " << result.summary.errors
              << " errored\n";
  }
  return result.summary.all_pass ? 0 : 1;
}

int cmd_check(std::uint64_t seed) {
  AcceptanceOptions opt;
  opt.seed = seed;
  const auto results = run_acceptance(opt, std::cout);
  return all_pass(results) ? 0 : 1;
}

int cmd_distance(const std::string& n_path, const std::string& m_path, int samples,
                 std::uint64_t seed, std::optional<double> certificate,
                 const std::string& out_path) {
  const Subalgebra N = Subalgebra::load(n_path);
  const Subalgebra M = Subalgebra::load(m_path);
  if (N.ambient_dim() != M.ambient_dim())
    fail(ErrorKind::invalid_input, "subalgebra files have different ambient dimensions");
  const Subalgebra L = Subalgebra::full(N.ambient_dim());
  const auto E_N = trace_expectation(L, N);
  const auto E_M = trace_expectation(L, M);
  const DistanceInterval d = distance_interval(N, M, E_M, E_N, samples, seed, certificate);

  nlohmann::json j;
  j["d_lo"] = d.lo;
  j["d_hi"] = d.hi;
  j["hi_source"] = to_string(d.hi_source);
  emit(j.dump(2), out_path);
  return 0;
}

int cmd_conjugate(const std::string& n_path, const std::string& m_path, int samples,
                  std::uint64_t seed, std::optional<double> certificate, bool beyond_gate,
                  const std::string& out_path) {
  const Subalgebra N = Subalgebra::load(n_path);
  const Subalgebra M = Subalgebra::load(m_path);
  if (N.ambient_dim() != M.ambient_dim())
    fail(ErrorKind::invalid_input, "subalgebra files have different ambient dimensions");
  const Subalgebra L = Subalgebra::full(N.ambient_dim());
  const auto E_N = trace_expectation(L, N);
  const auto E_M = trace_expectation(L, M);
  const DistanceInterval d = distance_interval(N, M, E_M, E_N, samples, seed, certificate);
  const PerturbReport report =
      conjugating_unitary(N, M, L, E_N, E_M, d, ToleranceProfile{}, beyond_gate);
  emit(report.to_json_string(2), out_path);
  return report.bound_14_ok && report.bound_20_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perturbed matrix-subalgebra toolkit: distance estimation, isomorphism and "
               "conjugating-unitary construction with certified bounds"};
  app.require_subcommand(1);

  RunOptions run_opt;
  std::string run_shape;
  auto* run = app.add_subcommand("run", "run randomized conjugation trials");
  run->add_option("--dim", run_opt.scenario.ambient_dim, "ambient matrix dimension (2-8)");
  run->add_option("--shape", run_shape, "block structure k1xm1,k2xm2,... (default: masa)");
  run->add_option("--epsilon", run_opt.scenario.epsilon, "perturbation scale ||v - I||");
  run->add_option("--trials", run_opt.scenario.trials, "number of trials");
  run->add_option("--seed", run_opt.scenario.seed, "base seed");
  run->add_option("--distance-samples", run_opt.scenario.distance_samples,
                  "sampled unitaries per distance estimate");
  run->add_flag("--attempt-beyond-gate", run_opt.scenario.attempt_beyond_gate,
                "attempt instances whose distance bound is not below 1/15");
  run->add_option("--config", run_opt.config_path, "key = value config file (flags override)");
  run->add_option("--out", run_opt.out_path, "write the JSON report here");

  std::uint64_t check_seed = AcceptanceOptions{}.seed;
  auto* check = app.add_subcommand("check", "run the acceptance suites");
  check->add_option("--seed", check_seed, "base seed for the acceptance suites");

  std::string d_n, d_m, d_out;
  int d_samples = 64;
  std::uint64_t d_seed = 1;
  double d_cert = -1.0;
  auto* distance = app.add_subcommand("distance", "distance interval between two subalgebras");
  distance->add_option("N", d_n, "subalgebra file")->required();
  distance->add_option("M", d_m, "subalgebra file")->required();
  distance->add_option("--samples", d_samples, "sampled unitaries per side");
  distance->add_option("--seed", d_seed, "sampling seed");
  distance->add_option("--certificate", d_cert, "conjugation certificate 2||v - I||, if known");
  distance->add_option("--out", d_out, "write the JSON interval here");

  std::string c_n, c_m, c_out;
  int c_samples = 64;
  std::uint64_t c_seed = 1;
  double c_cert = -1.0;
  bool c_beyond = false;
  auto* conjugate =
      app.add_subcommand("conjugate", "construct the conjugating unitary for two subalgebras");
  conjugate->add_option("N", c_n, "subalgebra file")->required();
  conjugate->add_option("M", c_m, "subalgebra file")->required();
  conjugate->add_option("--samples", c_samples, "sampled unitaries per distance estimate");
  conjugate->add_option("--seed", c_seed, "sampling seed");
  conjugate->add_option("--certificate", c_cert, "conjugation certificate 2||v - I||, if known");
  conjugate->add_flag("--attempt-beyond-gate", c_beyond,
                      "attempt even when the distance bound is not below 1/15");
  conjugate->add_option("--out", c_out, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (run->count("--shape")) run_opt.scenario.shape = Scenario::parse_shape(run_shape);
      return cmd_run(run_opt, *run);
    }
    if (check->parsed()) return cmd_check(check_seed);
    if (distance->parsed())
      return cmd_distance(d_n, d_m, d_samples, d_seed,
                          d_cert >= 0.0 ? std::optional<double>(d_cert) : std::nullopt, d_out);
    if (conjugate->parsed())
      return cmd_conjugate(c_n, c_m, c_samples, c_seed,
                           c_cert >= 0.0 ? std::optional<double>(c_cert) : std::nullopt,
                           c_beyond, c_out);
  } catch (const vnpert::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
