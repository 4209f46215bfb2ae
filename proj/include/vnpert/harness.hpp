#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vnpert/perturbation.hpp"

namespace vnpert {

/// Randomized perturbed-inclusion experiment description.
struct Scenario {
  int ambient_dim = 2;
  /// (block size, multiplicity) pairs; sizes times multiplicities must not
  /// exceed ambient_dim.  Empty means MASA (all-1 blocks).
  std::vector<std::pair<int, int>> shape;
  double epsilon = 0.01;  ///< target ||v - I|| of the conjugating perturbation
  std::uint64_t seed = 1;
  int trials = 1;
  int distance_samples = 32;
  bool attempt_beyond_gate = false;  ///< attempt d.hi >= 1/15 instances anyway
  ToleranceProfile tol;

  void validate() const;
  /// "k1xm1,k2xm2,..." -> shape list
  static std::vector<std::pair<int, int>> parse_shape(const std::string& text);
  std::string shape_string() const;
  /// "key = value" lines; '#' starts a comment.
  static Scenario from_config(std::istream& is);
};

struct Instance {
  Subalgebra N, M, L;
  ConditionalExpectation E_N, E_M;
  Matrix v;            ///< conjugating unitary used to build M = v N v^*
  double certificate;  ///< 2 ||v - I||
};

/// Random-unitary conjugate of the block multimatrix algebra, perturbed by
/// v = exp(i eps h) scaled so ||v - I|| equals epsilon.
Instance make_instance(const Scenario& s, int trial);

enum class TrialStatus { ok, refused_hypothesis, error };
const char* to_string(TrialStatus s);

struct TrialRecord {
  int trial = 0;
  TrialStatus status = TrialStatus::ok;
  std::string error;
  double wall_ms = 0.0;
  std::optional<DistanceInterval> distance;  ///< set once the estimate ran
  std::optional<PerturbReport> report;
  std::map<std::string, bool> verdicts;
  bool pass = false;
};

struct SuiteSummary {
  int trials = 0;
  int passes = 0;
  int failures = 0;
  int refusals = 0;
  int errors = 0;
  double max_u_over_dhi = 0.0;
  std::map<std::string, double> max_residuals;
  bool all_pass = false;
};

struct SuiteResult {
  Scenario scenario;
  std::vector<TrialRecord> records;
  SuiteSummary summary;

  /// Deterministic given the scenario: no timing data inside.
  std::string summary_json(int indent = -1) const;
  /// Full report including per-trial wall times.
  std::string full_json(int indent = -1) const;
};

/// Runs all trials (in parallel, trial order preserved); individual trial
/// errors are recorded, never thrown.
SuiteResult run_suite(const Scenario& s);

}  // namespace vnpert
