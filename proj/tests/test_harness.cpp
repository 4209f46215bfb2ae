#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "vnpert/errors.hpp"
#include "vnpert/harness.hpp"
#include "vnpert/linalg.hpp"

using namespace vnpert;

TEST_CASE("shape parsing round trips") {
  CHECK(Scenario::parse_shape("").empty());
  CHECK(Scenario::parse_shape("masa").empty());
  const auto shape = Scenario::parse_shape("2x1,1x2");
  REQUIRE(shape.size() == 2);
  CHECK(shape[0] == std::make_pair(2, 1));
  CHECK(shape[1] == std::make_pair(1, 2));

  Scenario s;
  s.shape = shape;
  CHECK(s.shape_string() == "2x1,1x2");
  CHECK(Scenario{}.shape_string() == "masa");

  CHECK_THROWS_AS(Scenario::parse_shape("2,1"), Error);
  CHECK_THROWS_AS(Scenario::parse_shape("axb"), Error);
}

TEST_CASE("scenario validation rejects malformed inputs") {
  Scenario s;
  s.ambient_dim = 9;
  CHECK_THROWS_AS(s.validate(), Error);
  s.ambient_dim = 3;
  s.shape = {{2, 2}};  // 4 > 3
  CHECK_THROWS_AS(s.validate(), Error);
  s.shape.clear();
  s.epsilon = -0.1;
  CHECK_THROWS_AS(s.validate(), Error);
  s.epsilon = 0.01;
  s.trials = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s.trials = 1;
  s.tol.eq_eps = 2e-3;  // tolerances live in (0, 1e-3)
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("config files mirror scenario fields") {
  std::stringstream ss;
  ss << "# experiment configuration\n"
     << "dim = 3\n"
     << "shape = 2x1,1x1\n"
     << "epsilon = 0.005\n"
     << "seed = 99\n"
     << "trials = 4\n"
     << "distance_samples = 16\n"
     << "eq_eps = 1e-8\n";
  const Scenario s = Scenario::from_config(ss);
  CHECK(s.ambient_dim == 3);
  CHECK(s.shape_string() == "2x1,1x1");
  CHECK(s.epsilon == doctest::Approx(0.005));
  CHECK(s.seed == 99);
  CHECK(s.trials == 4);
  CHECK(s.distance_samples == 16);

  std::stringstream bad;
  bad << "unknown_key = 1\n";
  CHECK_THROWS_AS(Scenario::from_config(bad), Error);
}

TEST_CASE("make_instance pinned behavior") {
  Scenario s;
  s.ambient_dim = 2;
  s.epsilon = 0.0;
  s.seed = 5;
  const Instance trivial = make_instance(s, 0);
  CHECK(trivial.certificate == 0.0);
  CHECK(operator_norm(trivial.v - Matrix::Identity(2, 2)) <= 1e-15);
  double span_gap = 0.0;
  for (const auto& b : trivial.N.basis())
    span_gap = std::max(span_gap, trivial.M.contains(b).residual);
  CHECK(span_gap <= 1e-12);

  s.epsilon = 0.01;
  const Instance perturbed = make_instance(s, 1);
  CHECK(operator_norm(perturbed.v - Matrix::Identity(2, 2)) ==
        doctest::Approx(0.01).epsilon(1e-6));
  CHECK(perturbed.certificate == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(perturbed.N.check_invariants().ok(s.tol));
  CHECK(perturbed.M.check_invariants().ok(s.tol));
  // M is the conjugate of N by v
  double conj_gap = 0.0;
  for (const auto& b : perturbed.N.basis())
    conj_gap = std::max(
        conj_gap,
        perturbed.M.contains(perturbed.v * b * perturbed.v.adjoint()).residual);
  CHECK(conj_gap <= 1e-12);
}

TEST_CASE("make_instance builds the three-block MASA of M_3") {
  Scenario s;
  s.ambient_dim = 3;
  s.shape = {{1, 1}, {1, 1}, {1, 1}};
  s.epsilon = 0.005;
  s.seed = 8;
  const Instance inst = make_instance(s, 2);
  CHECK(inst.N.dim() == 3);
  CHECK(inst.N.check_invariants().ok(s.tol));
  CHECK(verify_expectation(inst.E_N, 8, 1).pass);
  CHECK(verify_expectation(inst.E_M, 8, 1).pass);
}

TEST_CASE("run_suite is deterministic given the scenario") {
  Scenario s;
  s.ambient_dim = 2;
  s.epsilon = 0.01;
  s.seed = 33;
  s.trials = 4;
  const SuiteResult first = run_suite(s);
  const SuiteResult second = run_suite(s);
  CHECK(first.summary_json() == second.summary_json());
  REQUIRE(first.records.size() == second.records.size());
  for (std::size_t k = 0; k < first.records.size(); ++k) {
    REQUIRE(first.records[k].report.has_value() == second.records[k].report.has_value());
    if (first.records[k].report.has_value())
      CHECK(first.records[k].report->to_json_string() ==
            second.records[k].report->to_json_string());
  }
}

TEST_CASE("run_suite verdicts are consistent with the report booleans") {
  Scenario s;
  s.ambient_dim = 3;
  s.epsilon = 0.005;
  s.seed = 21;
  s.trials = 3;
  const SuiteResult result = run_suite(s);
  for (const auto& record : result.records) {
    REQUIRE(record.status == TrialStatus::ok);
    REQUIRE(record.report.has_value());
    CHECK(record.verdicts.at("bound_14") == record.report->bound_14_ok);
    CHECK(record.verdicts.at("bound_20") == record.report->bound_20_ok);
    CHECK(record.pass);
  }
  CHECK(result.summary.all_pass);
  CHECK(result.summary.passes == 3);
}

TEST_CASE("run_suite records refusals beyond the gate without failing") {
  Scenario s;
  s.ambient_dim = 2;
  s.epsilon = 0.04;  // certificate 0.08 > 1/15
  s.seed = 44;
  s.trials = 3;
  const SuiteResult result = run_suite(s);
  CHECK(result.summary.refusals == 3);
  CHECK(result.summary.errors == 0);
  CHECK(result.summary.all_pass);
  for (const auto& record : result.records) {
    CHECK(record.status == TrialStatus::refused_hypothesis);
    CHECK_FALSE(record.report.has_value());
  }
}

TEST_CASE("attempt_beyond_gate runs instances above 1/15 with the assertions intact") {
  Scenario s;
  s.ambient_dim = 2;
  s.epsilon = 0.04;  // certificate 0.08, above the gate
  s.seed = 44;
  s.trials = 3;
  s.attempt_beyond_gate = true;
  const SuiteResult result = run_suite(s);
  CHECK(result.summary.refusals == 0);
  CHECK(result.summary.errors == 0);
  CHECK(result.summary.passes == 3);
  for (const auto& record : result.records) {
    REQUIRE(record.report.has_value());
    CHECK(record.report->d.hi > 1.0 / 15.0);
    CHECK(record.report->conjugacy_residual <= 1e-8);
  }
}

TEST_CASE("observed perturbation grows with the certified distance") {
  std::vector<std::pair<double, double>> sweep;  // (max d_hi, max ||u - I||)
  for (const double epsilon : {0.001, 0.005, 0.01, 0.02}) {
    Scenario s;
    s.ambient_dim = 2;
    s.epsilon = epsilon;
    s.seed = 55;
    s.trials = 6;
    const SuiteResult result = run_suite(s);
    double max_dhi = 0.0, max_u = 0.0;
    for (const auto& record : result.records) {
      REQUIRE(record.report.has_value());
      max_dhi = std::max(max_dhi, record.report->d.hi);
      max_u = std::max(max_u, record.report->u_minus_identity);
    }
    sweep.emplace_back(max_dhi, max_u);
  }
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    CHECK(sweep[k].first > sweep[k - 1].first);
    CHECK(sweep[k].second + 1e-12 >= sweep[k - 1].second);
  }
}

TEST_CASE("suite json separates deterministic summary from timing data") {
  Scenario s;
  s.ambient_dim = 2;
  s.epsilon = 0.005;
  s.seed = 3;
  s.trials = 2;
  const SuiteResult result = run_suite(s);
  const std::string summary = result.summary_json();
  CHECK(summary.find("wall_ms") == std::string::npos);
  const std::string full = result.full_json();
  CHECK(full.find("wall_ms") != std::string::npos);
  CHECK(full.find("\"trials\"") != std::string::npos);
}
