#include "vnpert/harness.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <sstream>

#include "json.hpp"
#include "vnpert/errors.hpp"
#include "vnpert/linalg.hpp"

namespace vnpert {

namespace {

constexpr double kGate = 1.0 / 15.0;

std::uint64_t derive_seed(std::uint64_t seed, int trial, int salt) {
  return Rng::stream(seed, static_cast<std::uint64_t>(trial) * 16 + salt).next_u64();
}

}  // namespace

const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::refused_hypothesis: return "refused-hypothesis";
    case TrialStatus::error: return "error";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (ambient_dim < 2 || ambient_dim > 8)
    fail(ErrorKind::invalid_input, "Scenario: ambient_dim must lie in [2, 8]");
  int used = 0;
  for (auto [k, m] : shape) {
    if (k <= 0 || m <= 0) fail(ErrorKind::invalid_input, "Scenario: nonpositive shape entry");
    used += k * m;
  }
  if (used > ambient_dim)
    fail(ErrorKind::invalid_input, "Scenario: blocks exceed the ambient dimension");
  if (epsilon < 0.0) fail(ErrorKind::invalid_input, "Scenario: epsilon must be nonnegative");
  if (trials < 1) fail(ErrorKind::invalid_input, "Scenario: trials must be positive");
  if (distance_samples < 1)
    fail(ErrorKind::invalid_input, "Scenario: distance_samples must be positive");
  tol.validate();
}

std::vector<std::pair<int, int>> Scenario::parse_shape(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  if (text.empty() || text == "masa") return out;  // empty shape means MASA
  std::istringstream is(text);
  std::string token;
  while (std::getline(is, token, ',')) {
    const auto x = token.find('x');
    if (x == std::string::npos)
      fail(ErrorKind::invalid_input, "parse_shape: expected entries of the form KxM");
    try {
      out.emplace_back(std::stoi(token.substr(0, x)), std::stoi(token.substr(x + 1)));
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_input, "parse_shape: bad integer in '" + token + "'");
    }
  }
  return out;
}

std::string Scenario::shape_string() const {
  if (shape.empty()) return "masa";
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i].first << 'x' << shape[i].second;
  }
  return os.str();
}

Scenario Scenario::from_config(std::istream& is) {
  Scenario s;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string t) {
      const auto a = t.find_first_not_of(" \t\r");
      const auto b = t.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    try {
      if (key == "dim") s.ambient_dim = std::stoi(value);
      else if (key == "shape") s.shape = parse_shape(value);
      else if (key == "epsilon") s.epsilon = std::stod(value);
      else if (key == "seed") s.seed = std::stoull(value);
      else if (key == "trials") s.trials = std::stoi(value);
      else if (key == "distance_samples") s.distance_samples = std::stoi(value);
      else if (key == "attempt_beyond_gate") s.attempt_beyond_gate = std::stoi(value) != 0;
      else if (key == "rank_eps") s.tol.rank_eps = std::stod(value);
      else if (key == "eq_eps") s.tol.eq_eps = std::stod(value);
      else if (key == "psd_eps") s.tol.psd_eps = std::stod(value);
      else
        fail(ErrorKind::invalid_input,
             "Scenario config: unknown key '" + key + "' on line " + std::to_string(lineno));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_input,
           "Scenario config: bad value for '" + key + "' on line " + std::to_string(lineno));
    }
  }
  return s;
}

Instance make_instance(const Scenario& s, int trial) {
  s.validate();
  const int n = s.ambient_dim;
  Rng rng = Rng::stream(s.seed, static_cast<std::uint64_t>(trial) * 16);

  const Subalgebra L = Subalgebra::full(n);
  const std::vector<std::pair<int, int>> shape =
      s.shape.empty() ? std::vector<std::pair<int, int>>(n, {1, 1}) : s.shape;
  const Subalgebra base = Subalgebra::block_algebra(n, shape);
  const Matrix embed = haar_unitary(L, rng, s.tol);
  const Subalgebra N = base.conjugated(embed);

  Matrix v = Matrix::Identity(n, n);
  if (s.epsilon > 0.0) {
    Matrix h;
    double norm = 0.0;
    do {
      Matrix g(n, n);
      for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = rng.complex_gaussian();
      h = hermitize(g);
      norm = operator_norm(h);
    } while (norm <= s.tol.rank_eps);
    h /= norm;
    // spectrum of h sits in [-1, 1] with an extreme at 1 in modulus, so
    // ||exp(i theta h) - I|| = 2 sin(theta/2)
    const double theta = 2.0 * std::asin(0.5 * s.epsilon);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases(n);
    for (int k = 0; k < n; ++k) phases(k) = std::exp(Complex(0.0, theta * es.eigenvalues()(k)));
    v = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  }

  Instance inst;
  inst.L = L;
  inst.N = N;
  inst.M = N.conjugated(v);
  inst.E_N = trace_expectation(L, inst.N, s.tol);
  inst.E_M = trace_expectation(L, inst.M, s.tol);
  inst.v = v;
  inst.certificate = 2.0 * operator_norm(v - Matrix::Identity(n, n));
  return inst;
}

namespace {

TrialRecord run_trial(const Scenario& s, int trial) {
  TrialRecord record;
  record.trial = trial;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Instance inst = make_instance(s, trial);
    const DistanceInterval d =
        distance_interval(inst.N, inst.M, inst.E_M, inst.E_N, s.distance_samples,
                          derive_seed(s.seed, trial, 1), inst.certificate, s.tol);
    record.distance = d;
    if (!(d.hi < kGate) && !s.attempt_beyond_gate) {
      record.status = TrialStatus::refused_hypothesis;
      std::ostringstream msg;
      msg << "distance bound " << d.hi << " is not below 1/15";
      record.error = msg.str();
    } else {
      PerturbReport report = conjugating_unitary(inst.N, inst.M, inst.L, inst.E_N, inst.E_M, d,
                                                 s.tol, s.attempt_beyond_gate);

      double mutual = 0.0;
      for (const auto& b : inst.M.basis())
        mutual = std::max(
            mutual,
            inst.N.contains(report.unitary * b * report.unitary.adjoint(), s.tol).residual);
      for (const auto& b : inst.N.basis())
        mutual = std::max(
            mutual,
            inst.M.contains(report.unitary.adjoint() * b * report.unitary, s.tol).residual);

      record.verdicts["unitary"] = report.unitary_defect <= 1e-10;
      record.verdicts["mutual_containment"] = mutual <= 1e-8;
      record.verdicts["bound_20"] = report.bound_20_ok;
      record.verdicts["bound_14"] = report.bound_14_ok;
      record.verdicts["averaged_within_2gamma"] =
          report.iso.averaged_minus_jones <= 2.0 * report.iso.gamma + s.tol.eq_eps;
      record.verdicts["window_within_4gamma"] =
          report.iso.window_minus_jones <= 4.0 * report.iso.gamma + s.tol.eq_eps;
      record.verdicts["exchange_within_4sqrt2gamma"] =
          report.iso.exchange_minus_identity <=
          4.0 * std::sqrt(2.0) * report.iso.gamma + s.tol.eq_eps;
      record.verdicts["phi_within_8sqrt2gamma"] =
          report.iso.phi_vs_expectation <=
          8.0 * std::sqrt(2.0) * report.iso.gamma + s.tol.eq_eps;
      record.verdicts["intertwining"] = report.intertwining_residual <= s.tol.eq_eps;

      record.pass = true;
      for (const auto& [name, ok] : record.verdicts) record.pass = record.pass && ok;
      record.report = std::move(report);
      record.status = TrialStatus::ok;
    }
  } catch (const Error& e) {
    record.status = e.kind() == ErrorKind::hypothesis_violation ? TrialStatus::refused_hypothesis
                                                                : TrialStatus::error;
    record.error = e.what();
  } catch (const std::exception& e) {
    record.status = TrialStatus::error;
    record.error = e.what();
  }
  record.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return record;
}

nlohmann::json scenario_json(const Scenario& s) {
  return {
      {"dim", s.ambient_dim},
      {"shape", s.shape_string()},
      {"epsilon", s.epsilon},
      {"seed", s.seed},
      {"trials", s.trials},
      {"distance_samples", s.distance_samples},
      {"attempt_beyond_gate", s.attempt_beyond_gate},
  };
}

nlohmann::json summary_to_json(const SuiteSummary& summary) {
  nlohmann::json j;
  j["trials"] = summary.trials;
  j["passes"] = summary.passes;
  j["failures"] = summary.failures;
  j["refusals"] = summary.refusals;
  j["errors"] = summary.errors;
  j["max_u_over_dhi"] = summary.max_u_over_dhi;
  j["max_residuals"] = summary.max_residuals;
  j["all_pass"] = summary.all_pass;
  return j;
}

}  // namespace

SuiteResult run_suite(const Scenario& s) {
  s.validate();
  SuiteResult result;
  result.scenario = s;
  result.records.resize(s.trials);

  // single-trial suites leave the team to the inner kernels
#pragma omp parallel for schedule(dynamic) if (s.trials > 1)
  for (int trial = 0; trial < s.trials; ++trial) result.records[trial] = run_trial(s, trial);

  SuiteSummary& summary = result.summary;
  summary.trials = s.trials;
  auto track = [&](const std::string& key, double value) {
    auto it = summary.max_residuals.find(key);
    if (it == summary.max_residuals.end())
      summary.max_residuals[key] = value;
    else
      it->second = std::max(it->second, value);
  };
  for (const auto& record : result.records) {
    switch (record.status) {
      case TrialStatus::ok:
        record.pass ? ++summary.passes : ++summary.failures;
        break;
      case TrialStatus::refused_hypothesis: ++summary.refusals; break;
      case TrialStatus::error: ++summary.errors; break;
    }
    if (record.report.has_value()) {
      const PerturbReport& r = *record.report;
      if (r.d.hi > 0.0)
        summary.max_u_over_dhi = std::max(summary.max_u_over_dhi, r.u_minus_identity / r.d.hi);
      track("u_minus_I", r.u_minus_identity);
      track("conjugacy", r.conjugacy_residual);
      track("intertwining", r.intertwining_residual);
      track("unitary_defect", r.unitary_defect);
      track("offdiag", r.offdiag_residual);
      track("hom", r.iso.hom_residual);
    }
  }
  summary.all_pass = summary.failures == 0 && summary.errors == 0;
  return result;
}

std::string SuiteResult::summary_json(int indent) const {
  nlohmann::json j;
  j["scenario"] = scenario_json(scenario);
  j["summary"] = summary_to_json(summary);
  return j.dump(indent);
}

std::string SuiteResult::full_json(int indent) const {
  nlohmann::json j;
  j["scenario"] = scenario_json(scenario);
  j["summary"] = summary_to_json(summary);
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& record : records) {
    nlohmann::json t;
    t["trial"] = record.trial;
    t["status"] = to_string(record.status);
    t["wall_ms"] = record.wall_ms;
    if (!record.error.empty()) t["error"] = record.error;
    if (record.distance.has_value()) {
      t["d_lo"] = record.distance->lo;
      t["d_hi"] = record.distance->hi;
    }
    if (record.report.has_value()) {
      t["report"] = nlohmann::json::parse(record.report->to_json_string());
      t["verdicts"] = record.verdicts;
      t["pass"] = record.pass;
    }
    trials.push_back(std::move(t));
  }
  j["trials"] = std::move(trials);
  return j.dump(indent);
}

}  // namespace vnpert
