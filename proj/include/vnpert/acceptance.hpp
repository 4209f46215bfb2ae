#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace vnpert {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double wall_s = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20260808;
};

/// Runs the full acceptance suite, streaming one "PASS/FAIL <id> <name>"
/// line per criterion to `out`.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& out);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace vnpert
