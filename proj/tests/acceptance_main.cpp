// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <cstdlib>
#include <iostream>

#include "vnpert/acceptance.hpp"

int main(int argc, char** argv) {
  vnpert::AcceptanceOptions opt;
  if (argc > 1) opt.seed = std::strtoull(argv[1], nullptr, 10);
  const auto results = vnpert::run_acceptance(opt, std::cout);
  const bool ok = vnpert::all_pass(results);
  std::cout << (ok ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << " (" << results.size()
            << " criteria)\n";
  return ok ? 0 : 1;
}
