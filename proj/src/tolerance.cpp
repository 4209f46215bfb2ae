#include "vnpert/tolerance.hpp"

#include "vnpert/errors.hpp"

namespace vnpert {

void ToleranceProfile::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !(v < 1e-3))
      fail(ErrorKind::invalid_input,
           std::string("tolerance ") + name + " must lie in (0, 1e-3)");
  };
  check(rank_eps, "rank_eps");
  check(eq_eps, "eq_eps");
  check(psd_eps, "psd_eps");
}

}  // namespace vnpert
