#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vnpert/subalgebra.hpp"

namespace vnpert {

/// Idempotent positive unital bimodular projection of `domain` onto `range`,
/// held as its values on the domain basis.
class ConditionalExpectation {
 public:
  ConditionalExpectation() = default;
  ConditionalExpectation(Subalgebra domain, Subalgebra range, std::vector<Matrix> images);

  const Subalgebra& domain() const { return domain_; }
  const Subalgebra& range() const { return range_; }
  const std::vector<Matrix>& images() const { return images_; }

  /// E(x) by linear extension; x must lie in the domain span.
  Matrix apply(const Matrix& x, const ToleranceProfile& tol = {}) const;
  Matrix operator()(const Matrix& x, const ToleranceProfile& tol = {}) const {
    return apply(x, tol);
  }

 private:
  Subalgebra domain_;
  Subalgebra range_;
  std::vector<Matrix> images_;
};

/// The trace-preserving conditional expectation of L onto A: orthogonal
/// projection for the normalized-trace inner product.  Requires A inside L.
ConditionalExpectation trace_expectation(const Subalgebra& L, const Subalgebra& A,
                                         const ToleranceProfile& tol = {});

struct PpResult {
  double c_hi = 0.0;  ///< certified upper bound on the best constant c
  Matrix witness;     ///< minimizer: E(w^* w) - c w^* w loses definiteness above c_hi
};

/// Upper bound on the best c with E(x^* x) >= c x^* x, minimized over matrix
/// units, rank-one projections, random samples and local descent (budget
/// evaluations).  The probabilistic index is 1/c_hi.
PpResult pp_constant(const ConditionalExpectation& E, int budget, std::uint64_t rng_seed,
                     const ToleranceProfile& tol = {});

struct ExpectationReport {
  double idempotent = 0.0;
  double unital = 0.0;
  double range_fixing = 0.0;
  double bimodular = 0.0;
  double positivity = 0.0;  // max(0, -lambda_min) over sampled E(x^* x)
  bool pass = false;

  double max_residual() const;
  std::string to_text() const;  // flat "key value" block
};

/// Residuals of the conditional-expectation laws over `samples` random
/// elements; passes iff all residuals are at most tol.eq_eps.
ExpectationReport verify_expectation(const ConditionalExpectation& E, int samples,
                                     std::uint64_t rng_seed, const ToleranceProfile& tol = {});

}  // namespace vnpert
