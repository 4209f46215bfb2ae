#pragma once

namespace vnpert {

/// Numerical thresholds shared by all operations.
struct ToleranceProfile {
  double rank_eps = 1e-9;  ///< numerical rank / zero decisions
  double eq_eps = 1e-8;    ///< declaring operator equalities
  double psd_eps = 1e-12;  ///< slack for positivity checks

  /// All fields must be strictly positive and below 1e-3.
  void validate() const;
};

}  // namespace vnpert
