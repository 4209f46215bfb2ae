#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vnpert/basic_construction.hpp"
#include "vnpert/expectation.hpp"
#include "vnpert/subalgebra.hpp"

namespace vnpert {

enum class HiSource { coarse_bound, conjugation_certificate };
const char* to_string(HiSource s);

struct DistanceInterval {
  double lo = 0.0;
  double hi = 0.0;
  HiSource hi_source = HiSource::coarse_bound;
};

/// Interval certified to contain the Hausdorff distance between the unit
/// balls of N and M.  lo comes from sampled unitaries of either algebra
/// against the opposite expectation; hi is the smaller of a coarse rigorous
/// bound from the singular values of (id - E) on the other algebra and, when
/// supplied, a conjugation certificate 2||v - I||.
DistanceInterval distance_interval(const Subalgebra& N, const Subalgebra& M,
                                   const ConditionalExpectation& E_M,
                                   const ConditionalExpectation& E_N, int samples,
                                   std::uint64_t rng_seed,
                                   std::optional<double> certificate = std::nullopt,
                                   const ToleranceProfile& tol = {});

/// Linear map between subalgebras, held as images of the domain basis.
struct SubalgebraMap {
  Subalgebra domain;
  Subalgebra codomain;
  std::vector<Matrix> images;

  Matrix apply(const Matrix& x, const ToleranceProfile& tol = {}) const;
  Matrix operator()(const Matrix& x, const ToleranceProfile& tol = {}) const {
    return apply(x, tol);
  }
  /// Codomain-coefficients of the images: dim(codomain) x dim(domain).
  Matrix coefficient_matrix() const;
  SubalgebraMap inverse(const ToleranceProfile& tol = {}) const;

  static SubalgebraMap identity(const Subalgebra& A);
};

/// max over sampled Haar unitaries u of the domain of ||phi(u) - u||; a
/// lower estimate of ||phi - id|| (tight in the limit, since convex
/// combinations of unitaries fill the unit ball).
double map_norm_estimate(const SubalgebraMap& phi, int samples, std::uint64_t rng_seed,
                         const ToleranceProfile& tol = {});

struct IsoCertificate {
  SubalgebraMap phi;  ///< *-isomorphism N -> M
  Matrix averaged_jones;       ///< Haar average of the Jones projection over N (t)
  Matrix window_projection;    ///< spectral projection of its Hermitian part (p)
  Matrix exchange_unitary;     ///< unitary moving the Jones projection onto it (w)
  double gamma = 0.0;          ///< 1.01 * d.hi, the certified closeness scale
  double norm_phi_minus_id_lo = 0.0;  ///< sampled lower estimate of ||phi - id||
  double hom_residual = 0.0;   ///< multiplicativity/adjoint/unit defects on basis pairs

  // certified intermediate residuals (operator norm)
  double averaged_minus_jones = 0.0;   ///< ||t - e||        <= 2 gamma
  double window_minus_jones = 0.0;     ///< ||p - e||        <= 4 gamma
  double exchange_minus_identity = 0.0;///< ||w - I||        <= 4 sqrt(2) gamma
  double phi_vs_expectation = 0.0;     ///< max ||phi(b) - E_M(b)|| <= 8 sqrt(2) gamma
};

/// The isomorphism pipeline: basic construction for E_M, Haar average of the
/// Jones projection over N, spectral projection of its Hermitian part,
/// projection-exchange unitary, and the corner decoding of
/// e w^* pi(x) w e.  Requires d.hi < 1/15; every intermediate bound is
/// asserted with eq_eps slack.  attempt_beyond_gate relaxes the hypothesis
/// gate up to the point where the spectral clusters would merge; the runtime
/// assertions still apply.
IsoCertificate build_isomorphism(const Subalgebra& N, const Subalgebra& M,
                                 const Subalgebra& L, const ConditionalExpectation& E_N,
                                 const ConditionalExpectation& E_M, const DistanceInterval& d,
                                 const ToleranceProfile& tol = {},
                                 bool attempt_beyond_gate = false);

/// Conditional expectation of the 2x2 amplification of L onto
/// K = { diag(x, phi(x)) : x in N }:
///   [[a, b], [c, d]] -> diag( (E_N(a) + phi^{-1}(E_M(d)))/2,
///                             (phi(E_N(a)) + E_M(d))/2 ).
ConditionalExpectation ek_expectation(const Subalgebra& N, const Subalgebra& M,
                                      const Subalgebra& L, const ConditionalExpectation& E_N,
                                      const ConditionalExpectation& E_M,
                                      const IsoCertificate& iso,
                                      const ToleranceProfile& tol = {});

struct PerturbReport {
  DistanceInterval d;
  IsoCertificate iso;
  Matrix intertwiner;  ///< y: the off-diagonal block of the averaged flip
  Matrix unitary;      ///< u: polar unitary of y, conjugates M onto N

  double u_minus_identity = 0.0;
  double y_minus_identity = 0.0;
  double unitary_defect = 0.0;        ///< ||u^* u - I||
  double offdiag_residual = 0.0;      ///< other blocks of the averaged flip
  double intertwining_residual = 0.0; ///< max ||u phi(n) - n u|| over N's basis
  double conjugacy_residual = 0.0;    ///< max Frobenius distance of u b u^* to span(N)
  bool bound_14_ok = false;
  bool bound_20_ok = false;

  std::string to_json_string(int indent = -1) const;
};

/// The conjugating-unitary pipeline: isomorphism certificate, Haar average
/// of the flip [[0, I], [0, 0]] over K = diag(x, phi(x)) inside the 2x2
/// amplification, polar unitary of the off-diagonal block, and the
/// intertwining / conjugacy verification.
PerturbReport conjugating_unitary(const Subalgebra& N, const Subalgebra& M,
                                  const Subalgebra& L, const ConditionalExpectation& E_N,
                                  const ConditionalExpectation& E_M, const DistanceInterval& d,
                                  const ToleranceProfile& tol = {},
                                  bool attempt_beyond_gate = false);

}  // namespace vnpert
