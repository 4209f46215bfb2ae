#pragma once

#include <cstdint>
#include <string>

#include "vnpert/subalgebra.hpp"

namespace vnpert {

struct AverageCertificate {
  Matrix input;
  Matrix output;
  /// max operator-norm commutator of the output with A's basis
  double commutant_residual = 0.0;
  /// Frobenius distance from the output to the empirical convex hull of
  /// sampled orbit points u x u^*; negative when certification was skipped
  double hull_gap = -1.0;
};

/// Trace-orthogonal projection of x onto the relative commutant of A in L.
/// This is the Haar average of u x u^* over the unitary group of A (the
/// adjoint action is unitary on the Frobenius space, so its fixed-point
/// projection is the group average) and lies in the closed convex hull of
/// the orbit.  hull_samples > 0 additionally certifies the hull membership
/// empirically.
AverageCertificate haar_average(const Subalgebra& A, const Subalgebra& L, const Matrix& x,
                                int hull_samples = 0, std::uint64_t hull_seed = 1,
                                const ToleranceProfile& tol = {});

/// max over sampled Haar unitaries u of A of ||u x - x u||; a lower bound on
/// the norm of the commutator map restricted to A's unit ball.
double ad_norm_bound(const Subalgebra& A, const Matrix& x, int samples,
                     std::uint64_t rng_seed, const ToleranceProfile& tol = {});

struct CommutantInclusionReport {
  int samples = 0;
  double gamma_hi = 0.0;
  double max_membership_residual = 0.0;  // distance of averages to the commutant of N
  double max_distance = 0.0;             // max ||x - y||
  double bound = 0.0;                    // 2 gamma_hi + eq_eps
  bool pass = false;

  std::string to_text() const;
};

/// For random unit-ball elements x of the commutant of M in L, checks that
/// the Haar average over N's unitaries lands in the commutant of N within
/// tol and moves x by at most 2 gamma_hi.  gamma_hi must come from a
/// certified gamma-containment of N in M; failures are reported, not thrown.
CommutantInclusionReport check_commutant_near_inclusion(const Subalgebra& N,
                                                        const Subalgebra& M,
                                                        const Subalgebra& L, double gamma_hi,
                                                        int samples, std::uint64_t rng_seed,
                                                        const ToleranceProfile& tol = {});

}  // namespace vnpert
