#pragma once

#include "vnpert/expectation.hpp"
#include "vnpert/subalgebra.hpp"

namespace vnpert {

/// GNS space of the normalized trace on the full matrix algebra containing
/// `base`.  Coordinates are vec(x)/sqrt(n), so the coordinate dot product
/// realizes the state inner product <a, b> = tr(b^* a)/n and the class of
/// the unit is to_coord(I).
struct GnsSpace {
  Subalgebra base;
  int ambient = 0;  // n
  int dim = 0;      // n^2
  Vector cyclic;    // coordinates of the unit

  Complex inner(const Vector& a, const Vector& b) const { return b.dot(a); }
};

GnsSpace gns_from_trace(const Subalgebra& L);

/// pi(x): left multiplication by x on the GNS coordinates.
Matrix left_representation(const GnsSpace& gns, const Matrix& x);

/// Orthogonal projection of the GNS space onto [M xi]; satisfies
/// e(pi(x) xi) = pi(E_M(x)) xi.  E_M must be the trace expectation onto M.
Matrix jones_projection(const GnsSpace& gns, const Subalgebra& M,
                        const ConditionalExpectation& E_M, const ToleranceProfile& tol = {});

struct BasicConstruction {
  GnsSpace gns;
  Subalgebra M;
  Matrix e;             ///< Jones projection on the GNS space
  Subalgebra generated; ///< algebra generated by pi(L) and e

  Matrix pi(const Matrix& x) const { return left_representation(gns, x); }
};

/// Representation, Jones projection and generated algebra for M inside L,
/// with the compression identity e pi(x) e = pi(E_M(x)) e verified on the
/// way out.
BasicConstruction build_basic_construction(const Subalgebra& L, const Subalgebra& M,
                                           const ConditionalExpectation& E_M,
                                           const ToleranceProfile& tol = {});

/// Inverse of m -> pi(m) e on the corner e <L, e> e: reads the element back
/// off the cyclic vector and checks membership in M.
Matrix corner_iso(const BasicConstruction& bc, const Matrix& z,
                  const ToleranceProfile& tol = {});

}  // namespace vnpert
