#include "vnpert/basic_construction.hpp"

#include <sstream>

#include "vnpert/errors.hpp"
#include "vnpert/linalg.hpp"

namespace vnpert {

GnsSpace gns_from_trace(const Subalgebra& L) {
  GnsSpace gns;
  gns.base = L;
  gns.ambient = L.ambient_dim();
  gns.dim = gns.ambient * gns.ambient;
  gns.cyclic = to_coord(Matrix::Identity(gns.ambient, gns.ambient));
  return gns;
}

Matrix left_representation(const GnsSpace& gns, const Matrix& x) {
  require_finite(x, "left_representation");
  if (x.rows() != gns.ambient || x.cols() != gns.ambient)
    fail(ErrorKind::invalid_input, "left_representation: wrong ambient shape");
  // column-major vec: vec(x X) = (I (x) x) vec(X); the coordinate scaling cancels
  Matrix pi = Matrix::Zero(gns.dim, gns.dim);
  for (int k = 0; k < gns.ambient; ++k)
    pi.block(k * gns.ambient, k * gns.ambient, gns.ambient, gns.ambient) = x;
  return pi;
}

Matrix jones_projection(const GnsSpace& gns, const Subalgebra& M,
                        const ConditionalExpectation& E_M, const ToleranceProfile& tol) {
  if (M.ambient_dim() != gns.ambient)
    fail(ErrorKind::invalid_input, "jones_projection: ambient dimensions differ");
  // [M xi] in coordinates is exactly the span of M's (orthonormal) basis
  const Matrix& coords = M.coords();
  const Matrix e = coords * coords.adjoint();

  // the defining identity e (x xi) = E_M(x) xi pins E_M to the trace
  // expectation; verify it across the expectation's domain
  double worst = 0.0;
  for (const auto& b : E_M.domain().basis()) {
    const Vector lhs = e * to_coord(b);
    const Vector rhs = to_coord(E_M.apply(b, tol));
    worst = std::max(worst, (lhs - rhs).norm());
  }
  if (worst > tol.eq_eps) {
    std::ostringstream msg;
    msg << "jones_projection: supplied expectation is not the trace expectation onto M "
           "(defect "
        << worst << ")";
    fail(ErrorKind::invalid_input, msg.str());
  }
  return e;
}

BasicConstruction build_basic_construction(const Subalgebra& L, const Subalgebra& M,
                                           const ConditionalExpectation& E_M,
                                           const ToleranceProfile& tol) {
  for (const auto& b : M.basis()) {
    const auto r = L.contains(b, tol);
    if (!r.member) {
      std::ostringstream msg;
      msg << "build_basic_construction: M is not contained in L (residual " << r.residual
          << ")";
      fail(ErrorKind::inclusion, msg.str());
    }
  }

  BasicConstruction bc;
  bc.gns = gns_from_trace(L);
  bc.M = M;
  bc.e = jones_projection(bc.gns, M, E_M, tol);

  std::vector<Matrix> generators;
  generators.reserve(L.dim() + 1);
  for (const auto& b : L.basis()) generators.push_back(left_representation(bc.gns, b));
  generators.push_back(bc.e);
  bc.generated = generate_algebra(bc.gns.dim, generators, tol);

  // compression identity e pi(x) e = pi(E_M(x)) e on L's basis
  double worst = 0.0;
  for (const auto& b : L.basis()) {
    const Matrix lhs = bc.e * bc.pi(b) * bc.e;
    const Matrix rhs = bc.pi(E_M.apply(b, tol)) * bc.e;
    worst = std::max(worst, operator_norm(lhs - rhs));
  }
  if (worst > tol.eq_eps) {
    std::ostringstream msg;
    msg << "build_basic_construction: compression identity fails (residual " << worst << ")";
    fail(ErrorKind::pipeline_inconsistency, msg.str());
  }
  return bc;
}

Matrix corner_iso(const BasicConstruction& bc, const Matrix& z, const ToleranceProfile& tol) {
  require_finite(z, "corner_iso");
  if (z.rows() != bc.gns.dim || z.cols() != bc.gns.dim)
    fail(ErrorKind::invalid_input, "corner_iso: wrong GNS shape");
  {
    const auto r = bc.generated.contains(z, tol);
    if (!r.member) {
      std::ostringstream msg;
      msg << "corner_iso: element outside the generated algebra (residual " << r.residual
          << ")";
      fail(ErrorKind::domain, msg.str());
    }
  }
  const double corner_defect = operator_norm(bc.e * z * bc.e - z);
  if (corner_defect > tol.eq_eps) {
    std::ostringstream msg;
    msg << "corner_iso: element is not compressed by the Jones projection (defect "
        << corner_defect << ")";
    fail(ErrorKind::domain, msg.str());
  }

  // z = pi(m) e forces z xi = pi(m) xi, and xi separates left multiplications
  const Matrix m = from_coord(z * bc.gns.cyclic, bc.gns.ambient);
  const auto membership = bc.M.contains(m, tol);
  if (!membership.member) {
    std::ostringstream msg;
    msg << "corner_iso: decoded element leaves M (residual " << membership.residual << ")";
    fail(ErrorKind::corner_decoding, msg.str());
  }
  const double defect = operator_norm(bc.pi(m) * bc.e - z);
  if (defect > tol.eq_eps) {
    std::ostringstream msg;
    msg << "corner_iso: element is not of the form pi(m) e (defect " << defect << ")";
    fail(ErrorKind::corner_decoding, msg.str());
  }
  return m;
}

}  // namespace vnpert
