#include "vnpert/linalg.hpp"

#include <Eigen/SVD>
#include <sstream>

#include "vnpert/errors.hpp"

namespace vnpert {

double operator_norm(const Matrix& x) {
  require_finite(x, "operator_norm");
  if (x.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(x).singularValues()(0);
}

Matrix polar_unitary(const Matrix& x, const ToleranceProfile& tol) {
  require_finite(x, "polar_unitary");
  if (x.rows() != x.cols())
    fail(ErrorKind::invalid_input, "polar_unitary: matrix not square");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= tol.rank_eps) {
    std::ostringstream msg;
    msg << "polar_unitary: smallest singular value " << sv(sv.size() - 1)
        << " below rank_eps " << tol.rank_eps;
    fail(ErrorKind::rank_deficiency, msg.str());
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix spectral_projection(const Matrix& h, double lo, double hi,
                           const ToleranceProfile& tol) {
  require_finite(h, "spectral_projection");
  if (h.rows() != h.cols())
    fail(ErrorKind::invalid_input, "spectral_projection: matrix not square");
  if (!(lo <= hi)) fail(ErrorKind::invalid_input, "spectral_projection: empty interval");
  if (operator_norm(h - h.adjoint()) > 2.0 * tol.eq_eps)
    fail(ErrorKind::invalid_input, "spectral_projection: matrix not Hermitian within eq_eps");

  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
  if (es.info() != Eigen::Success)
    fail(ErrorKind::invalid_input, "spectral_projection: eigendecomposition failed");

  const auto& ev = es.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k) - lo) < tol.rank_eps || std::abs(ev(k) - hi) < tol.rank_eps) {
      std::ostringstream msg;
      msg << "spectral_projection: eigenvalue " << ev(k)
          << " within rank_eps of the window [" << lo << ", " << hi << "]";
      fail(ErrorKind::spectral_gap, msg.str());
    }
  }

  Matrix p = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) >= lo && ev(k) <= hi) {
      const auto v = es.eigenvectors().col(k);
      p.noalias() += v * v.adjoint();
    }
  }
  return p;
}

namespace {

void require_projection(const Matrix& p, const ToleranceProfile& tol, const char* name) {
  if (p.rows() != p.cols())
    fail(ErrorKind::invalid_input,
         std::string("projection_exchange_unitary: ") + name + " not square");
  const double idem = operator_norm(p * p - p);
  const double herm = operator_norm(p - p.adjoint());
  if (idem > tol.eq_eps || herm > tol.eq_eps) {
    std::ostringstream msg;
    msg << "projection_exchange_unitary: " << name
        << " is not a projection within eq_eps (idempotence " << idem << ", adjoint " << herm
        << ")";
    fail(ErrorKind::invalid_input, msg.str());
  }
}

}  // namespace

Matrix projection_exchange_unitary(const Matrix& p, const Matrix& q,
                                   const ToleranceProfile& tol) {
  require_finite(p, "projection_exchange_unitary");
  require_finite(q, "projection_exchange_unitary");
  require_projection(p, tol, "p");
  require_projection(q, tol, "q");
  const double gap = operator_norm(p - q);
  if (gap >= 1.0) {
    std::ostringstream msg;
    msg << "projection_exchange_unitary: ||p - q|| = " << gap << " >= 1";
    fail(ErrorKind::hypothesis_violation, msg.str());
  }
  const Matrix eye = Matrix::Identity(p.rows(), p.cols());
  const Matrix x = q * p + (eye - q) * (eye - p);
  return polar_unitary(x, tol);
}

}  // namespace vnpert
