#include "vnpert/perturbation.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "vnpert/dixmier.hpp"
#include "vnpert/errors.hpp"
#include "vnpert/kernels.hpp"
#include "vnpert/linalg.hpp"

namespace vnpert {

namespace {

constexpr double kGate = 1.0 / 15.0;        // closeness hypothesis on d.hi
constexpr double kHardGate = 0.2;           // spectral clusters must stay separated
constexpr double kWindowFloor = 1e-6;       // keeps the window usable as gamma -> 0
constexpr int kEstimateSamples = 64;        // sampled unitaries for norm estimates
constexpr std::uint64_t kEstimateSeed = 0x766e7065727401ULL;

double norm_or_zero(const Matrix& x) { return x.size() == 0 ? 0.0 : operator_norm(x); }

}  // namespace

const char* to_string(HiSource s) {
  switch (s) {
    case HiSource::coarse_bound: return "coarse-bound";
    case HiSource::conjugation_certificate: return "conjugation-certificate";
  }
  return "unknown";
}

DistanceInterval distance_interval(const Subalgebra& N, const Subalgebra& M,
                                   const ConditionalExpectation& E_M,
                                   const ConditionalExpectation& E_N, int samples,
                                   std::uint64_t rng_seed, std::optional<double> certificate,
                                   const ToleranceProfile& tol) {
  if (N.ambient_dim() != M.ambient_dim())
    fail(ErrorKind::invalid_input, "distance_interval: ambient dimensions differ");
  if (samples < 1) fail(ErrorKind::invalid_input, "distance_interval: samples must be positive");
  const int n = N.ambient_dim();

  // lower bound: ||u - E_other(u)|| <= 2 inf_{m in other ball} ||u - m||
  double lo = 0.0;
  Rng rng_n = Rng::stream(rng_seed, 0);
  Rng rng_m = Rng::stream(rng_seed, 1);
  for (int s = 0; s < samples; ++s) {
    const Matrix u = haar_unitary(N, rng_n, tol);
    lo = std::max(lo, 0.5 * operator_norm(u - E_M.apply(u, tol)));
    const Matrix v = haar_unitary(M, rng_m, tol);
    lo = std::max(lo, 0.5 * operator_norm(v - E_N.apply(v, tol)));
  }

  // coarse upper bound from the singular values of (id - E) on the other
  // algebra in normalized-Frobenius geometry; 1 is always valid (m = 0)
  auto one_sided = [&](const Subalgebra& from, const ConditionalExpectation& onto) {
    Matrix defect(static_cast<Eigen::Index>(n) * n, from.dim());
    for (int k = 0; k < from.dim(); ++k) {
      const Matrix& b = from.basis()[k];
      defect.col(k) = to_coord(b - onto.apply(b, tol));
    }
    return Eigen::JacobiSVD<Matrix>(defect).singularValues()(0);
  };
  const double sigma = std::max(one_sided(N, E_M), one_sided(M, E_N));
  const double coarse = std::min(2.0 * std::sqrt(static_cast<double>(n)) * sigma, 1.0);

  DistanceInterval d;
  if (certificate.has_value() && *certificate <= coarse) {
    if (*certificate < 0.0)
      fail(ErrorKind::invalid_input, "distance_interval: negative certificate");
    d.hi = *certificate;
    d.hi_source = HiSource::conjugation_certificate;
  } else {
    d.hi = coarse;
    d.hi_source = HiSource::coarse_bound;
  }
  d.lo = std::min(lo, d.hi);
  return d;
}

Matrix SubalgebraMap::apply(const Matrix& x, const ToleranceProfile& tol) const {
  const auto membership = domain.contains(x, tol);
  if (!membership.member) {
    std::ostringstream msg;
    msg << "SubalgebraMap::apply: element outside the domain span (residual "
        << membership.residual << ")";
    fail(ErrorKind::domain, msg.str());
  }
  const Vector c = domain.coefficients(x);
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < c.size(); ++k) out.noalias() += c(k) * images[k];
  return out;
}

Matrix SubalgebraMap::coefficient_matrix() const {
  Matrix coeff(codomain.dim(), domain.dim());
  for (int k = 0; k < domain.dim(); ++k) coeff.col(k) = codomain.coefficients(images[k]);
  return coeff;
}

SubalgebraMap SubalgebraMap::inverse(const ToleranceProfile& tol) const {
  if (domain.dim() != codomain.dim())
    fail(ErrorKind::certificate, "SubalgebraMap::inverse: dimension mismatch");
  const Matrix coeff = coefficient_matrix();
  Eigen::FullPivLU<Matrix> lu(coeff);
  lu.setThreshold(tol.rank_eps);
  if (!lu.isInvertible())
    fail(ErrorKind::certificate, "SubalgebraMap::inverse: coefficient matrix is singular");
  const Matrix inv = lu.inverse();

  SubalgebraMap out;
  out.domain = codomain;
  out.codomain = domain;
  out.images.reserve(codomain.dim());
  for (int j = 0; j < codomain.dim(); ++j)
    out.images.push_back(domain.from_coefficients(inv.col(j)));
  return out;
}

SubalgebraMap SubalgebraMap::identity(const Subalgebra& A) {
  return SubalgebraMap{A, A, A.basis()};
}

double map_norm_estimate(const SubalgebraMap& phi, int samples, std::uint64_t rng_seed,
                         const ToleranceProfile& tol) {
  if (samples < 1) fail(ErrorKind::invalid_input, "map_norm_estimate: samples must be positive");
  double best = 0.0;
  Rng rng(rng_seed);
  for (int s = 0; s < samples; ++s) {
    const Matrix u = haar_unitary(phi.domain, rng, tol);
    best = std::max(best, operator_norm(phi.apply(u, tol) - u));
  }
  return best;
}

IsoCertificate build_isomorphism(const Subalgebra& N, const Subalgebra& M,
                                 const Subalgebra& L, const ConditionalExpectation& E_N,
                                 const ConditionalExpectation& E_M, const DistanceInterval& d,
                                 const ToleranceProfile& tol, bool attempt_beyond_gate) {
  (void)E_N;
  if (!(d.hi < kGate) && !attempt_beyond_gate) {
    std::ostringstream msg;
    msg << "build_isomorphism: certified distance bound " << d.hi << " is not below 1/15";
    fail(ErrorKind::hypothesis_violation, msg.str());
  }
  if (!(d.hi < kHardGate))
    fail(ErrorKind::hypothesis_violation,
         "build_isomorphism: distance bound too large for spectral separation");

  IsoCertificate iso;
  iso.gamma = 1.01 * d.hi;

  const BasicConstruction bc = build_basic_construction(L, M, E_M, tol);

  // pi is a trace-inner-product isometry, so pi(N) keeps an orthonormal basis
  std::vector<Matrix> pi_basis;
  pi_basis.reserve(N.dim());
  for (const auto& b : N.basis()) pi_basis.push_back(bc.pi(b));
  const Subalgebra pi_N =
      Subalgebra::from_orthonormal_basis(bc.gns.dim, std::move(pi_basis), tol);

  // averaged Jones projection: an element of N' within 2 gamma of e
  iso.averaged_jones = haar_average(pi_N, bc.generated, bc.e, 0, 0, tol).output;
  iso.averaged_minus_jones = operator_norm(iso.averaged_jones - bc.e);
  if (iso.averaged_minus_jones > 2.0 * iso.gamma + tol.eq_eps) {
    std::ostringstream msg;
    msg << "build_isomorphism: averaged Jones projection is " << iso.averaged_minus_jones
        << " from e, above 2 gamma = " << 2.0 * iso.gamma
        << " (the distance certificate is too small)";
    fail(ErrorKind::averaging_bound, msg.str());
  }

  // spectral window around 1: any half-width in [2 gamma, 1 - 2 gamma)
  // selects the same cluster, so a small floor keeps gamma = 0 usable
  const double window = std::max(2.0 * iso.gamma, kWindowFloor);
  iso.window_projection =
      spectral_projection(iso.averaged_jones, 1.0 - window, 1.0 + window, tol);
  iso.window_minus_jones = operator_norm(iso.window_projection - bc.e);
  if (iso.window_minus_jones > 4.0 * iso.gamma + tol.eq_eps) {
    std::ostringstream msg;
    msg << "build_isomorphism: window projection is " << iso.window_minus_jones
        << " from e, above 4 gamma = " << 4.0 * iso.gamma;
    fail(ErrorKind::pipeline_inconsistency, msg.str());
  }

  iso.exchange_unitary = projection_exchange_unitary(bc.e, iso.window_projection, tol);
  iso.exchange_minus_identity =
      operator_norm(iso.exchange_unitary - Matrix::Identity(bc.gns.dim, bc.gns.dim));
  if (iso.exchange_minus_identity > 4.0 * std::sqrt(2.0) * iso.gamma + tol.eq_eps) {
    std::ostringstream msg;
    msg << "build_isomorphism: exchange unitary is " << iso.exchange_minus_identity
        << " from I, above 4 sqrt(2) gamma";
    fail(ErrorKind::pipeline_inconsistency, msg.str());
  }

  // Phi(x) = corner decoding of e w^* pi(x) w e
  const Matrix& w = iso.exchange_unitary;
  std::vector<Matrix> images;
  images.reserve(N.dim());
  for (const auto& b : N.basis()) {
    const Matrix z = bc.e * w.adjoint() * bc.pi(b) * w * bc.e;
    images.push_back(corner_iso(bc, z, tol));
  }
  iso.phi = SubalgebraMap{N, M, std::move(images)};

  // homomorphism defects on basis pairs, unit and adjoints
  const int n = L.ambient_dim();
  const Matrix eye = Matrix::Identity(n, n);
  iso.hom_residual = operator_norm(iso.phi.apply(eye, tol) - eye);
  for (const auto& b : N.basis()) {
    iso.hom_residual = std::max(
        iso.hom_residual,
        operator_norm(iso.phi.apply(b.adjoint(), tol) - iso.phi.apply(b, tol).adjoint()));
  }
  for (int i = 0; i < N.dim(); ++i)
    for (int j = 0; j < N.dim(); ++j) {
      const Matrix product = N.basis()[i] * N.basis()[j];
      iso.hom_residual =
          std::max(iso.hom_residual,
                   operator_norm(iso.phi.apply(product, tol) -
                                 iso.phi.images[i] * iso.phi.images[j]));
    }
  if (iso.hom_residual > tol.eq_eps) {
    std::ostringstream msg;
    msg << "build_isomorphism: homomorphism defect " << iso.hom_residual << " above eq_eps";
    fail(ErrorKind::pipeline_inconsistency, msg.str());
  }

  // ||Phi(x) - E_M(x)|| on the operator-norm-normalized basis
  for (const auto& b : N.basis()) {
    const double scale = operator_norm(b);
    if (scale <= tol.rank_eps) continue;
    iso.phi_vs_expectation =
        std::max(iso.phi_vs_expectation,
                 operator_norm(iso.phi.apply(b, tol) - E_M.apply(b, tol)) / scale);
  }
  if (iso.phi_vs_expectation > 8.0 * std::sqrt(2.0) * iso.gamma + tol.eq_eps) {
    std::ostringstream msg;
    msg << "build_isomorphism: ||Phi - E_M|| defect " << iso.phi_vs_expectation
        << " above 8 sqrt(2) gamma";
    fail(ErrorKind::pipeline_inconsistency, msg.str());
  }

  // surjectivity: the images span M (dimension match makes the map onto)
  if (N.dim() != M.dim())
    fail(ErrorKind::certificate, "build_isomorphism: N and M have different dimensions");
  const Subalgebra image_span = Subalgebra::span_of(n, iso.phi.images, tol);
  if (image_span.dim() != M.dim()) {
    std::ostringstream msg;
    msg << "build_isomorphism: images span dimension " << image_span.dim() << ", expected "
        << M.dim();
    fail(ErrorKind::certificate, msg.str());
  }

  iso.norm_phi_minus_id_lo = map_norm_estimate(iso.phi, kEstimateSamples, kEstimateSeed, tol);
  return iso;
}

ConditionalExpectation ek_expectation(const Subalgebra& N, const Subalgebra& M,
                                      const Subalgebra& L, const ConditionalExpectation& E_N,
                                      const ConditionalExpectation& E_M,
                                      const IsoCertificate& iso, const ToleranceProfile& tol) {
  (void)M;  // reached only through the certificate's images
  if (iso.hom_residual > tol.eq_eps)
    fail(ErrorKind::certificate, "ek_expectation: certificate homomorphism defect too large");
  const int n = L.ambient_dim();

  const Subalgebra amplified = amplify_2x2(L);
  std::vector<Matrix> k_generators;
  k_generators.reserve(N.dim());
  for (int k = 0; k < N.dim(); ++k) {
    Matrix g = Matrix::Zero(2 * n, 2 * n);
    g.topLeftCorner(n, n) = N.basis()[k];
    g.bottomRightCorner(n, n) = iso.phi.images[k];
    k_generators.push_back(std::move(g));
  }
  const Subalgebra K = generate_algebra(2 * n, k_generators, tol);
  if (K.dim() != N.dim()) {
    std::ostringstream msg;
    msg << "ek_expectation: diagonal algebra has dimension " << K.dim() << ", expected "
        << N.dim();
    fail(ErrorKind::certificate, msg.str());
  }

  const SubalgebraMap phi_inv = iso.phi.inverse(tol);

  std::vector<Matrix> images;
  images.reserve(amplified.dim());
  for (const auto& big : amplified.basis()) {
    const Matrix a = big.topLeftCorner(n, n);
    const Matrix dblock = big.bottomRightCorner(n, n);
    const Matrix ena = E_N.apply(a, tol);
    const Matrix emd = E_M.apply(dblock, tol);
    Matrix image = Matrix::Zero(2 * n, 2 * n);
    image.topLeftCorner(n, n) = 0.5 * (ena + phi_inv.apply(emd, tol));
    image.bottomRightCorner(n, n) = 0.5 * (iso.phi.apply(ena, tol) + emd);
    images.push_back(std::move(image));
  }
  return ConditionalExpectation(amplified, K, std::move(images));
}

std::string PerturbReport::to_json_string(int indent) const {
  nlohmann::json j;
  j["d_lo"] = d.lo;
  j["d_hi"] = d.hi;
  j["hi_source"] = to_string(d.hi_source);
  j["gamma"] = iso.gamma;
  j["norm_phi_minus_id"] = iso.norm_phi_minus_id_lo;
  j["u_minus_I"] = u_minus_identity;
  j["conjugacy_residual"] = conjugacy_residual;
  j["bound_14_ok"] = bound_14_ok;
  j["bound_20_ok"] = bound_20_ok;
  j["residuals"] = {
      {"hom", iso.hom_residual},
      {"averaged_minus_jones", iso.averaged_minus_jones},
      {"window_minus_jones", iso.window_minus_jones},
      {"exchange_minus_identity", iso.exchange_minus_identity},
      {"phi_vs_expectation", iso.phi_vs_expectation},
      {"offdiag", offdiag_residual},
      {"intertwining", intertwining_residual},
      {"y_minus_I", y_minus_identity},
      {"unitary_defect", unitary_defect},
  };
  return j.dump(indent);
}

PerturbReport conjugating_unitary(const Subalgebra& N, const Subalgebra& M,
                                  const Subalgebra& L, const ConditionalExpectation& E_N,
                                  const ConditionalExpectation& E_M, const DistanceInterval& d,
                                  const ToleranceProfile& tol, bool attempt_beyond_gate) {
  if (!(d.hi < kGate) && !attempt_beyond_gate) {
    std::ostringstream msg;
    msg << "conjugating_unitary: certified distance bound " << d.hi << " is not below 1/15";
    fail(ErrorKind::hypothesis_violation, msg.str());
  }

  PerturbReport report;
  report.d = d;
  report.iso = build_isomorphism(N, M, L, E_N, E_M, d, tol, attempt_beyond_gate);

  const int n = L.ambient_dim();
  const Subalgebra amplified = amplify_2x2(L);
  std::vector<Matrix> k_generators;
  k_generators.reserve(N.dim());
  for (int k = 0; k < N.dim(); ++k) {
    Matrix g = Matrix::Zero(2 * n, 2 * n);
    g.topLeftCorner(n, n) = N.basis()[k];
    g.bottomRightCorner(n, n) = report.iso.phi.images[k];
    k_generators.push_back(std::move(g));
  }
  const Subalgebra K = generate_algebra(2 * n, k_generators, tol);

  Matrix flip = Matrix::Zero(2 * n, 2 * n);
  flip.topRightCorner(n, n) = Matrix::Identity(n, n);
  const Matrix averaged_flip = haar_average(K, amplified, flip, 0, 0, tol).output;

  report.offdiag_residual =
      std::max({norm_or_zero(averaged_flip.topLeftCorner(n, n)),
                norm_or_zero(averaged_flip.bottomLeftCorner(n, n)),
                norm_or_zero(averaged_flip.bottomRightCorner(n, n))});
  if (report.offdiag_residual > tol.eq_eps) {
    std::ostringstream msg;
    msg << "conjugating_unitary: averaged flip leaves the off-diagonal corner (residual "
        << report.offdiag_residual << ")";
    fail(ErrorKind::pipeline_inconsistency, msg.str());
  }
  report.intertwiner = averaged_flip.topRightCorner(n, n);

  report.y_minus_identity =
      operator_norm(report.intertwiner - Matrix::Identity(n, n));
  if (report.y_minus_identity >= 1.0) {
    std::ostringstream msg;
    msg << "conjugating_unitary: ||y - I|| = " << report.y_minus_identity
        << " >= 1, polar hypothesis fails";
    fail(ErrorKind::hypothesis_violation, msg.str());
  }
  report.unitary = polar_unitary(report.intertwiner, tol);
  report.u_minus_identity = operator_norm(report.unitary - Matrix::Identity(n, n));
  report.unitary_defect =
      operator_norm(report.unitary.adjoint() * report.unitary - Matrix::Identity(n, n));

  for (int k = 0; k < N.dim(); ++k) {
    report.intertwining_residual =
        std::max(report.intertwining_residual,
                 operator_norm(report.unitary * report.iso.phi.images[k] -
                               N.basis()[k] * report.unitary));
  }
  if (report.intertwining_residual > tol.eq_eps) {
    std::ostringstream msg;
    msg << "conjugating_unitary: intertwining residual " << report.intertwining_residual
        << " above eq_eps";
    fail(ErrorKind::pipeline_inconsistency, msg.str());
  }

  for (const auto& b : M.basis()) {
    const Matrix moved = report.unitary * b * report.unitary.adjoint();
    report.conjugacy_residual =
        std::max(report.conjugacy_residual, N.contains(moved, tol).residual);
  }
  if (report.conjugacy_residual > tol.eq_eps) {
    std::ostringstream msg;
    msg << "conjugating_unitary: conjugacy residual " << report.conjugacy_residual
        << " above eq_eps";
    fail(ErrorKind::pipeline_inconsistency, msg.str());
  }

  report.bound_20_ok = report.u_minus_identity <= 20.0 * d.hi + tol.eq_eps;
  report.bound_14_ok = report.iso.norm_phi_minus_id_lo <= 14.0 * d.hi + tol.eq_eps;
  return report;
}

}  // namespace vnpert
