#include "vnpert/dixmier.hpp"

#include <sstream>

#include "vnpert/errors.hpp"
#include "vnpert/kernels.hpp"
#include "vnpert/linalg.hpp"

namespace vnpert {

AverageCertificate haar_average(const Subalgebra& A, const Subalgebra& L, const Matrix& x,
                                int hull_samples, std::uint64_t hull_seed,
                                const ToleranceProfile& tol) {
  {
    const auto r = L.contains(x, tol);
    if (!r.member) {
      std::ostringstream msg;
      msg << "haar_average: element outside span(L) (residual " << r.residual << ")";
      fail(ErrorKind::domain, msg.str());
    }
  }
  const Subalgebra fixed = relative_commutant(A, L, tol);

  AverageCertificate cert;
  cert.input = x;
  cert.output = fixed.project(x);
  for (const auto& a : A.basis())
    cert.commutant_residual =
        std::max(cert.commutant_residual, operator_norm(cert.output * a - a * cert.output));
  if (hull_samples > 0) {
    const auto points = kernels::orbit_points(A, x, hull_samples, hull_seed);
    cert.hull_gap = kernels::simplex_hull_distance(points, cert.output);
  }
  return cert;
}

double ad_norm_bound(const Subalgebra& A, const Matrix& x, int samples,
                     std::uint64_t rng_seed, const ToleranceProfile& tol) {
  if (samples < 1) fail(ErrorKind::invalid_input, "ad_norm_bound: samples must be positive");
  require_finite(x, "ad_norm_bound");
  (void)tol;
  return kernels::orbit_ad_max(A, x, samples, rng_seed);
}

std::string CommutantInclusionReport::to_text() const {
  std::ostringstream os;
  os.precision(12);
  os << "samples " << samples << '\n'
     << "gamma_hi " << gamma_hi << '\n'
     << "max_membership_residual " << max_membership_residual << '\n'
     << "max_distance " << max_distance << '\n'
     << "bound " << bound << '\n'
     << "verdict " << (pass ? "pass" : "fail") << '\n';
  return os.str();
}

CommutantInclusionReport check_commutant_near_inclusion(const Subalgebra& N,
                                                        const Subalgebra& M,
                                                        const Subalgebra& L, double gamma_hi,
                                                        int samples, std::uint64_t rng_seed,
                                                        const ToleranceProfile& tol) {
  if (samples < 1)
    fail(ErrorKind::invalid_input, "check_commutant_near_inclusion: samples must be positive");
  if (gamma_hi < 0.0)
    fail(ErrorKind::invalid_input, "check_commutant_near_inclusion: negative certificate");

  const Subalgebra commutant_of_M = relative_commutant(M, L, tol);
  const Subalgebra commutant_of_N = relative_commutant(N, L, tol);

  CommutantInclusionReport report;
  report.samples = samples;
  report.gamma_hi = gamma_hi;
  report.bound = 2.0 * gamma_hi + tol.eq_eps;

  Rng rng(rng_seed);
  for (int s = 0; s < samples; ++s) {
    Vector c(commutant_of_M.dim());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = rng.complex_gaussian();
    Matrix x = commutant_of_M.from_coefficients(c);
    const double norm = operator_norm(x);
    if (norm > tol.rank_eps) x /= norm;  // unit sphere of the commutant

    const AverageCertificate avg = haar_average(N, L, x, 0, 0, tol);
    report.max_membership_residual = std::max(
        report.max_membership_residual, commutant_of_N.contains(avg.output, tol).residual);
    report.max_distance = std::max(report.max_distance, operator_norm(x - avg.output));
  }
  report.pass = report.max_membership_residual <= tol.eq_eps && report.max_distance <= report.bound;
  return report;
}

}  // namespace vnpert
