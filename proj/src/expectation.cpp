#include "vnpert/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vnpert/errors.hpp"
#include "vnpert/linalg.hpp"

namespace vnpert {

ConditionalExpectation::ConditionalExpectation(Subalgebra domain, Subalgebra range,
                                               std::vector<Matrix> images)
    : domain_(std::move(domain)), range_(std::move(range)), images_(std::move(images)) {
  if (images_.size() != static_cast<std::size_t>(domain_.dim()))
    fail(ErrorKind::invalid_input,
         "ConditionalExpectation: one image per domain basis element required");
}

Matrix ConditionalExpectation::apply(const Matrix& x, const ToleranceProfile& tol) const {
  const auto membership = domain_.contains(x, tol);
  if (!membership.member) {
    std::ostringstream msg;
    msg << "ConditionalExpectation::apply: element outside the domain span (residual "
        << membership.residual << ")";
    fail(ErrorKind::domain, msg.str());
  }
  const Vector c = domain_.coefficients(x);
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < c.size(); ++k) out.noalias() += c(k) * images_[k];
  return out;
}

ConditionalExpectation trace_expectation(const Subalgebra& L, const Subalgebra& A,
                                         const ToleranceProfile& tol) {
  if (L.ambient_dim() != A.ambient_dim())
    fail(ErrorKind::invalid_input, "trace_expectation: ambient dimensions differ");
  for (const auto& a : A.basis()) {
    const auto r = L.contains(a, tol);
    if (!r.member) {
      std::ostringstream msg;
      msg << "trace_expectation: range is not contained in the domain (residual " << r.residual
          << ")";
      fail(ErrorKind::inclusion, msg.str());
    }
  }
  std::vector<Matrix> images;
  images.reserve(L.dim());
  for (const auto& b : L.basis()) images.push_back(A.project(b));
  return ConditionalExpectation(L, A, std::move(images));
}

namespace {

// Largest c with E(x^* x) - c x^* x positive semidefinite: the smallest
// generalized eigenvalue of the pencil (E(x^* x), x^* x) on the range of
// x^* x.  Negative values are clamped; they can only arise from a malformed
// expectation.
double best_constant(const ConditionalExpectation& E, const Matrix& x,
                     const ToleranceProfile& tol) {
  const Matrix square = x.adjoint() * x;
  const Matrix a = hermitize(E.apply(square, tol));
  const Matrix b = hermitize(square);

  Eigen::SelfAdjointEigenSolver<Matrix> eb(b);
  const double beta_max = eb.eigenvalues().maxCoeff();
  if (!(beta_max > 0.0)) return std::numeric_limits<double>::infinity();  // x ~ 0
  const double cut = std::max(tol.rank_eps * beta_max, tol.psd_eps);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < eb.eigenvalues().size(); ++k)
    if (eb.eigenvalues()(k) > cut) keep.push_back(k);
  if (keep.empty()) return std::numeric_limits<double>::infinity();

  Matrix w(b.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    w.col(static_cast<Eigen::Index>(j)) =
        eb.eigenvectors().col(keep[j]) / std::sqrt(eb.eigenvalues()(keep[j]));
  const Matrix pencil = hermitize(w.adjoint() * a * w);
  Eigen::SelfAdjointEigenSolver<Matrix> ep(pencil);
  return std::max(0.0, ep.eigenvalues().minCoeff());
}

}  // namespace

PpResult pp_constant(const ConditionalExpectation& E, int budget, std::uint64_t rng_seed,
                     const ToleranceProfile& tol) {
  if (budget < 1) fail(ErrorKind::invalid_input, "pp_constant: budget must be positive");
  const Subalgebra& domain = E.domain();
  const int n = domain.ambient_dim();

  PpResult best;
  best.c_hi = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  auto consider = [&](const Matrix& raw) {
    if (evaluations >= budget) return;
    const Matrix x = domain.project(raw);
    if (x.norm() <= tol.rank_eps) return;
    ++evaluations;
    const double c = best_constant(E, x, tol);
    if (c < best.c_hi) {
      best.c_hi = c;
      best.witness = x;
    }
  };

  // known extremizers for trace expectations live among matrix units and
  // rank-one projections, so seed with those
  for (int i = 0; i < n && evaluations < budget; ++i)
    for (int j = 0; j < n && evaluations < budget; ++j) {
      Matrix unit = Matrix::Zero(n, n);
      unit(i, j) = 1.0;
      consider(unit);
    }

  Rng rng(rng_seed);
  const int exploration = std::max(budget / 4, 8);
  for (int s = 0; s < exploration && evaluations < budget; ++s) {
    Vector v(n);
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.complex_gaussian();
    v.normalize();
    consider(v * v.adjoint());  // rank-one projection
    Vector c(domain.dim());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = rng.complex_gaussian();
    consider(domain.from_coefficients(c));
  }

  // local descent around the incumbent witness
  double step = 0.5;
  while (evaluations < budget && best.witness.size() > 0 && step > 1e-8) {
    const double before = best.c_hi;
    Matrix perturbation(n, n);
    for (Eigen::Index j = 0; j < perturbation.size(); ++j)
      perturbation(j) = rng.complex_gaussian();
    consider(best.witness + step * (best.witness.norm() + 1e-12) * perturbation /
                                perturbation.norm());
    if (best.c_hi >= before) step *= 0.85;
  }

  if (!std::isfinite(best.c_hi)) {
    best.c_hi = 0.0;
    best.witness = Matrix::Zero(n, n);
  }
  return best;
}

double ExpectationReport::max_residual() const {
  return std::max({idempotent, unital, range_fixing, bimodular, positivity});
}

std::string ExpectationReport::to_text() const {
  std::ostringstream os;
  os.precision(12);
  os << "idempotent " << idempotent << '\n'
     << "unital " << unital << '\n'
     << "range_fixing " << range_fixing << '\n'
     << "bimodular " << bimodular << '\n'
     << "positivity " << positivity << '\n'
     << "verdict " << (pass ? "pass" : "fail") << '\n';
  return os.str();
}

ExpectationReport verify_expectation(const ConditionalExpectation& E, int samples,
                                     std::uint64_t rng_seed, const ToleranceProfile& tol) {
  if (samples < 1) fail(ErrorKind::invalid_input, "verify_expectation: samples must be positive");
  const Subalgebra& domain = E.domain();
  const Subalgebra& range = E.range();
  const int n = domain.ambient_dim();
  ExpectationReport report;

  const Matrix eye = Matrix::Identity(n, n);
  std::vector<Matrix> probes = domain.basis();
  probes.push_back(eye);
  for (const auto& b : probes) {
    const Matrix eb = E.apply(b, tol);
    report.idempotent = std::max(report.idempotent, operator_norm(E.apply(eb, tol) - eb));
  }
  report.unital = operator_norm(E.apply(eye, tol) - eye);
  for (const auto& b : range.basis())
    report.range_fixing = std::max(report.range_fixing, operator_norm(E.apply(b, tol) - b));

  Rng rng(rng_seed);
  auto random_element = [&](const Subalgebra& a) {
    Vector c(a.dim());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = rng.complex_gaussian();
    return a.from_coefficients(c);
  };
  for (int s = 0; s < samples; ++s) {
    const Matrix x = random_element(domain);
    const Matrix r1 = range.project(random_element(range));
    const Matrix r2 = range.project(random_element(range));
    report.bimodular = std::max(
        report.bimodular, operator_norm(E.apply(r1 * x * r2, tol) - r1 * E.apply(x, tol) * r2));
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(E.apply(x.adjoint() * x, tol)));
    report.positivity = std::max(report.positivity, std::max(0.0, -es.eigenvalues().minCoeff()));
  }
  report.pass = report.max_residual() <= tol.eq_eps;
  return report;
}

}  // namespace vnpert
