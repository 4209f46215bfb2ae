#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "vnpert/dixmier.hpp"
#include "vnpert/errors.hpp"
#include "vnpert/kernels.hpp"
#include "vnpert/linalg.hpp"

using namespace vnpert;

namespace {

Matrix unit(int n, int i, int j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

Matrix random_element(Rng& rng, int n) {
  Matrix x(n, n);
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = rng.complex_gaussian();
  return x;
}

}  // namespace

TEST_CASE("haar_average fixes elements of the commutant") {
  const Subalgebra diag = Subalgebra::diagonal(2);
  const Subalgebra full2 = Subalgebra::full(2);
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 5.0;
  x(1, 1) = 7.0;
  const auto cert = haar_average(diag, full2, x, 16, 3);
  CHECK(operator_norm(cert.output - x) <= 1e-12);
  CHECK(cert.commutant_residual <= 1e-12);
  CHECK(cert.hull_gap >= 0.0);
  CHECK(cert.hull_gap <= 1e-9);
}

TEST_CASE("haar_average over the diagonal torus kills off-diagonal entries") {
  const Subalgebra diag = Subalgebra::diagonal(2);
  const Subalgebra full2 = Subalgebra::full(2);
  Matrix x(2, 2);
  x << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 1.0;
  want(1, 1) = 4.0;

  const auto cert = haar_average(diag, full2, x);
  CHECK(operator_norm(cert.output - want) <= 1e-12);

  // Monte-Carlo oracle over sampled conjugations reproduces the projection
  const Matrix mc = kernels::orbit_mean(diag, x, 20000, 5);
  CHECK((mc - cert.output).norm() <= 5e-2);
}

TEST_CASE("haar_average under the scalars is the identity") {
  const Subalgebra scalars = Subalgebra::scalars(3);
  const Subalgebra full3 = Subalgebra::full(3);
  Rng rng(9);
  const Matrix x = random_element(rng, 3);
  const auto cert = haar_average(scalars, full3, x);
  CHECK(operator_norm(cert.output - x) <= 1e-12);
}

TEST_CASE("haar_average requires the element inside span(L)") {
  const Subalgebra diag = Subalgebra::diagonal(2);
  try {
    haar_average(diag, diag, unit(2, 0, 1));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("haar_average is equivariant under unitaries of A") {
  Rng rng(21);
  const Subalgebra full3 = Subalgebra::full(3);
  const Matrix u0 = haar_unitary(full3, rng);
  const Subalgebra blocks = Subalgebra::block_algebra(3, {{2, 1}, {1, 1}}).conjugated(u0);
  for (int i = 0; i < 10; ++i) {
    const Matrix x = random_element(rng, 3);
    const Matrix u = haar_unitary(blocks, rng);
    const auto direct = haar_average(blocks, full3, x);
    const auto moved = haar_average(blocks, full3, (u * x * u.adjoint()).eval());
    CHECK(operator_norm(direct.output - moved.output) <= 1e-10);
  }
}

TEST_CASE("haar_average contracts the operator norm") {
  Rng rng(23);
  const Subalgebra diag3 = Subalgebra::diagonal(3);
  const Subalgebra full3 = Subalgebra::full(3);
  for (int i = 0; i < 25; ++i) {
    const Matrix x = random_element(rng, 3);
    const auto cert = haar_average(diag3, full3, x);
    CHECK(operator_norm(cert.output) <= operator_norm(x) + 1e-10);
  }
}

TEST_CASE("hull gap shrinks as the empirical hull grows") {
  Rng rng(31);
  const Subalgebra full3 = Subalgebra::full(3);
  const Matrix u0 = haar_unitary(full3, rng);
  const Subalgebra blocks = Subalgebra::block_algebra(3, {{2, 1}, {1, 1}}).conjugated(u0);
  const Matrix x = random_element(rng, 3);
  // orbit samples are drawn per-index, so the small hull is nested in the
  // large one and the fit can only improve
  const auto small = haar_average(blocks, full3, x, 20, 5);
  const auto large = haar_average(blocks, full3, x, 200, 5);
  CHECK(large.hull_gap <= small.hull_gap + 1e-9);
}

TEST_CASE("ad_norm_bound pinned examples") {
  const Subalgebra diag = Subalgebra::diagonal(2);
  const Subalgebra full2 = Subalgebra::full(2);

  // commuting element: zero
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  CHECK(ad_norm_bound(diag, d, 100, 1) <= 1e-12);

  // e12 under the torus: |e^{i delta} - 1| sampled, capped by 2
  const double bound = ad_norm_bound(diag, unit(2, 0, 1), 3000, 2);
  CHECK(bound <= 2.0 + 1e-12);
  CHECK(bound >= 1.9);

  // scalars commute with everything
  Rng rng(3);
  CHECK(ad_norm_bound(Subalgebra::scalars(2), random_element(rng, 2), 100, 3) <= 1e-12);
  (void)full2;
}

TEST_CASE("check_commutant_near_inclusion on identical algebras") {
  const Subalgebra diag = Subalgebra::diagonal(3);
  const Subalgebra full3 = Subalgebra::full(3);
  const auto report = check_commutant_near_inclusion(diag, diag, full3, 0.0, 6, 5);
  CHECK(report.pass);
  CHECK(report.max_distance <= 1e-10);
  CHECK(report.max_membership_residual <= 1e-10);
}

TEST_CASE("check_commutant_near_inclusion on a certified conjugation instance") {
  Rng rng(47);
  const Subalgebra full2 = Subalgebra::full(2);
  const Subalgebra n_alg = Subalgebra::diagonal(2).conjugated(haar_unitary(full2, rng));
  // small rotation of N
  Matrix h = hermitize(random_element(rng, 2));
  h /= operator_norm(h);
  const double theta = 2.0 * std::asin(0.005);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(2);
  for (int k = 0; k < 2; ++k) phases(k) = std::exp(Complex(0.0, theta * es.eigenvalues()(k)));
  const Matrix v = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  const Subalgebra m_alg = n_alg.conjugated(v);
  const double gamma = 2.0 * operator_norm(v - Matrix::Identity(2, 2));

  const auto report = check_commutant_near_inclusion(n_alg, m_alg, full2, gamma, 8, 11);
  CHECK(report.pass);
  CHECK(report.max_distance <= 2.0 * gamma + 1e-8);
  CHECK(report.max_membership_residual <= 1e-10);
}

TEST_CASE("check_commutant_near_inclusion is trivial for scalar N") {
  Rng rng(53);
  const Subalgebra full3 = Subalgebra::full(3);
  const Subalgebra m_alg =
      Subalgebra::block_algebra(3, {{2, 1}, {1, 1}}).conjugated(haar_unitary(full3, rng));
  const auto report =
      check_commutant_near_inclusion(Subalgebra::scalars(3), m_alg, full3, 0.0, 5, 7);
  CHECK(report.pass);
  CHECK(report.max_distance <= 1e-10);
}

TEST_CASE("commutant inclusion report is machine parseable") {
  const Subalgebra diag = Subalgebra::diagonal(2);
  const auto report =
      check_commutant_near_inclusion(diag, diag, Subalgebra::full(2), 0.0, 2, 1);
  const std::string text = report.to_text();
  CHECK(text.find("max_distance ") != std::string::npos);
  CHECK(text.find("verdict ") != std::string::npos);
}
