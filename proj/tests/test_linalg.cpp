#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "vnpert/errors.hpp"
#include "vnpert/linalg.hpp"
#include "vnpert/rng.hpp"

using namespace vnpert;

namespace {

// independent oracle: largest singular value by power iteration on x^* x
double power_iteration_norm(const Matrix& x) {
  const Matrix m = x.adjoint() * x;
  Vector v = Vector::Ones(m.rows());
  v.normalize();
  for (int i = 0; i < 2000; ++i) {
    v = m * v;
    const double norm = v.norm();
    if (norm == 0.0) return 0.0;
    v /= norm;
  }
  return std::sqrt(std::abs(v.dot(m * v)));
}

Matrix random_matrix(Rng& rng, int n) {
  Matrix x(n, n);
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = rng.complex_gaussian();
  return x;
}

Matrix random_unitary(Rng& rng, int n) { return polar_unitary(random_matrix(rng, n)); }

Matrix random_projection(Rng& rng, int n, int rank) {
  Matrix q = random_unitary(rng, n);
  Matrix p = Matrix::Zero(n, n);
  for (int k = 0; k < rank; ++k) p.noalias() += q.col(k) * q.col(k).adjoint();
  return p;
}

Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

TEST_CASE("operator_norm pinned examples") {
  CHECK(operator_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));

  const Matrix ones = Matrix::Ones(2, 2);
  CHECK(power_iteration_norm(ones) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(operator_norm(ones) == doctest::Approx(2.0).epsilon(1e-12));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = -0.7;
  CHECK(operator_norm(d) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("operator_norm matches the power-iteration oracle on random input") {
  Rng rng(101);
  for (int i = 0; i < 50; ++i) {
    const Matrix x = random_matrix(rng, 2 + static_cast<int>(rng.next_u64() % 5));
    CHECK(operator_norm(x) == doctest::Approx(power_iteration_norm(x)).epsilon(1e-9));
  }
}

TEST_CASE("operator_norm rejects non-finite entries") {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(operator_norm(x), Error);
  try {
    operator_norm(x);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_input);
  }
}

TEST_CASE("polar_unitary pinned examples") {
  const Matrix eye = Matrix::Identity(3, 3);
  CHECK(operator_norm(polar_unitary(eye) - eye) <= 1e-12);
  CHECK(operator_norm(polar_unitary(2.0 * eye) - eye) <= 1e-12);

  // entrywise phase of a diagonal matrix
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.5 * std::exp(Complex(0.0, M_PI / 4.0));
  d(1, 1) = 1.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = std::exp(Complex(0.0, M_PI / 4.0));
  expected(1, 1) = 1.0;
  CHECK(operator_norm(polar_unitary(d) - expected) <= 1e-12);
}

TEST_CASE("polar_unitary rejects singular input") {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 1.0;
  try {
    polar_unitary(x);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::rank_deficiency);
  }
}

TEST_CASE("polar_unitary satisfies the sqrt(2) estimate on 1000 seeded draws") {
  Rng rng(2024);
  const double root2 = std::sqrt(2.0);
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const Matrix g = random_matrix(rng, n);
    const double radius = 0.99 * rng.uniform01();
    const Matrix x = Matrix::Identity(n, n) + (radius / operator_norm(g)) * g;
    const double defect = operator_norm(x - Matrix::Identity(n, n));
    REQUIRE(defect < 1.0);
    const Matrix u = polar_unitary(x);
    CHECK(operator_norm(u - Matrix::Identity(n, n)) <= root2 * defect + 1e-12);
  }
}

TEST_CASE("polar_unitary fixes unitaries") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Matrix u = random_unitary(rng, 2 + static_cast<int>(rng.next_u64() % 4));
    CHECK(operator_norm(polar_unitary(u) - u) <= 1e-10);
  }
}

TEST_CASE("spectral_projection pinned examples") {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 0.9;
  h(1, 1) = 0.1;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  CHECK(operator_norm(spectral_projection(h, 0.5, 1.5) - expected) <= 1e-12);

  // a projection is its own spectral projection on the upper window
  Rng rng(17);
  const Matrix p = random_projection(rng, 4, 2);
  CHECK(operator_norm(spectral_projection(p, 0.6, 1.4) - p) <= 1e-10);

  // explicit eigenpair construction (hand-built decomposition as the oracle)
  Vector v1(2), v2(2);
  v1 << Complex(0.6, 0.0), Complex(0.0, 0.8);
  v2 << Complex(0.8, 0.0), Complex(0.0, -0.6);
  const Matrix hermitian = 0.95 * v1 * v1.adjoint() + 0.05 * v2 * v2.adjoint();
  const Matrix want = v1 * v1.adjoint();
  CHECK(operator_norm(spectral_projection(hermitian, 0.5, 1.5) - want) <= 1e-10);
}

TEST_CASE("spectral_projection flags boundary eigenvalues") {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 0.5;
  h(1, 1) = 0.1;
  try {
    spectral_projection(h, 0.5, 1.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::spectral_gap);
  }
}

TEST_CASE("spectral_projection rejects non-Hermitian input") {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  CHECK_THROWS_AS(spectral_projection(h, 0.5, 1.5), Error);
}

TEST_CASE("spectral_projection output is a projection commuting with the input") {
  Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const Matrix h = hermitize(random_matrix(rng, n));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    // split the spectrum at the largest interior gap
    int split = 1;
    double best_gap = -1.0;
    for (int k = 1; k < n; ++k) {
      const double gap = es.eigenvalues()(k) - es.eigenvalues()(k - 1);
      if (gap > best_gap) {
        best_gap = gap;
        split = k;
      }
    }
    const double lo = 0.5 * (es.eigenvalues()(split) + es.eigenvalues()(split - 1));
    const double hi = es.eigenvalues()(n - 1) + 1.0;
    const Matrix p = spectral_projection(h, lo, hi);
    CHECK(operator_norm(p * p - p) <= 1e-10);
    CHECK(operator_norm(p - p.adjoint()) <= 1e-10);
    CHECK(operator_norm(p * h - h * p) <= 1e-10);
  }
}

TEST_CASE("projection_exchange_unitary pinned examples") {
  Matrix p = Matrix::Zero(2, 2);
  p(0, 0) = 1.0;
  CHECK(operator_norm(projection_exchange_unitary(p, p) - Matrix::Identity(2, 2)) <= 1e-12);

  // rotated rank-one projection: closed-form w = R(theta)
  const double theta = 0.2;
  const Matrix r = rotation(theta);
  const Matrix q = r * p * r.adjoint();
  const Matrix w = projection_exchange_unitary(p, q);
  CHECK(operator_norm(w - r) <= 1e-10);
  CHECK(operator_norm(w - Matrix::Identity(2, 2)) ==
        doctest::Approx(2.0 * std::sin(theta / 2.0)).epsilon(1e-10));
  CHECK(operator_norm(w - Matrix::Identity(2, 2)) <=
        std::sqrt(2.0) * std::sin(theta) + 1e-12);

  const Matrix zero = Matrix::Zero(2, 2);
  CHECK(operator_norm(projection_exchange_unitary(zero, zero) - Matrix::Identity(2, 2)) <=
        1e-12);
}

TEST_CASE("projection_exchange_unitary rejects distance one") {
  Matrix p = Matrix::Zero(2, 2), q = Matrix::Zero(2, 2);
  p(0, 0) = 1.0;
  q(1, 1) = 1.0;
  try {
    projection_exchange_unitary(p, q);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::hypothesis_violation);
  }
}

TEST_CASE("projection_exchange_unitary exchanges and stays near I on 1000 seeded pairs") {
  Rng rng(909);
  const double root2 = std::sqrt(2.0);
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const Matrix p = random_projection(rng, n, static_cast<int>(rng.next_u64() % (n + 1)));
    const Matrix h = hermitize(random_matrix(rng, n));
    const double hnorm = operator_norm(h);
    Matrix q = p;
    if (hnorm > 1e-9) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      const double theta = 0.9 * rng.uniform01() / hnorm;
      Vector phases(n);
      for (int k = 0; k < n; ++k)
        phases(k) = std::exp(Complex(0.0, theta * es.eigenvalues()(k)));
      const Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
      q = u * p * u.adjoint();
    }
    const double gap = operator_norm(p - q);
    REQUIRE(gap < 1.0);
    const Matrix w = projection_exchange_unitary(p, q);
    CHECK(operator_norm(w * p * w.adjoint() - q) <= 1e-10);
    CHECK(operator_norm(w - Matrix::Identity(n, n)) <= root2 * gap + 1e-12);
  }
}

TEST_CASE("matrix text format round trips exactly") {
  Rng rng(61);
  for (int i = 0; i < 20; ++i) {
    const Matrix x = random_matrix(rng, 2 + static_cast<int>(rng.next_u64() % 4));
    std::stringstream ss;
    write_matrix(ss, x);
    const Matrix back = read_matrix(ss);
    CHECK(x == back);
  }
}
