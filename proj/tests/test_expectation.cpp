#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "vnpert/errors.hpp"
#include "vnpert/expectation.hpp"
#include "vnpert/linalg.hpp"

using namespace vnpert;

namespace {

Matrix unit(int n, int i, int j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// independent check of the defining inequality: largest c with
// E(x^* x) - c x^* x >= 0, scanned over a grid
bool psd_at(const ConditionalExpectation& E, const Matrix& x, double c, double slack) {
  const Matrix square = x.adjoint() * x;
  const Matrix gap = hermitize(E(square)) - c * hermitize(square);
  return Eigen::SelfAdjointEigenSolver<Matrix>(gap).eigenvalues().minCoeff() >= -slack;
}

}  // namespace

TEST_CASE("trace_expectation pinned examples") {
  const Subalgebra full2 = Subalgebra::full(2);

  // onto the diagonal: [[a,b],[c,d]] -> diag(a, d)
  const auto onto_diag = trace_expectation(full2, Subalgebra::diagonal(2));
  Matrix x(2, 2);
  x << Complex(1, 1), Complex(2, 0), Complex(3, 0), Complex(4, -2);
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = Complex(1, 1);
  want(1, 1) = Complex(4, -2);
  CHECK(operator_norm(onto_diag(x) - want) <= 1e-12);

  // onto the scalars: x -> (tr x / 2) I
  const auto onto_scalars = trace_expectation(full2, Subalgebra::scalars(2));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  CHECK(operator_norm(onto_scalars(d) - 2.0 * Matrix::Identity(2, 2)) <= 1e-12);
  CHECK(operator_norm(onto_scalars(unit(2, 0, 1))) <= 1e-12);

  // onto everything: the identity map
  const auto identity = trace_expectation(full2, full2);
  CHECK(operator_norm(identity(x) - x) <= 1e-12);

  // unitality
  CHECK(operator_norm(onto_diag(Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)) <= 1e-12);
}

TEST_CASE("trace_expectation preserves the trace") {
  const Subalgebra full3 = Subalgebra::full(3);
  const auto E = trace_expectation(full3, Subalgebra::block_algebra(3, {{2, 1}, {1, 1}}));
  Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    Matrix x(3, 3);
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = rng.complex_gaussian();
    CHECK(std::abs((E(x) - x).trace()) <= 1e-12);
  }
}

TEST_CASE("trace_expectation requires inclusion") {
  try {
    trace_expectation(Subalgebra::diagonal(2), Subalgebra::full(2));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::inclusion);
  }
}

TEST_CASE("apply rejects elements outside the domain span") {
  const auto E = trace_expectation(Subalgebra::diagonal(2), Subalgebra::scalars(2));
  try {
    E(unit(2, 0, 1));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("pp_constant pinned examples") {
  const Subalgebra full2 = Subalgebra::full(2);

  const auto identity = trace_expectation(full2, full2);
  CHECK(pp_constant(identity, 60, 1).c_hi == doctest::Approx(1.0).epsilon(1e-9));

  // scalars in M_2: a rank-one projection p has E(p) = I/2, forcing c <= 1/2
  const auto onto_scalars = trace_expectation(full2, Subalgebra::scalars(2));
  {
    const Matrix p = unit(2, 0, 0);
    CHECK(psd_at(onto_scalars, p, 0.5, 1e-12));
    CHECK_FALSE(psd_at(onto_scalars, p, 0.502, 1e-12));
  }
  const PpResult scalars = pp_constant(onto_scalars, 400, 7);
  CHECK(scalars.c_hi == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(psd_at(onto_scalars, scalars.witness, scalars.c_hi, 1e-9));
  CHECK_FALSE(psd_at(onto_scalars, scalars.witness, scalars.c_hi + 2e-3, 1e-12));

  // diagonal in M_2: the all-ones matrix forces c <= 1/2
  const auto onto_diag = trace_expectation(full2, Subalgebra::diagonal(2));
  {
    const Matrix ones = Matrix::Ones(2, 2);
    CHECK(psd_at(onto_diag, ones, 0.5, 1e-12));
    CHECK_FALSE(psd_at(onto_diag, ones, 0.502, 1e-12));
  }
  const PpResult diag = pp_constant(onto_diag, 400, 7);
  CHECK(diag.c_hi == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(psd_at(onto_diag, diag.witness, diag.c_hi, 1e-9));
}

TEST_CASE("pp_constant is monotone along scalars <= diagonal <= full") {
  const Subalgebra full2 = Subalgebra::full(2);
  const double c_scalars = pp_constant(trace_expectation(full2, Subalgebra::scalars(2)), 300, 5).c_hi;
  const double c_diag = pp_constant(trace_expectation(full2, Subalgebra::diagonal(2)), 300, 5).c_hi;
  const double c_full = pp_constant(trace_expectation(full2, full2), 300, 5).c_hi;
  CHECK(c_scalars <= c_diag + 1e-3);
  CHECK(c_diag <= c_full + 1e-3);
}

TEST_CASE("verify_expectation passes on trace expectations") {
  const Subalgebra full3 = Subalgebra::full(3);
  for (const auto& range : {Subalgebra::scalars(3), Subalgebra::diagonal(3),
                            Subalgebra::block_algebra(3, {{2, 1}, {1, 1}})}) {
    const auto report = verify_expectation(trace_expectation(full3, range), 16, 3);
    CHECK(report.pass);
    CHECK(report.max_residual() <= 1e-10);
  }
}

TEST_CASE("verify_expectation flags the zero map") {
  const Subalgebra full2 = Subalgebra::full(2);
  std::vector<Matrix> zeros(full2.dim(), Matrix::Zero(2, 2));
  const ConditionalExpectation broken(full2, Subalgebra::scalars(2), std::move(zeros));
  const auto report = verify_expectation(broken, 8, 3);
  CHECK_FALSE(report.pass);
  CHECK(report.unital == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("verify_expectation flags the unnormalized trace map") {
  // x -> tr(x) I on M_2: E(E(I)) = 4I against E(I) = 2I
  const Subalgebra full2 = Subalgebra::full(2);
  std::vector<Matrix> images;
  for (const auto& b : full2.basis()) images.push_back(b.trace() * Matrix::Identity(2, 2));
  const ConditionalExpectation broken(full2, Subalgebra::scalars(2), std::move(images));
  const auto report = verify_expectation(broken, 8, 3);
  CHECK_FALSE(report.pass);
  CHECK(report.idempotent == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("expectations are pinching contractions on the unit ball") {
  const Subalgebra full3 = Subalgebra::full(3);
  const auto E = trace_expectation(full3, Subalgebra::diagonal(3));
  Rng rng(90);
  for (int i = 0; i < 100; ++i) {
    Matrix x(3, 3);
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = rng.complex_gaussian();
    x /= operator_norm(x);
    CHECK(operator_norm(x - E(x)) <= 2.0 + 1e-12);
  }
}

TEST_CASE("verify_expectation report is machine parseable") {
  const auto E = trace_expectation(Subalgebra::full(2), Subalgebra::diagonal(2));
  const auto report = verify_expectation(E, 4, 1);
  const std::string text = report.to_text();
  CHECK(text.find("idempotent ") != std::string::npos);
  CHECK(text.find("verdict pass") != std::string::npos);
}
