#include "vnpert/matrix.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "vnpert/errors.hpp"

namespace vnpert {

bool all_finite(const Matrix& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Complex& v = x(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  return true;
}

void require_finite(const Matrix& x, const char* who) {
  if (!all_finite(x))
    fail(ErrorKind::invalid_input, std::string(who) + ": non-finite entries");
}

Matrix hermitize(const Matrix& x) {
  if (x.rows() != x.cols())
    fail(ErrorKind::invalid_input, "hermitize: matrix not square");
  return 0.5 * (x + x.adjoint());
}

double frobenius_norm(const Matrix& x) { return x.norm(); }

Complex trace_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::invalid_input, "trace_inner: shape mismatch");
  return (b.adjoint() * a).trace() / static_cast<double>(a.rows());
}

double trace_norm(const Matrix& x) {
  return x.norm() / std::sqrt(static_cast<double>(x.rows()));
}

void write_matrix(std::ostream& os, const Matrix& x) {
  os << x.rows() << ' ' << x.cols() << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      os << x(i, j).real() << ' ' << x(i, j).imag() << '\n';
}

Matrix read_matrix(std::istream& is) {
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows <= 0 || cols <= 0)
    fail(ErrorKind::invalid_input, "read_matrix: bad header");
  Matrix x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double re = 0.0, im = 0.0;
      if (!(is >> re >> im))
        fail(ErrorKind::invalid_input, "read_matrix: truncated entries");
      x(i, j) = Complex(re, im);
    }
  require_finite(x, "read_matrix");
  return x;
}

void save_matrix(const std::string& path, const Matrix& x) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::invalid_input, "save_matrix: cannot open " + path);
  write_matrix(os, x);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::invalid_input, "load_matrix: cannot open " + path);
  return read_matrix(is);
}

}  // namespace vnpert
