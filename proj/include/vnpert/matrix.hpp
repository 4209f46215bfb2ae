#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>

namespace vnpert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

bool all_finite(const Matrix& x);
void require_finite(const Matrix& x, const char* who);

/// (x + x^*)/2; requires a square matrix.
Matrix hermitize(const Matrix& x);

double frobenius_norm(const Matrix& x);

/// tr(b^* a) / n for n x n matrices, the normalized-trace inner product.
Complex trace_inner(const Matrix& a, const Matrix& b);

/// Norm of the normalized-trace inner product, sqrt(tr(x^* x)/n).
double trace_norm(const Matrix& x);

// Text format shared by all tools: first line "rows cols", then rows*cols
// lines "re im" in row-major order.
void write_matrix(std::ostream& os, const Matrix& x);
Matrix read_matrix(std::istream& is);
void save_matrix(const std::string& path, const Matrix& x);
Matrix load_matrix(const std::string& path);

}  // namespace vnpert
