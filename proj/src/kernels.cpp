#include "vnpert/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "vnpert/errors.hpp"
#include "vnpert/linalg.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vnpert::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

// Chunked deterministic reduction: per-chunk partial sums are combined in
// chunk order, so the result is independent of the thread count.
constexpr int kChunk = 64;

Matrix chunk_orbit_sum(const Subalgebra& A, const Matrix& x, int begin, int end,
                       std::uint64_t seed) {
  Matrix acc = Matrix::Zero(x.rows(), x.cols());
  for (int s = begin; s < end; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    const Matrix u = haar_unitary(A, rng);
    acc.noalias() += u * x * u.adjoint();
  }
  return acc;
}

}  // namespace

Matrix orbit_mean(const Subalgebra& A, const Matrix& x, int samples, std::uint64_t seed) {
  if (samples <= 0) fail(ErrorKind::invalid_input, "orbit_mean: samples must be positive");
  const int chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Matrix> partial(chunks);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < chunks; ++c) {
    const int begin = c * kChunk;
    const int end = std::min(samples, begin + kChunk);
    partial[c] = chunk_orbit_sum(A, x, begin, end, seed);
  }
  Matrix acc = Matrix::Zero(x.rows(), x.cols());
  for (const auto& m : partial) acc += m;
  return acc / static_cast<double>(samples);
}

Matrix orbit_mean_serial(const Subalgebra& A, const Matrix& x, int samples,
                         std::uint64_t seed) {
  if (samples <= 0) fail(ErrorKind::invalid_input, "orbit_mean: samples must be positive");
  return chunk_orbit_sum(A, x, 0, samples, seed) / static_cast<double>(samples);
}

double orbit_ad_max(const Subalgebra& A, const Matrix& x, int samples, std::uint64_t seed) {
  if (samples <= 0) fail(ErrorKind::invalid_input, "orbit_ad_max: samples must be positive");
  double best = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    const Matrix u = haar_unitary(A, rng);
    best = std::max(best, operator_norm(u * x - x * u));
  }
  return best;
}

double orbit_ad_max_serial(const Subalgebra& A, const Matrix& x, int samples,
                           std::uint64_t seed) {
  if (samples <= 0) fail(ErrorKind::invalid_input, "orbit_ad_max: samples must be positive");
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    const Matrix u = haar_unitary(A, rng);
    best = std::max(best, operator_norm(u * x - x * u));
  }
  return best;
}

std::vector<Matrix> orbit_points(const Subalgebra& A, const Matrix& x, int samples,
                                 std::uint64_t seed) {
  std::vector<Matrix> out(static_cast<std::size_t>(std::max(samples, 0)));
#pragma omp parallel for schedule(dynamic, 16)
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    const Matrix u = haar_unitary(A, rng);
    out[s] = u * x * u.adjoint();
  }
  return out;
}

std::vector<Matrix> orbit_points_serial(const Subalgebra& A, const Matrix& x, int samples,
                                        std::uint64_t seed) {
  std::vector<Matrix> out(static_cast<std::size_t>(std::max(samples, 0)));
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    const Matrix u = haar_unitary(A, rng);
    out[s] = u * x * u.adjoint();
  }
  return out;
}

std::vector<Matrix> pairwise_products(const std::vector<Matrix>& basis,
                                      const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Matrix> out(pairs.size());
  const int count = static_cast<int>(pairs.size());
  if (!basis.empty()) {  // allocate serially; the loop then stays malloc-free
    for (auto& m : out) m.resize(basis[0].rows(), basis[0].cols());
  }
#pragma omp parallel for schedule(static)
  for (int k = 0; k < count; ++k)
    out[k].noalias() = basis[pairs[k].first] * basis[pairs[k].second];
  return out;
}

std::vector<Matrix> pairwise_products_serial(const std::vector<Matrix>& basis,
                                             const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Matrix> out(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k)
    out[k].noalias() = basis[pairs[k].first] * basis[pairs[k].second];
  return out;
}

namespace {

// Lawson-Hanson NNLS for min ||A w - b||, w >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations) {
  const int cols = static_cast<int>(A.cols());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(cols);
  std::vector<int> passive;
  Eigen::VectorXd residual = b;
  const double grad_tol = 1e-12 * A.norm() * (b.norm() + 1.0);
  if (max_iterations <= 0) max_iterations = 6 * cols + 60;

  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXd grad = A.transpose() * residual;
    int best = -1;
    double best_grad = grad_tol;
    for (int j = 0; j < cols; ++j) {
      if (std::find(passive.begin(), passive.end(), j) != passive.end()) continue;
      if (grad(j) > best_grad) {
        best_grad = grad(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive.push_back(best);

    while (!passive.empty()) {
      Eigen::MatrixXd Ap(A.rows(), passive.size());
      for (std::size_t k = 0; k < passive.size(); ++k) Ap.col(k) = A.col(passive[k]);
      const Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(b);
      if ((z.array() > 0.0).all()) {
        w.setZero();
        for (std::size_t k = 0; k < passive.size(); ++k) w(passive[k]) = z(k);
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < passive.size(); ++k) {
        if (z(k) <= 0.0) {
          const double wk = w(passive[k]);
          alpha = std::min(alpha, wk / (wk - z(k)));
        }
      }
      for (std::size_t k = 0; k < passive.size(); ++k)
        w(passive[k]) += alpha * (z(k) - w(passive[k]));
      for (auto it = passive.begin(); it != passive.end();) {
        if (w(*it) <= 1e-14)
          it = passive.erase(it);
        else
          ++it;
      }
    }
    residual = b - A * w;
  }
  return w;
}

}  // namespace

double simplex_hull_distance(const std::vector<Matrix>& points, const Matrix& target,
                             int max_iterations) {
  if (points.empty()) fail(ErrorKind::invalid_input, "simplex_hull_distance: no points");
  const Eigen::Index entries = target.size();
  const int count = static_cast<int>(points.size());

  // real stacking [Re; Im] plus a penalty row enforcing sum(w) = 1
  double scale = 1.0;
  for (const auto& p : points) scale = std::max(scale, p.norm());
  const double penalty = 100.0 * scale;

  Eigen::MatrixXd A(2 * entries + 1, count);
  for (int j = 0; j < count; ++j) {
    if (points[j].rows() != target.rows() || points[j].cols() != target.cols())
      fail(ErrorKind::invalid_input, "simplex_hull_distance: shape mismatch");
    const Matrix& p = points[j];
    for (Eigen::Index k = 0; k < entries; ++k) {
      A(k, j) = p(k).real();
      A(entries + k, j) = p(k).imag();
    }
    A(2 * entries, j) = penalty;
  }
  Eigen::VectorXd b(2 * entries + 1);
  for (Eigen::Index k = 0; k < entries; ++k) {
    b(k) = target(k).real();
    b(entries + k) = target(k).imag();
  }
  b(2 * entries) = penalty;

  Eigen::VectorXd w = nnls(A, b, max_iterations);
  const double total = w.sum();
  if (total <= 0.0) return target.norm();
  w /= total;

  Matrix fit = Matrix::Zero(target.rows(), target.cols());
  for (int j = 0; j < count; ++j)
    if (w(j) > 0.0) fit += w(j) * points[j];
  return (fit - target).norm();
}

}  // namespace vnpert::kernels
