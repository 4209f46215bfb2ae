#pragma once

#include <cstdint>
#include <vector>

#include "vnpert/matrix.hpp"
#include "vnpert/subalgebra.hpp"

// Data-parallel inner loops.  Every kernel exists twice: an OpenMP version
// used by default and a serial reference the tests compare against.  The
// parallel reductions are chunked so the result does not depend on the
// thread count.
namespace vnpert::kernels {

/// Mean of u x u^* over Haar-sampled unitaries of A.  Sample s is drawn from
/// Rng::stream(seed, s) in both versions.
Matrix orbit_mean(const Subalgebra& A, const Matrix& x, int samples, std::uint64_t seed);
Matrix orbit_mean_serial(const Subalgebra& A, const Matrix& x, int samples, std::uint64_t seed);

/// max over Haar-sampled u in A of ||u x - x u|| (operator norm).
double orbit_ad_max(const Subalgebra& A, const Matrix& x, int samples, std::uint64_t seed);
double orbit_ad_max_serial(const Subalgebra& A, const Matrix& x, int samples, std::uint64_t seed);

/// Orbit points u x u^* for Haar-sampled u, sample s from Rng::stream(seed, s).
std::vector<Matrix> orbit_points(const Subalgebra& A, const Matrix& x, int samples,
                                 std::uint64_t seed);
std::vector<Matrix> orbit_points_serial(const Subalgebra& A, const Matrix& x, int samples,
                                        std::uint64_t seed);

/// Products basis[i] * basis[j] for the listed index pairs.
std::vector<Matrix> pairwise_products(const std::vector<Matrix>& basis,
                                      const std::vector<std::pair<int, int>>& pairs);
std::vector<Matrix> pairwise_products_serial(const std::vector<Matrix>& basis,
                                             const std::vector<std::pair<int, int>>& pairs);

/// Best Frobenius distance from `target` to the convex hull of `points`:
/// nonnegative least squares over the weight simplex (active-set NNLS with a
/// penalty row for the sum constraint).  max_iterations 0 picks a cap from
/// the problem size.
double simplex_hull_distance(const std::vector<Matrix>& points, const Matrix& target,
                             int max_iterations = 0);

int max_threads();

}  // namespace vnpert::kernels
