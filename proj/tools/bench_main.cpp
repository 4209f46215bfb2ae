// Benchmark comparing the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <functional>

#include "vnpert/kernels.hpp"
#include "vnpert/subalgebra.hpp"

using namespace vnpert;

namespace {

double time_ms(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
  const ToleranceProfile tol;
  std::printf("threads: %d\n", kernels::max_threads());
  std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    const Subalgebra A = Subalgebra::block_algebra(4, {{2, 1}, {1, 1}, {1, 1}});
    Rng rng(7);
    Matrix x(4, 4);
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = rng.complex_gaussian();
    constexpr int kSamples = 40000;
    Matrix serial, parallel;
    const double ts = time_ms([&] { serial = kernels::orbit_mean_serial(A, x, kSamples, 1); });
    const double tp = time_ms([&] { parallel = kernels::orbit_mean(A, x, kSamples, 1); });
    row("orbit_mean", ts, tp);
    std::printf("  agreement: %.3e\n", (serial - parallel).norm());
  }

  {
    const Subalgebra A = Subalgebra::diagonal(6);
    Rng rng(11);
    Matrix x(6, 6);
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = rng.complex_gaussian();
    constexpr int kSamples = 20000;
    double serial = 0, parallel = 0;
    const double ts =
        time_ms([&] { serial = kernels::orbit_ad_max_serial(A, x, kSamples, 2); });
    const double tp = time_ms([&] { parallel = kernels::orbit_ad_max(A, x, kSamples, 2); });
    row("orbit_ad_max", ts, tp);
    std::printf("  agreement: %.3e\n", std::abs(serial - parallel));
  }

  {
    const Subalgebra A = Subalgebra::full(16);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < A.dim(); ++i)
      for (int j = 0; j < A.dim(); ++j) pairs.emplace_back(i, j);
    std::vector<Matrix> serial, parallel;
    const double ts =
        time_ms([&] { serial = kernels::pairwise_products_serial(A.basis(), pairs); });
    const double tp = time_ms([&] { parallel = kernels::pairwise_products(A.basis(), pairs); });
    row("pairwise_products", ts, tp);
    double worst = 0.0;
    for (std::size_t k = 0; k < serial.size(); ++k)
      worst = std::max(worst, (serial[k] - parallel[k]).norm());
    std::printf("  agreement: %.3e\n", worst);
  }
  return 0;
}
