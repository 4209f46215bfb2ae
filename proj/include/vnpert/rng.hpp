#pragma once

#include <complex>
#include <cstdint>

namespace vnpert {

// xoshiro256** seeded through splitmix64.  Streams for (seed, stream_id)
// pairs are derived by hashing, so parallel trials draw independent and
// platform-identical sequences.  std:: distributions are avoided on purpose:
// their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived from (seed, stream_id).
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double gaussian();   // standard normal (Box-Muller)
  std::complex<double> complex_gaussian();  // E|z|^2 = 1

 private:
  std::uint64_t state_[4];
  double cached_gaussian_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace vnpert
