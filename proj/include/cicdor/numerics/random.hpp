#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace cicdor::numerics {

/// splitmix64 finalizer; derives independent stream seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic RNG. Distributions are implemented here rather than taken
/// from <random> so that sequences do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = index(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

  /// Child generator on an independent stream.
  Rng fork(std::uint64_t stream) { return Rng(mix_seed(engine_(), stream)); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cicdor::numerics
