#pragma once

#include <cstdint>
#include <random>

namespace pmflow {

// mt19937_64 with manual output mapping. std::uniform_real_distribution is
// implementation-defined, so it would break byte-exact reproducibility
// across toolchains; this mapping is pinned.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(std::uint64_t seed) : eng(seed) {}

  double unit() { return (eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

}  // namespace pmflow
