#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace hyma {

// splitmix64, used to derive independent seeds from a base seed.
inline std::uint64_t hash_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded generator with explicit output transforms so that simulation traces
// are reproducible across platforms (std::* distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on (0,1]; avoids an exact zero.
  double uniform_pos() { return 1.0 - uniform(); }

  // Unit-mean exponential (squared magnitude of CN(0,1) fading).
  double exponential() { return -std::log(uniform_pos()); }

  // Uniform integer on {lo,...,hi}, inclusive, via rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / span * span;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return lo + x % span;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hyma
