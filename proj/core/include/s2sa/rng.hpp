#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace s2sa {

// Deterministic random source. mt19937_64 raw output is fully specified by the
// C++ standard, so identical seeds give identical draw sequences on every
// platform. The standard library *distributions* are not specified, so the
// mappings below are hand-rolled.
class SeededRng {
public:
  static constexpr const char* kAlgorithm = "mt19937_64";

  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // [0,1) with 53 bits of resolution.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_real();
  }

  // Unbiased draw from [0,n). Rejection of the short final cycle.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return static_cast<std::size_t>(x % bound);
    }
  }

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; derives independent stream seeds from one base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace s2sa
