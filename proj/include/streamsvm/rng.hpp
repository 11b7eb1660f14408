#pragma once

// Portable random primitives.
//
// Everything here is built on std::mt19937_64, whose output sequence is fixed
// by the C++ standard. The distributions are implemented locally because the
// std:: distributions are implementation-defined and would make permutations
// differ between standard libraries. Algorithm version: "mt64-v1".
//
//   uniform_index(n):  rejection sampling on raw 64-bit outputs; accept x when
//                      x >= (2^64 mod n), return x mod n.
//   uniform01():       (x >> 11) * 2^-53, in [0, 1).
//   normal():          Box-Muller, cosine branch only (one normal per two draws).
//   shuffle():         Fisher-Yates, i from n-1 down to 1, j = uniform_index(i+1).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace streamsvm {

inline constexpr const char* kRngAlgorithm = "mt64-v1";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  std::uint64_t uniform_index(std::uint64_t n) {
    // n == 0 is meaningless; treat as 1.
    if (n <= 1) return 0;
    const std::uint64_t limit = -n % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= limit) return x % n;
    }
  }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace streamsvm
