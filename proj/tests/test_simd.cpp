#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "doctest.h"
#include "streamsvm/simd.hpp"

using streamsvm::simd::KernelTable;

namespace {

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

void check_equivalent(const KernelTable& ref, const KernelTable& alt) {
  std::mt19937_64 gen(2024);
  // Lengths cover empty input, every tail remainder and multi-block bodies.
  for (std::size_t n = 0; n <= 70; ++n) {
    const auto a = random_vector(gen, n);
    const auto b = random_vector(gen, n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]) + a[i] * a[i] + b[i] * b[i];
    const double tol = 1e-14 * (mag + 1.0);

    CHECK(std::abs(alt.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= tol);
    CHECK(std::abs(alt.squared_norm(a.data(), n) - ref.squared_norm(a.data(), n)) <= tol);
    CHECK(std::abs(alt.squared_distance(a.data(), b.data(), n) -
                   ref.squared_distance(a.data(), b.data(), n)) <= 4 * tol);

    for (double s : {0.0, 0.25, 1.0, -3.5}) {
      auto w1 = a, w2 = a;
      ref.lerp_toward(w1.data(), b.data(), s, n);
      alt.lerp_toward(w2.data(), b.data(), s, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(w1[i] - w2[i]) <= 1e-13 * (std::abs(w1[i]) + 1.0));

      auto y1 = b, y2 = b;
      ref.axpy(s, a.data(), y1.data(), n);
      alt.axpy(s, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-13 * (std::abs(y1[i]) + 1.0));

      auto z1 = a, z2 = a;
      ref.scale(z1.data(), s, n);
      alt.scale(z2.data(), s, n);
      CHECK(z1 == z2);  // a single rounded multiply per element
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels on hand-checked values") {
  const auto& k = streamsvm::simd::scalar_kernels();
  const double a[] = {1, 2, 3};
  const double b[] = {4, -5, 6};
  CHECK(k.dot(a, b, 3) == 12.0);
  CHECK(k.squared_norm(a, 3) == 14.0);
  CHECK(k.squared_distance(a, b, 3) == 9.0 + 49.0 + 9.0);
  double w[] = {0, 0, 0};
  k.lerp_toward(w, b, 0.5, 3);
  CHECK(w[0] == 2.0);
  CHECK(w[1] == -2.5);
  CHECK(w[2] == 3.0);
  CHECK(k.dot(a, b, 0) == 0.0);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const KernelTable* avx = streamsvm::simd::avx2_kernels();
  if (avx == nullptr || !streamsvm::simd::cpu_has_avx2()) {
    MESSAGE("AVX2 variant unavailable on this build/CPU; skipping");
    return;
  }
  check_equivalent(streamsvm::simd::scalar_kernels(), *avx);
}

TEST_CASE("active table is one of the compiled variants") {
  const auto& active = streamsvm::simd::active();
  CHECK((active.name == "scalar" || active.name == "avx2"));
  if (streamsvm::simd::cpu_has_avx2() && streamsvm::simd::avx2_kernels() != nullptr &&
      std::getenv("STREAMSVM_SIMD") == nullptr) {
    CHECK(active.name == "avx2");
  }
}
