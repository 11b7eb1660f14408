#pragma once

// Dense double-precision kernels used by every inner loop in the library.
//
// Each kernel exists as a scalar reference and as an AVX2+FMA variant. The
// variant is picked once, at first use, from the CPU feature bits. Setting the
// environment variable STREAMSVM_SIMD=scalar forces the reference path.
// The variants differ only in summation order, so reductions agree to a few
// ulps of the accumulated magnitude, not bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace streamsvm::simd {

using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_norm)(const double* a, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // w[i] += s * (target[i] - w[i])
  void (*lerp_toward)(double* w, const double* target, double s, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // w[i] *= alpha
  void (*scale)(double* w, double alpha, std::size_t n);
  std::string_view name;
};

const KernelTable& scalar_kernels();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();
bool cpu_has_avx2();

// The table used by the library.
const KernelTable& active();

inline double dot(ConstSpan a, ConstSpan b) { return active().dot(a.data(), b.data(), a.size()); }
inline double squared_norm(ConstSpan a) { return active().squared_norm(a.data(), a.size()); }
inline double squared_distance(ConstSpan a, ConstSpan b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}
inline void lerp_toward(MutSpan w, ConstSpan target, double s) {
  active().lerp_toward(w.data(), target.data(), s, w.size());
}
inline void axpy(double alpha, ConstSpan x, MutSpan y) { active().axpy(alpha, x.data(), y.data(), y.size()); }
inline void scale(MutSpan w, double alpha) { active().scale(w.data(), alpha, w.size()); }

}  // namespace streamsvm::simd
