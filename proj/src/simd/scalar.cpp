#include "streamsvm/simd.hpp"

namespace streamsvm::simd {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm_ref(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double squared_distance_ref(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void lerp_toward_ref(double* w, const double* target, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] += s * (target[i] - w[i]);
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_ref(double* w, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] *= alpha;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{dot_ref,         squared_norm_ref, squared_distance_ref,
                                 lerp_toward_ref, axpy_ref,         scale_ref,
                                 "scalar"};
  return table;
}

}  // namespace streamsvm::simd
