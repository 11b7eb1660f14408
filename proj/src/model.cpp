#include "streamsvm/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "streamsvm/error.hpp"
#include "streamsvm/number_text.hpp"
#include "streamsvm/simd.hpp"

namespace streamsvm::model {

double KernelSpec::operator()(const data::SparseVector& a, const data::SparseVector& b) const {
  switch (kind) {
    case Kind::linear:
      return data::dot(a, b);
    case Kind::rbf:
      return std::exp(-gamma * data::squared_distance(a, b));
    case Kind::normalized_dot: {
      // The zero vector has no direction; it is treated as its own unit
      // vector, orthogonal to everything else, so that k(x, x) = 1 holds.
      const double na = data::squared_norm(a);
      const double nb = data::squared_norm(b);
      if (na == 0.0 || nb == 0.0) return na == nb ? 1.0 : 0.0;
      return data::dot(a, b) / std::sqrt(na * nb);
    }
  }
  return 0.0;
}

std::string KernelSpec::to_string() const {
  switch (kind) {
    case Kind::linear:
      return "linear";
    case Kind::rbf:
      return "rbf:" + format_real(gamma);
    case Kind::normalized_dot:
      return "normalized_dot";
  }
  return {};
}

KernelSpec KernelSpec::parse(std::string_view text) {
  if (text == "linear") return linear();
  if (text == "normalized_dot") return normalized_dot();
  if (text.starts_with("rbf:")) {
    const auto g = parse_real(text.substr(4));
    if (!g || !(*g > 0.0)) throw Error("rbf gamma must be a positive number");
    return rbf(*g);
  }
  throw Error("unknown kernel '" + std::string(text) + "'");
}

double KernelModel::recompute_center_norm2() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    acc += support[i].alpha * support[i].alpha * kernel(support[i].x, support[i].x);
    for (std::size_t j = i + 1; j < support.size(); ++j) {
      acc += 2.0 * support[i].alpha * support[j].alpha * kernel(support[i].x, support[j].x);
    }
  }
  return acc;
}

double KernelModel::score(const data::SparseVector& x) const {
  double acc = 0.0;
  for (const auto& sv : support) acc += sv.alpha * kernel(sv.x, x);
  return acc;
}

namespace {

void check_label(int y) {
  if (y != 1 && y != -1) throw Error("label must be -1 or +1, got " + std::to_string(y));
}

}  // namespace

double aug_distance_linear(const LinearModel& m, const data::SparseVector& x, int y) {
  check_label(y);
  if (data::max_index(x) > m.dim()) {
    throw Error("feature index " + std::to_string(data::max_index(x)) + " exceeds model dimension " +
                std::to_string(m.dim()));
  }
  // |w - y x|^2 = |w|^2 - 2 y w.x + |x|^2, accumulated over the sparse support
  // so that the cost is O(D) without materializing y x.
  double d2 = simd::squared_norm(m.w);
  for (const auto& f : x) {
    const double wi = m.w[f.index - 1];
    const double diff = wi - y * f.value;
    d2 += diff * diff - wi * wi;
  }
  return std::sqrt(std::max(d2, 0.0) + m.s2 + 1.0 / m.C);
}

double aug_distance_linear_dense(const LinearModel& m, std::span<const double> signed_x) {
  if (signed_x.size() != m.dim()) throw Error("dimension mismatch in aug_distance_linear_dense");
  return std::sqrt(simd::squared_distance(m.w, signed_x) + m.s2 + 1.0 / m.C);
}

double aug_distance_kernel(const KernelModel& m, const data::SparseVector& x, int y,
                           double center_dot_x) {
  check_label(y);
  const double d2 = m.center_norm2 + m.kernel(x, x) - 2.0 * y * center_dot_x;
  return std::sqrt(std::max(d2, 0.0) + m.s2 + 1.0 / m.C);
}

double aug_distance_kernel(const KernelModel& m, const data::SparseVector& x, int y) {
  return aug_distance_kernel(m, x, y, m.score(x));
}

Prediction predict(std::span<const double> w, const data::SparseVector& x) {
  const double s = data::dot(x, w);
  return {s, sign_label(s)};
}

Prediction predict(const LinearModel& m, const data::SparseVector& x) { return predict(m.w, x); }

Prediction predict(const KernelModel& m, const data::SparseVector& x) {
  const double s = m.score(x);
  return {s, sign_label(s)};
}

std::vector<double> expand_linear(const KernelModel& m, std::size_t dim) {
  std::vector<double> w(dim, 0.0);
  for (const auto& sv : m.support) {
    if (data::max_index(sv.x) > dim) throw Error("support vector exceeds requested dimension");
    data::add_scaled(w, sv.x, sv.alpha);
  }
  return w;
}

}  // namespace streamsvm::model
