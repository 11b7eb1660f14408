#include "streamsvm/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "streamsvm/error.hpp"
#include "streamsvm/simd.hpp"

namespace streamsvm::baselines {

using data::Example;

namespace {

void grow(std::vector<double>& w, const Example& ex) {
  const std::size_t need = data::max_index(ex.features);
  if (w.size() < need) w.resize(need, 0.0);
}

}  // namespace

PerceptronResult train_perceptron(data::ExampleStream& stream) {
  PerceptronResult out;
  out.w.assign(stream.dim_hint(), 0.0);
  for (const Example* ex = stream.next(); ex != nullptr; ex = stream.next()) {
    ++out.examples;
    grow(out.w, *ex);
    if (ex->label * data::dot(ex->features, out.w) <= 0.0) {
      data::add_scaled(out.w, ex->features, ex->label);
      ++out.mistakes;
    }
  }
  return out;
}

PerceptronResult train_perceptron(const data::Dataset& ds) {
  data::DatasetStream s(ds);
  return train_perceptron(s);
}

void SgdConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (block_k < 1) throw std::invalid_argument("block_k must be at least 1");
}

SgdResult train_sgd_hinge(data::ExampleStream& stream, const SgdConfig& cfg) {
  cfg.validate();
  SgdResult out;
  out.w.assign(stream.dim_hint(), 0.0);
  std::vector<Example> block;
  block.reserve(cfg.block_k);
  std::vector<double> grad;

  auto step = [&]() {
    ++out.steps;
    const double eta = 1.0 / (cfg.lambda * static_cast<double>(out.steps));
    grad.assign(out.w.size(), 0.0);
    for (const auto& ex : block) {
      if (ex.label * data::dot(ex.features, out.w) < 1.0) data::add_scaled(grad, ex.features, ex.label);
    }
    simd::scale(out.w, 1.0 - eta * cfg.lambda);
    simd::axpy(eta / static_cast<double>(block.size()), grad, out.w);
    if (cfg.project) {
      const double norm = std::sqrt(simd::squared_norm(out.w));
      const double limit = 1.0 / std::sqrt(cfg.lambda);
      if (norm > limit) simd::scale(out.w, limit / norm);
    }
    block.clear();
  };

  for (const Example* ex = stream.next(); ex != nullptr; ex = stream.next()) {
    ++out.examples;
    grow(out.w, *ex);
    block.push_back(*ex);
    if (block.size() == cfg.block_k) step();
  }
  if (!block.empty()) step();
  return out;
}

SgdResult train_sgd_hinge(const data::Dataset& ds, const SgdConfig& cfg) {
  data::DatasetStream s(ds);
  return train_sgd_hinge(s, cfg);
}

BatchResult train_batch_l2svm_ref(const data::Dataset& ds, double C, double epsilon) {
  if (ds.empty()) throw Error("batch reference needs a nonempty dataset");
  if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("C must be a positive finite number");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");

  const std::size_t n = ds.size();
  std::size_t dim = ds.dim;
  for (const auto& ex : ds.examples) dim = std::max(dim, data::max_index(ex.features));
  const double inv_c = 1.0 / C;
  std::vector<double> norm2(n);
  for (std::size_t i = 0; i < n; ++i) norm2[i] = data::squared_norm(ds.examples[i].features);

  // Center = sum_i alpha_i phi~_i. Feature part w, slack part of squared norm slack2.
  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(dim, 0.0);
  alpha[0] = 1.0;
  data::add_scaled(w, ds.examples[0].features, ds.examples[0].label);
  double slack2 = inv_c;

  std::vector<char> touched(n, 0);
  touched[0] = 1;
  BatchResult out;
  out.core_indices.push_back(0);

  std::vector<double> dist2(n);
  auto farthest = [&]() {
    const double w2 = simd::squared_norm(w);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ex = ds.examples[i];
      // |c - phi~_i|^2 = |w - y x|^2 + slack2 - 2 alpha_i / C + 1/C
      const double d2 = w2 - 2.0 * ex.label * data::dot(ex.features, w) + norm2[i] + slack2 -
                        2.0 * alpha[i] * inv_c + inv_c;
      dist2[i] = std::max(d2, 0.0);
      if (dist2[i] > dist2[best]) best = i;
    }
    return best;
  };

  const auto max_iter = static_cast<std::size_t>(std::ceil(1.0 / (epsilon * epsilon)));
  std::size_t t = 1;
  for (;; ++t) {
    const std::size_t far = farthest();
    double lower2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) lower2 += alpha[i] * dist2[i];
    out.lower_bound = std::sqrt(std::max(lower2, 0.0));
    if (std::sqrt(dist2[far]) <= (1.0 + epsilon) * out.lower_bound || t > max_iter) break;

    const double step = 1.0 / static_cast<double>(t + 1);
    simd::scale(w, 1.0 - step);
    data::add_scaled(w, ds.examples[far].features, step * ds.examples[far].label);
    slack2 = (1.0 - step) * (1.0 - step) * slack2 + 2.0 * step * (1.0 - step) * alpha[far] * inv_c +
             step * step * inv_c;
    for (auto& a : alpha) a *= 1.0 - step;
    alpha[far] += step;
    if (!touched[far]) {
      touched[far] = 1;
      out.core_indices.push_back(far);
    }
  }
  out.iterations = t - 1;

  const std::size_t far = farthest();
  out.model.w = std::move(w);
  out.model.R = std::sqrt(dist2[far]);
  out.model.s2 = slack2;
  out.model.C = C;
  out.model.M = static_cast<std::int64_t>(out.core_indices.size());
  return out;
}

}  // namespace streamsvm::baselines
