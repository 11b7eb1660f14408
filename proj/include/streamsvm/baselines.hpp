#pragma once

// Comparison baselines: two single-pass learners and a batch reference.

#include <cstdint>
#include <vector>

#include "streamsvm/data.hpp"
#include "streamsvm/model.hpp"

namespace streamsvm::baselines {

struct PerceptronResult {
  std::vector<double> w;
  std::size_t mistakes = 0;
  std::size_t examples = 0;
};

// Classical perceptron, one pass from w = 0: on y (w . x) <= 0, w += y x.
PerceptronResult train_perceptron(data::ExampleStream& stream);
PerceptronResult train_perceptron(const data::Dataset& ds);

struct SgdConfig {
  double lambda = 1e-4;
  std::size_t block_k = 1;
  std::uint64_t seed = 0;  // reserved; the sweep follows stream order and draws nothing
  bool project = false;    // project onto the ball of radius 1/sqrt(lambda) after each step

  void validate() const;
};

struct SgdResult {
  std::vector<double> w;
  std::size_t steps = 0;
  std::size_t examples = 0;
};

// "Pegasos-style" single sweep in consecutive blocks of k examples. Step t
// (1-based) uses eta = 1 / (lambda t) and
//   w <- (1 - eta lambda) w + (eta / k) sum_{violators} y x,
// where violators have y (w . x) < 1 at the start of the step. The last block
// may be short; it divides by its actual size. Not a full Pegasos
// implementation.
SgdResult train_sgd_hinge(data::ExampleStream& stream, const SgdConfig& cfg);
SgdResult train_sgd_hinge(const data::Dataset& ds, const SgdConfig& cfg);

struct BatchResult {
  model::LinearModel model;
  std::vector<std::size_t> core_indices;
  std::size_t iterations = 0;
  double lower_bound = 0.0;  // certified lower bound on the optimal radius
};

// Batch l2-SVM reference: the core-set MEB iteration run implicitly on the
// augmented points [y x ; C^{-1/2} e_n]. The center is kept as convex weights
// alpha over the examples; w = sum alpha_n y_n x_n and the slack part has
// squared norm sum alpha_n^2 / C. Same step rule, iteration cap and early
// exit as geometry::meb_core_set.
BatchResult train_batch_l2svm_ref(const data::Dataset& ds, double C, double epsilon);

}  // namespace streamsvm::baselines
