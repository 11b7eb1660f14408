#pragma once

// Experiment driver: accuracy evaluation, repeated single-pass comparisons
// over seeded orderings, lookahead sweeps and the adversarial ratio check.
//
// Run i of any experiment streams data::permute_stream(train, seed_base + i).
// Runs are independent, so they may execute on several threads; results are
// stored by run index and aggregated in seed order, which makes the output
// identical for any thread count.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include "streamsvm/baselines.hpp"
#include "streamsvm/data.hpp"
#include "streamsvm/model.hpp"
#include "streamsvm/trainer.hpp"

namespace streamsvm::harness {

enum class Algo { stream, lookahead, kernel, perceptron, sgd, batch_ref };

std::string algo_name(Algo a);  // "stream", "lookahead", "kernel", "perceptron", "sgd", "batch-ref"
Algo parse_algo(std::string_view name);

// Fraction of test examples whose predicted label equals the true label.
// Throws if test is empty or uses a feature index beyond the model dimension.
double evaluate(std::span<const double> w, const data::Dataset& test);
double evaluate(const model::LinearModel& m, const data::Dataset& test);
double evaluate(const model::KernelModel& m, const data::Dataset& test);
double evaluate(const model::AnyModel& m, const data::Dataset& test);

struct ExperimentConfig {
  trainer::TrainConfig train;  // C, merge settings, s2 convention
  std::size_t lookahead_L = 10;
  model::KernelSpec kernel;
  baselines::SgdConfig sgd;
  double batch_epsilon = 0.01;
  std::uint64_t seed_base = 0;
  std::size_t threads = 1;  // 0 = hardware concurrency
  bool timing = false;      // measure wall_ms (makes output run-dependent)
};

struct RunResult {
  std::string algo;
  double accuracy = 0.0;
  std::int64_t M = 0;  // core vectors (stream family), mistakes (perceptron), steps (sgd), core set (batch-ref)
  double R = 0.0;      // ball radius; 0 for perceptron and sgd
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::size_t L = 1;
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

// One training run of `algo` on train streamed in the order given.
RunResult run_once(Algo algo, const data::Dataset& train, const data::Dataset& test,
                   const ExperimentConfig& cfg, std::size_t L);

// n_runs orderings per algorithm. Rows are ordered by algorithm (as listed),
// then by seed.
std::vector<RunResult> run_single_pass_comparison(const data::Dataset& train, const data::Dataset& test,
                                                  const std::vector<Algo>& algos,
                                                  const ExperimentConfig& cfg, std::size_t n_runs);

struct Aggregate {
  std::string algo;
  std::size_t L = 1;
  std::size_t n_runs = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation (n - 1); 0 for a single run
  double mean_M = 0.0;
  double mean_R = 0.0;
};

// Groups consecutive rows with equal (algo, L), summing in row order.
std::vector<Aggregate> aggregate(const std::vector<RunResult>& runs);

struct SweepPoint {
  std::size_t L = 1;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::size_t n_perms = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<RunResult> runs;  // every individual run, grouped by L
};

// Lookahead accuracy over n_perms orderings for each L. L = 1 runs the closed
// form trainer so that it coincides with the "stream" rows of a comparison
// that uses the same seeds.
SweepResult run_lookahead_sweep(const data::Dataset& train, const data::Dataset& test,
                                const std::vector<std::size_t>& L_list, std::size_t n_perms,
                                const ExperimentConfig& cfg);

enum class Ordering { singleton_last, singleton_first, random };
std::string ordering_name(Ordering o);

struct AdversarialRun {
  Ordering ordering = Ordering::singleton_last;
  std::uint64_t seed = 0;
  double radius = 0.0;
  double optimal = 0.0;
  double ratio = 0.0;
};

struct RatioStats {
  Ordering ordering = Ordering::singleton_last;
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct AdversarialReport {
  std::vector<AdversarialRun> runs;
  std::vector<RatioStats> stats;  // one per ordering
};

// For each ordering and i < n_orderings: build adversarial_stream(n, seed_base + i)
// (singleton last or first; "random" shuffles the whole instance with the same
// seed), fold the streaming rule and divide by the exact MEB radius.
AdversarialReport run_adversarial_bound_check(int n, std::size_t n_orderings, std::uint64_t seed_base = 0,
                                              std::size_t threads = 1);

// --- output ---------------------------------------------------------------

std::string runs_csv(const std::vector<RunResult>& runs, bool with_time = false);
std::vector<RunResult> parse_runs_csv(std::string_view text);
std::string aggregates_csv(const std::vector<Aggregate>& rows);
std::string sweep_csv(const SweepResult& sweep);
std::string adversarial_csv(const AdversarialReport& report);
std::string adversarial_summary_json(const AdversarialReport& report);

// External solver predictions: one label (+1, 1, -1, or 0 for -1) per line,
// blank lines and '#' comments skipped.
std::vector<int> read_predictions(std::string_view text);
double prediction_accuracy(const std::vector<int>& predicted, const data::Dataset& test);

// Runs f(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). The first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& f);

}  // namespace streamsvm::harness
