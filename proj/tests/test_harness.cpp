#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "streamsvm/error.hpp"
#include "streamsvm/harness.hpp"

using namespace streamsvm;
using namespace streamsvm::harness;
using data::Dataset;

namespace {

std::pair<Dataset, Dataset> small_synth(std::uint64_t seed, std::size_t n_train = 400) {
  data::SynthSpec spec;
  spec.n_train = n_train;
  spec.n_test = 100;
  spec.dim = 2;
  spec.seed = seed;
  return data::gen_gaussian_clusters(spec);
}

}  // namespace

TEST_CASE("evaluate examples") {
  Dataset test;
  test.examples = {{{{1, 1.0}}, 1}, {{{1, -1.0}}, -1}, {{{1, 2.0}}, 1}, {{{2, 3.0}}, -1}};
  test.dim = 2;
  const std::vector<double> zero(2, 0.0);  // every score ties at 0 and predicts +1
  CHECK(evaluate(zero, test) == 0.5);

  model::LinearModel perfect;
  perfect.w = {1.0, -1.0};
  CHECK(evaluate(perfect, test) == 1.0);

  CHECK_THROWS_AS(evaluate(std::vector<double>{1.0}, test), Error);
  CHECK_THROWS_AS(evaluate(perfect, Dataset{}), Error);

  // A model trained on separable data classifies its own training set.
  Dataset sep;
  for (int i = 1; i <= 20; ++i) {
    sep.examples.push_back({{{1, 1.0 * i}, {2, 0.1}}, 1});
    sep.examples.push_back({{{1, -1.0 * i}, {2, 0.1}}, -1});
  }
  sep.dim = 2;
  trainer::TrainConfig tc;
  tc.C = 1e6;
  CHECK(evaluate(trainer::train_stream_l1(sep, tc).model, sep) == 1.0);
  CHECK(evaluate(model::AnyModel(trainer::train_stream_l1(sep, tc).model), sep) == 1.0);
}

TEST_CASE("comparison is deterministic and independent of the thread count") {
  const auto [train, test] = small_synth(1);
  ExperimentConfig cfg;
  cfg.seed_base = 42;
  cfg.lookahead_L = 5;
  cfg.kernel = model::KernelSpec::rbf(0.5);
  const std::vector<Algo> algos{Algo::stream, Algo::lookahead, Algo::kernel, Algo::perceptron, Algo::sgd,
                                Algo::batch_ref};
  const auto a = run_single_pass_comparison(train, test, algos, cfg, 4);
  const auto b = run_single_pass_comparison(train, test, algos, cfg, 4);
  CHECK(runs_csv(a) == runs_csv(b));
  cfg.threads = 3;
  const auto c = run_single_pass_comparison(train, test, algos, cfg, 4);
  CHECK(runs_csv(a) == runs_csv(c));
  CHECK(aggregates_csv(aggregate(a)) == aggregates_csv(aggregate(c)));

  REQUIRE(a.size() == 24);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].algo == algo_name(algos[i / 4]));
    CHECK(a[i].seed == 42 + i % 4);
    CHECK(a[i].accuracy >= 0.0);
    CHECK(a[i].accuracy <= 1.0);
  }
  CHECK(a[4].L == 5);
  CHECK(a[0].L == 1);

  // Runs are individually reproducible from their seed.
  const auto order = data::permute_stream(train, 43);
  auto single = run_once(Algo::lookahead, order, test, cfg, 5);
  single.seed = 43;
  CHECK(single == a[5]);
}

TEST_CASE("aggregates are recomputable from the rows") {
  const auto [train, test] = small_synth(2);
  ExperimentConfig cfg;
  const auto runs = run_single_pass_comparison(train, test, {Algo::stream, Algo::perceptron}, cfg, 7);
  const auto agg = aggregate(runs);
  REQUIRE(agg.size() == 2);
  for (std::size_t g = 0; g < 2; ++g) {
    long double sum = 0;
    for (std::size_t i = 0; i < 7; ++i) sum += runs[g * 7 + i].accuracy;
    const long double mean = sum / 7;
    long double ss = 0;
    for (std::size_t i = 0; i < 7; ++i) ss += (runs[g * 7 + i].accuracy - mean) * (runs[g * 7 + i].accuracy - mean);
    CHECK(std::abs(agg[g].mean_accuracy - static_cast<double>(mean)) <= 1e-12);
    CHECK(std::abs(agg[g].std_accuracy - static_cast<double>(std::sqrt(ss / 6))) <= 1e-12);
    CHECK(agg[g].n_runs == 7);
  }
  CHECK(aggregate({runs[0]})[0].std_accuracy == 0.0);
}

TEST_CASE("runs CSV re-parses to the same values") {
  const auto [train, test] = small_synth(3);
  ExperimentConfig cfg;
  cfg.timing = true;
  const auto runs = run_single_pass_comparison(train, test, {Algo::stream, Algo::lookahead}, cfg, 3);
  CHECK(parse_runs_csv(runs_csv(runs, true)) == runs);
  auto untimed = runs;
  for (auto& r : untimed) r.wall_ms = 0.0;
  CHECK(parse_runs_csv(runs_csv(untimed)) == untimed);
  CHECK(runs_csv(untimed).starts_with("algo,L,seed,accuracy,M,R\n"));
  CHECK_THROWS_AS(parse_runs_csv("algo,L,seed,accuracy,M,R\nstream,1,0,x,1,1\n"), ParseError);
}

TEST_CASE("sweep with L = 1 matches the stream rows of a comparison") {
  const auto [train, test] = small_synth(4);
  ExperimentConfig cfg;
  cfg.seed_base = 9;
  const auto sweep = run_lookahead_sweep(train, test, {1, 4}, 6, cfg);
  const auto cmp = run_single_pass_comparison(train, test, {Algo::stream}, cfg, 6);
  REQUIRE(sweep.points.size() == 2);
  const auto agg = aggregate(cmp);
  CHECK(sweep.points[0].mean_accuracy == agg[0].mean_accuracy);
  CHECK(sweep.points[0].std_accuracy == agg[0].std_accuracy);
  for (std::size_t i = 0; i < 6; ++i) CHECK(sweep.runs[i] == cmp[i]);
  CHECK(sweep.points[1].L == 4);
  CHECK(sweep.points[1].n_perms == 6);
  CHECK(sweep_csv(sweep).starts_with("L,n_perms,mean_accuracy,std_accuracy\n1,6,"));

  cfg.threads = 4;
  CHECK(sweep_csv(run_lookahead_sweep(train, test, {1, 4}, 6, cfg)) == sweep_csv(sweep));
  CHECK_THROWS(run_lookahead_sweep(train, test, {}, 6, cfg));
}

TEST_CASE("adversarial bound check") {
  const auto report = run_adversarial_bound_check(101, 20, 0, 2);
  REQUIRE(report.stats.size() == 3);
  const auto& last = report.stats[0];
  const auto& first = report.stats[1];
  const auto& random = report.stats[2];
  CHECK(last.ordering == Ordering::singleton_last);
  CHECK(last.min >= (1 + std::numbers::sqrt2) / 2 - 1e-6);
  for (const auto& s : report.stats) CHECK(s.max <= 1.5 + 1e-9);
  for (const auto& s : report.stats) CHECK(s.min >= 1.0 - 1e-12);
  MESSAGE("singleton-first max ratio " << first.max << ", random mean " << random.mean);
  // Singleton first: the stream sees (a,0), (0,1), (0,-1) with a = 1+sqrt(2)
  // (later cloud points fall inside), while the optimum is the circle of
  // radius sqrt(2) centered at (1,0).
  const double a = 1 + std::numbers::sqrt2;
  const double r2 = 0.5 * std::sqrt(a * a + 1);
  const double r3 = (r2 + std::sqrt(a * a / 4 + 9.0 / 4)) / 2;
  CHECK(first.max == doctest::Approx(r3 / std::numbers::sqrt2).epsilon(1e-5));
  CHECK(first.max <= 1.15);
  CHECK(report.runs.size() == 60);
  CHECK(adversarial_csv(report) == adversarial_csv(run_adversarial_bound_check(101, 20, 0, 1)));
  CHECK_THROWS(run_adversarial_bound_check(100, 2));
}

TEST_CASE("external predictions") {
  const auto preds = read_predictions("+1\n-1\n# comment\n\n0\n1 \n");
  CHECK(preds == std::vector<int>{1, -1, -1, 1});
  Dataset test;
  test.examples = {{{}, 1}, {{}, 1}, {{}, -1}, {{}, 1}};
  CHECK(prediction_accuracy(preds, test) == 0.75);
  CHECK_THROWS_AS(read_predictions("+1\n2\n"), ParseError);
  CHECK_THROWS_AS(prediction_accuracy({1}, test), Error);
}

TEST_CASE("parallel_for propagates exceptions and covers every index") {
  std::vector<int> hit(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 100);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 5) throw Error("boom");
                  }),
                  Error);
}

TEST_CASE("algorithm names") {
  for (Algo a : {Algo::stream, Algo::lookahead, Algo::kernel, Algo::perceptron, Algo::sgd, Algo::batch_ref}) {
    CHECK(parse_algo(algo_name(a)) == a);
  }
  CHECK_THROWS(parse_algo("lasvm"));
}
