#include <cmath>
#include <random>

#include "doctest.h"
#include "streamsvm/error.hpp"
#include "streamsvm/geometry.hpp"
#include "streamsvm/trainer.hpp"
#include "test_support.hpp"

using namespace streamsvm;
using namespace streamsvm::trainer;
using data::Dataset;
using data::Example;
using model::LinearModel;

namespace {

// Labels follow a noisy random hyperplane, features are standard normal.
Dataset random_stream(std::mt19937_64& gen, std::size_t n, std::size_t dim, double noise = 0.5) {
  std::normal_distribution<double> normal;
  std::vector<double> u(dim);
  for (auto& v : u) v = normal(gen);
  Dataset ds;
  ds.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    Example ex;
    double proj = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double v = normal(gen);
      ex.features.push_back({static_cast<std::uint32_t>(k + 1), v});
      proj += v * u[k];
    }
    ex.label = proj + noise * normal(gen) >= 0 ? 1 : -1;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::vector<geometry::Point> materialize(const Dataset& ds, double C) {
  const std::size_t N = ds.size();
  std::vector<geometry::Point> pts(N, geometry::Point(ds.dim + N, 0.0));
  for (std::size_t n = 0; n < N; ++n) {
    for (const auto& f : ds.examples[n].features) pts[n][f.index - 1] = ds.examples[n].label * f.value;
    pts[n][ds.dim + n] = 1.0 / std::sqrt(C);
  }
  return pts;
}

double max_abs_dev(const LinearModel& a, const LinearModel& b) {
  double dev = std::max({std::abs(a.R - b.R), std::abs(a.s2 - b.s2),
                         std::abs(static_cast<double>(a.M - b.M))});
  REQUIRE(a.w.size() == b.w.size());
  for (std::size_t i = 0; i < a.w.size(); ++i) dev = std::max(dev, std::abs(a.w[i] - b.w[i]));
  return dev;
}

TrainConfig config(double C, std::size_t L = 1) {
  TrainConfig cfg;
  cfg.C = C;
  cfg.L = L;
  return cfg;
}

}  // namespace

TEST_CASE("train_stream_l1 examples") {
  Dataset one;
  one.examples = {{{{1, 1.0}}, 1}};
  one.dim = 2;
  auto m = train_stream_l1(one, config(1.0)).model;
  CHECK(m.w == std::vector<double>{1.0, 0.0});
  CHECK(m.R == 0.0);
  CHECK(m.M == 1);
  CHECK(m.s2 == 1.0);

  Dataset two = one;
  two.examples.push_back({{{1, -1.0}}, -1});
  TrainConfig cfg = config(1.0);
  cfg.record_trace = true;
  const auto res = train_stream_l1(two, cfg);
  m = res.model;
  CHECK(m.w[0] == doctest::Approx(1.0));
  CHECK(m.w[1] == 0.0);
  CHECK(m.R == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(m.s2 == doctest::Approx(0.5));
  CHECK(m.M == 2);
  REQUIRE(res.trace.records.size() == 1);
  CHECK(res.trace.records[0].index == 1);
  CHECK(res.trace.records[0].d == doctest::Approx(std::sqrt(2.0)));

  const auto ref = train_explicit_reference(two, config(1.0));
  CHECK(max_abs_dev(ref, m) < 1e-15);

  const auto single = train_explicit_reference(one, config(1.0));
  CHECK(single.w == std::vector<double>{1.0, 0.0});
  CHECK(single.R == 0.0);
}

TEST_CASE("train_stream_l1 paper-literal convention") {
  Dataset two;
  two.examples = {{{{1, 1.0}}, 1}, {{{1, -1.0}}, -1}};
  two.dim = 1;
  TrainConfig cfg = config(4.0);
  cfg.xi_convention = model::XiConvention::paper_literal;
  const auto m = train_stream_l1(two, cfg).model;
  // d = sqrt(0 + 1 + 1/4), s = 1/2, xi^2 = 1/4 + 1/4.
  CHECK(m.R == doctest::Approx(std::sqrt(1.25) / 2));
  CHECK(m.s2 == doctest::Approx(0.5));
  CHECK_THROWS_AS(train_stream_lookahead(two, cfg), UnsupportedConfiguration);
  CHECK_THROWS_AS(train_explicit_reference(two, cfg), UnsupportedConfiguration);
}

TEST_CASE("train_stream_l1 matches the explicit reference") {
  std::mt19937_64 gen(17);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const double C = std::array{0.1, 1.0, 10.0}[trial % 3];
    const auto ds = random_stream(gen, 300, 10);
    const auto fast = train_stream_l1(ds, config(C)).model;
    const auto ref = train_explicit_reference(ds, config(C));
    worst = std::max(worst, max_abs_dev(fast, ref));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("train_stream_l1 invariants") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double C = std::exp(std::normal_distribution<double>()(gen));
    const auto ds = random_stream(gen, 120, 3);
    TrainConfig cfg = config(C);
    cfg.record_trace = true;
    const auto res = train_stream_l1(ds, cfg);
    const auto& m = res.model;
    // Monotone radius, one record per update, M - 1 updates.
    double prev = 0.0;
    for (const auto& r : res.trace.records) {
      CHECK(r.R_before == prev);
      CHECK(r.R_after >= r.R_before);
      prev = r.R_after;
    }
    CHECK(res.trace.updates == static_cast<std::size_t>(m.M - 1));
    CHECK(m.M <= static_cast<std::int64_t>(ds.size()));
    CHECK(m.s2 <= 1.0 / C + 1e-12);
    CHECK(res.trace.examples == ds.size());

    // Enclosure and the 3/2 bound in the materialized augmented space. The
    // explicit trainer supplies the full center (its w, s2 agree with ours).
    const auto pts = materialize(ds, C);
    geometry::Ball ball{pts[0], 0.0};
    for (std::size_t n = 1; n < pts.size(); ++n) {
      auto step = geometry::stream_update(ball, pts[n]);
      if (step.updated) ball = step.ball;
    }
    CHECK(ball.radius == doctest::Approx(m.R).epsilon(1e-10));
    for (const auto& p : pts) CHECK(testing::plain_distance(p, ball.center) <= m.R * (1 + 1e-6));
    const auto exact = geometry::exact_meb(pts);
    CHECK(m.R >= exact.radius * (1 - 1e-9));
    CHECK(m.R <= 1.5 * exact.radius);

    // Bit-identical on a rerun.
    CHECK(train_stream_l1(ds, cfg).model == m);
  }
}

TEST_CASE("train_stream_l1 input handling") {
  Dataset empty;
  CHECK_THROWS_AS(train_stream_l1(empty, config(1.0)), Error);
  CHECK_THROWS_AS(train_stream_lookahead(empty, config(1.0)), Error);
  CHECK_THROWS_AS(train_stream_kernel(empty, config(1.0), model::KernelSpec::linear()), Error);
  CHECK_THROWS_AS(train_explicit_reference(empty, config(1.0)), Error);

  Dataset bad;
  bad.examples = {{{{1, 1.0}}, 1}, {{{1, std::nan("")}}, -1}};
  try {
    train_stream_l1(bad, config(1.0));
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("example 1") != std::string::npos);
  }
  CHECK_THROWS(train_stream_l1(bad, config(0.0)));
  CHECK_THROWS(train_stream_l1(bad, config(1.0, 0)));

  // Dimension unknown up front: w grows with the largest index seen.
  Dataset grow;
  grow.examples = {{{{1, 1.0}}, 1}, {{{4, 1.0}}, -1}};
  const auto m = train_stream_l1(grow, config(1.0)).model;
  CHECK(m.w.size() == 4);
  CHECK(m.w[3] == doctest::Approx(-0.5 * (1.0 - 0.0)));
}

TEST_CASE("lookahead with L = 1 equals the closed form") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = random_stream(gen, 200, 5);
    const double C = std::array{0.1, 1.0, 10.0}[trial % 3];
    const auto a = train_stream_l1(ds, config(C)).model;
    const auto b = train_stream_lookahead(ds, config(C, 1)).model;
    CHECK(a.M == b.M);
    CHECK(b.R == doctest::Approx(a.R).epsilon(1e-8));
    CHECK(max_abs_dev(a, b) < 1e-6 * (1 + a.R));
  }
}

TEST_CASE("lookahead with L >= N solves the exact augmented MEB") {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ds = random_stream(gen, 50, 2);
    const double C = 1.0 + trial;
    TrainConfig cfg = config(C, 64);
    const auto m = train_stream_lookahead(ds, cfg).model;
    const auto exact = geometry::exact_meb(materialize(ds, C));
    CHECK(m.R >= exact.radius * (1 - 1e-9));
    CHECK(m.R <= exact.radius * (1 + cfg.merge.merge_tolerance));
  }
}

TEST_CASE("lookahead flushes the final partial buffer and counts buffered examples") {
  // Points on alternating sides at growing distance: every one lies outside
  // the current ball, so all 23 are buffered (4 full flushes and one of 3).
  Dataset ds;
  for (int n = 0; n < 23; ++n) {
    ds.examples.push_back({{{1, std::pow(3.0, n)}}, n % 2 ? -1 : 1});
  }
  TrainConfig cfg = config(1.0, 5);
  cfg.record_trace = true;
  const auto res = train_stream_lookahead(ds, cfg);
  REQUIRE(res.trace.records.size() == 5);
  for (const auto& r : res.trace.records) CHECK(r.flush);
  CHECK(res.trace.records.back().buffered == 2);
  CHECK(res.trace.records.back().index == 22);
  CHECK(res.model.M == 23);

  std::mt19937_64 gen(31);
  const auto noisy = random_stream(gen, 23, 3);
  const auto r2 = train_stream_lookahead(noisy, cfg);
  std::size_t buffered = 0;
  double prev = 0.0;
  for (const auto& r : r2.trace.records) {
    CHECK(r.buffered >= 1);
    CHECK(r.buffered <= 5);
    CHECK(r.R_after >= prev);
    prev = r.R_after;
    buffered += r.buffered;
  }
  CHECK(r2.model.M == static_cast<std::int64_t>(1 + buffered));
}

TEST_CASE("lookahead radius never exceeds the closed form by much and beats it on average") {
  std::mt19937_64 gen(37);
  double sum_l1 = 0.0, sum_l10 = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto ds = random_stream(gen, 300, 4);
    sum_l1 += train_stream_l1(ds, config(1.0)).model.R;
    sum_l10 += train_stream_lookahead(ds, config(1.0, 10)).model.R;
  }
  CHECK(sum_l10 <= sum_l1);
}

TEST_CASE("merge failure carries the stream position") {
  std::mt19937_64 gen(41);
  const auto ds = random_stream(gen, 40, 3);
  TrainConfig cfg = config(1.0, 8);
  cfg.merge.max_iterations = 1;
  cfg.merge.merge_tolerance = 1e-15;
  try {
    train_stream_lookahead(ds, cfg);
    FAIL("expected a merge failure");
  } catch (const MergeFailure& e) {
    CHECK(e.position() < ds.size());
    CHECK(std::string(e.what()).find("stream position") != std::string::npos);
  }
}

TEST_CASE("kernel trainer") {
  Dataset first;
  first.examples = {{{{1, 1.0}}, 1}};
  const auto one = train_stream_kernel(first, config(1.0), model::KernelSpec::rbf(1.0)).model;
  REQUIRE(one.support.size() == 1);
  CHECK(one.support[0].alpha == 1.0);
  CHECK(one.support[0].x == first.examples[0].features);

  CHECK_THROWS_AS(train_stream_kernel(first, config(1.0, 2), model::KernelSpec::linear()),
                  UnsupportedConfiguration);
  CHECK_THROWS_AS(train_stream_kernel(first, config(1.0, 2), model::KernelSpec::rbf(1.0)),
                  UnsupportedConfiguration);

  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto train = random_stream(gen, 200, 4);
    const auto test = random_stream(gen, 100, 4);
    const double C = std::array{0.1, 1.0, 10.0}[trial % 3];
    const auto lin = train_stream_l1(train, config(C)).model;
    const auto ker = train_stream_kernel(train, config(C), model::KernelSpec::linear()).model;
    CHECK(ker.M == lin.M);
    CHECK(ker.R == doctest::Approx(lin.R).epsilon(1e-9));
    CHECK(ker.s2 == doctest::Approx(lin.s2).epsilon(1e-9));
    CHECK(ker.center_norm2 == doctest::Approx(ker.recompute_center_norm2()).epsilon(1e-9));
    for (const auto& ex : test.examples) {
      CHECK(model::predict(ker, ex.features).label == model::predict(lin, ex.features).label);
    }
  }

  // XOR-like data with an rbf kernel: one pass, M <= N, and it fits.
  Dataset xor_data;
  std::normal_distribution<double> normal(0.0, 0.1);
  for (int i = 0; i < 200; ++i) {
    const double a = i % 2 ? 1.0 : -1.0;
    const double b = (i / 2) % 2 ? 1.0 : -1.0;
    xor_data.examples.push_back({{{1, a + normal(gen)}, {2, b + normal(gen)}}, a * b > 0 ? 1 : -1});
  }
  const auto xm = train_stream_kernel(xor_data, config(10.0), model::KernelSpec::rbf(1.0)).model;
  CHECK(xm.M <= 200);
  std::size_t correct = 0;
  for (const auto& ex : xor_data.examples) correct += model::predict(xm, ex.features).label == ex.label;
  CHECK(correct >= 190);
}

TEST_CASE("trainers read each example exactly once and copy what they keep") {
  std::mt19937_64 gen(47);
  const auto ds = random_stream(gen, 150, 3);
  auto counted = [&](auto&& train) {
    data::DatasetStream inner(ds);
    data::CountingStream counting(inner);
    auto result = train(counting);
    CHECK(counting.delivered() == ds.size());
    CHECK(counting.end_reads() == 1);
    return result;
  };
  CHECK(counted([&](auto& s) { return train_stream_l1(s, config(1.0)).model; }) ==
        train_stream_l1(ds, config(1.0)).model);
  CHECK(counted([&](auto& s) { return train_stream_lookahead(s, config(1.0, 7)).model; }) ==
        train_stream_lookahead(ds, config(1.0, 7)).model);
  CHECK(counted([&](auto& s) { return train_stream_kernel(s, config(1.0), model::KernelSpec::rbf(0.5)).model; }) ==
        train_stream_kernel(ds, config(1.0), model::KernelSpec::rbf(0.5)).model);
}

TEST_CASE("explicit reference refuses large inputs") {
  Dataset big;
  big.examples.assign(kExplicitReferenceMaxExamples + 1, Example{{{1, 1.0}}, 1});
  CHECK_THROWS_AS(train_explicit_reference(big, config(1.0)), Error);
}
