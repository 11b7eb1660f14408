#include "streamsvm/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "streamsvm/simd.hpp"

namespace streamsvm::trainer {

using data::Example;
using data::ExampleStream;
using model::KernelModel;
using model::LinearModel;
using model::XiConvention;

void TrainConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("C must be a positive finite number");
  if (L < 1) throw std::invalid_argument("L must be at least 1");
  if (!(update_tol >= 0.0) || !std::isfinite(update_tol)) {
    throw std::invalid_argument("update_tol must be a non-negative finite number");
  }
  merge.validate();
}

namespace {

void check_example(const Example& ex, std::size_t index) {
  if (ex.label != 1 && ex.label != -1) {
    throw Error("example " + std::to_string(index) + ": label must be -1 or +1");
  }
  for (const auto& f : ex.features) {
    if (!std::isfinite(f.value)) {
      throw Error("example " + std::to_string(index) + ": non-finite feature " + std::to_string(f.index));
    }
    if (f.index == 0) throw Error("example " + std::to_string(index) + ": feature index 0");
  }
}

const Example& first_example(ExampleStream& stream) {
  const Example* ex = stream.next();
  if (ex == nullptr) throw Error("empty training stream");
  check_example(*ex, 0);
  return *ex;
}

void grow(std::vector<double>& v, std::size_t dim) {
  if (v.size() < dim) v.resize(dim, 0.0);
}

// Slack mass contributed by a step of length s toward a fresh example.
double slack_step(double s2, double s, double C, XiConvention xi) {
  const double fresh = xi == XiConvention::corrected ? s * s / C : s * s;
  return s2 * (1.0 - s) * (1.0 - s) + fresh;
}

double initial_slack(double C, XiConvention xi) { return xi == XiConvention::corrected ? 1.0 / C : 1.0; }

}  // namespace

TrainResult<LinearModel> train_stream_l1(ExampleStream& stream, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult<LinearModel> out;
  LinearModel& m = out.model;
  m.C = cfg.C;

  const Example& first = first_example(stream);
  m.w.assign(std::max(stream.dim_hint(), data::max_index(first.features)), 0.0);
  data::add_scaled(m.w, first.features, first.label);
  m.R = 0.0;
  m.s2 = initial_slack(cfg.C, cfg.xi_convention);
  m.M = 1;

  // y x is scattered into `target` for the dense distance and step, then
  // cleared again touching only its nonzeros.
  std::vector<double> target(m.w.size(), 0.0);
  std::size_t index = 1;
  for (const Example* ex = stream.next(); ex != nullptr; ex = stream.next(), ++index) {
    check_example(*ex, index);
    const std::size_t need = data::max_index(ex->features);
    grow(m.w, need);
    grow(target, m.w.size());
    data::add_scaled(target, ex->features, ex->label);

    const double d = std::sqrt(simd::squared_distance(m.w, target) + m.s2 + 1.0 / m.C);
    if (d > m.R * (1.0 + cfg.update_tol)) {
      const double s = 0.5 * (1.0 - m.R / d);
      const double r_before = m.R;
      simd::lerp_toward(m.w, target, s);
      m.s2 = slack_step(m.s2, s, m.C, cfg.xi_convention);
      m.R += 0.5 * (d - m.R);
      ++m.M;
      ++out.trace.updates;
      if (cfg.record_trace) out.trace.records.push_back({index, d, r_before, m.R, false, 0});
    }
    for (const auto& f : ex->features) target[f.index - 1] = 0.0;
  }
  out.trace.examples = index;
  return out;
}

TrainResult<LinearModel> train_stream_lookahead(ExampleStream& stream, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.xi_convention != XiConvention::corrected) {
    throw UnsupportedConfiguration("lookahead training requires the corrected s2 convention");
  }
  TrainResult<LinearModel> out;
  LinearModel& m = out.model;
  m.C = cfg.C;

  const Example& first = first_example(stream);
  m.w.assign(std::max(stream.dim_hint(), data::max_index(first.features)), 0.0);
  data::add_scaled(m.w, first.features, first.label);
  m.R = 0.0;
  m.s2 = 1.0 / cfg.C;
  m.M = 1;

  std::vector<Example> buffer;
  buffer.reserve(cfg.L);
  std::vector<double> target;
  const double slack = 1.0 / std::sqrt(cfg.C);

  // Working space: w on axes [0, D), the center's slack mass on axis D, and
  // one fresh slack axis per buffered example after that.
  auto flush = [&](std::size_t position) {
    const std::size_t D = m.w.size();
    const std::size_t L = buffer.size();
    geometry::Ball ball;
    ball.center.assign(D + 1 + L, 0.0);
    std::copy(m.w.begin(), m.w.end(), ball.center.begin());
    ball.center[D] = std::sqrt(m.s2);
    ball.radius = m.R;
    std::vector<geometry::Point> points(L, geometry::Point(D + 1 + L, 0.0));
    for (std::size_t i = 0; i < L; ++i) {
      data::add_scaled(points[i], buffer[i].features, buffer[i].label);
      points[i][D + 1 + i] = slack;
    }
    geometry::MergeResult merged;
    try {
      merged = geometry::enclose_ball_and_points_detailed(ball, points, cfg.merge);
    } catch (const geometry::MergeSolverError& e) {
      throw MergeFailure(std::string(e.what()) + " (flush ending at stream position " +
                             std::to_string(position) + ")",
                         position);
    }
    const auto& beta = merged.weights;
    const double r_before = m.R;
    simd::scale(m.w, beta[0]);
    double fresh = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      data::add_scaled(m.w, buffer[i].features, beta[i + 1] * buffer[i].label);
      fresh += beta[i + 1] * beta[i + 1];
    }
    m.s2 = beta[0] * beta[0] * m.s2 + fresh / cfg.C;
    m.R = merged.ball.radius;
    m.M += static_cast<std::int64_t>(L);
    ++out.trace.updates;
    if (cfg.record_trace) out.trace.records.push_back({position, 0.0, r_before, m.R, true, L});
    buffer.clear();
  };

  std::size_t index = 1;
  for (const Example* ex = stream.next(); ex != nullptr; ex = stream.next(), ++index) {
    check_example(*ex, index);
    grow(m.w, data::max_index(ex->features));
    grow(target, m.w.size());
    data::add_scaled(target, ex->features, ex->label);
    const double d = std::sqrt(simd::squared_distance(m.w, target) + m.s2 + 1.0 / m.C);
    for (const auto& f : ex->features) target[f.index - 1] = 0.0;
    if (d > m.R * (1.0 + cfg.update_tol)) {
      buffer.push_back(*ex);
      if (buffer.size() == cfg.L) flush(index);
    }
  }
  if (!buffer.empty()) flush(index - 1);
  out.trace.examples = index;
  return out;
}

TrainResult<KernelModel> train_stream_kernel(ExampleStream& stream, const TrainConfig& cfg,
                                             const model::KernelSpec& kernel) {
  cfg.validate();
  if (cfg.L > 1) throw UnsupportedConfiguration("kernel training does not support lookahead (L > 1)");
  if (kernel.kind == model::KernelSpec::Kind::rbf && !(kernel.gamma > 0.0)) {
    throw std::invalid_argument("rbf gamma must be positive");
  }
  TrainResult<KernelModel> out;
  KernelModel& m = out.model;
  m.C = cfg.C;
  m.kernel = kernel;

  const Example& first = first_example(stream);
  m.support.push_back({first.features, static_cast<double>(first.label)});
  m.center_norm2 = kernel(first.features, first.features);
  m.R = 0.0;
  m.s2 = initial_slack(cfg.C, cfg.xi_convention);
  m.M = 1;

  std::size_t index = 1;
  for (const Example* ex = stream.next(); ex != nullptr; ex = stream.next(), ++index) {
    check_example(*ex, index);
    const double kx = m.score(ex->features);
    const double kxx = kernel(ex->features, ex->features);
    const double d = model::aug_distance_kernel(m, ex->features, ex->label, kx);
    if (d > m.R * (1.0 + cfg.update_tol)) {
      const double s = 0.5 * (1.0 - m.R / d);
      const double r_before = m.R;
      for (auto& sv : m.support) sv.alpha *= 1.0 - s;
      m.support.push_back({ex->features, s * ex->label});
      m.center_norm2 = (1.0 - s) * (1.0 - s) * m.center_norm2 + 2.0 * s * (1.0 - s) * ex->label * kx +
                       s * s * kxx;
      m.s2 = slack_step(m.s2, s, m.C, cfg.xi_convention);
      m.R += 0.5 * (d - m.R);
      ++m.M;
      ++out.trace.updates;
      if (cfg.record_trace) out.trace.records.push_back({index, d, r_before, m.R, false, 0});
    }
  }
  out.trace.examples = index;
  return out;
}

LinearModel train_explicit_reference(ExampleStream& stream, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.xi_convention != XiConvention::corrected) {
    throw UnsupportedConfiguration("the explicit reference only materializes the corrected convention");
  }
  std::vector<Example> examples;
  std::size_t dim = stream.dim_hint();
  for (const Example* ex = stream.next(); ex != nullptr; ex = stream.next()) {
    check_example(*ex, examples.size());
    if (examples.size() >= kExplicitReferenceMaxExamples) {
      throw Error("explicit reference refuses more than " + std::to_string(kExplicitReferenceMaxExamples) +
                  " examples");
    }
    dim = std::max(dim, data::max_index(ex->features));
    examples.push_back(*ex);
  }
  if (examples.empty()) throw Error("empty training stream");

  const std::size_t N = examples.size();
  const double slack = 1.0 / std::sqrt(cfg.C);
  auto materialize = [&](std::size_t n) {
    geometry::Point p(dim + N, 0.0);
    data::add_scaled(p, examples[n].features, examples[n].label);
    p[dim + n] = slack;
    return p;
  };

  geometry::Ball ball{materialize(0), 0.0};
  std::int64_t M = 1;
  for (std::size_t n = 1; n < N; ++n) {
    auto step = geometry::stream_update(ball, materialize(n), cfg.update_tol);
    if (step.updated) {
      ball = std::move(step.ball);
      ++M;
    }
  }
  LinearModel m;
  m.C = cfg.C;
  m.w.assign(ball.center.begin(), ball.center.begin() + static_cast<std::ptrdiff_t>(dim));
  m.s2 = 0.0;
  for (std::size_t i = dim; i < dim + N; ++i) m.s2 += ball.center[i] * ball.center[i];
  m.R = ball.radius;
  m.M = M;
  return m;
}

TrainResult<LinearModel> train_stream_l1(const data::Dataset& ds, const TrainConfig& cfg) {
  data::DatasetStream s(ds);
  return train_stream_l1(s, cfg);
}

TrainResult<LinearModel> train_stream_lookahead(const data::Dataset& ds, const TrainConfig& cfg) {
  data::DatasetStream s(ds);
  return train_stream_lookahead(s, cfg);
}

TrainResult<KernelModel> train_stream_kernel(const data::Dataset& ds, const TrainConfig& cfg,
                                             const model::KernelSpec& kernel) {
  data::DatasetStream s(ds);
  return train_stream_kernel(s, cfg, kernel);
}

LinearModel train_explicit_reference(const data::Dataset& ds, const TrainConfig& cfg) {
  data::DatasetStream s(ds);
  return train_explicit_reference(s, cfg);
}

}  // namespace streamsvm::trainer
