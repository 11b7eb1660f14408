#include "streamsvm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "streamsvm/rng.hpp"
#include "streamsvm/simd.hpp"

namespace streamsvm::geometry {

void MebSolverConfig::validate() const {
  if (!(merge_tolerance > 0.0 && merge_tolerance < 1.0)) {
    throw std::invalid_argument("merge_tolerance must lie in (0, 1)");
  }
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(epsilon_coreset > 0.0 && epsilon_coreset < 1.0)) {
    throw std::invalid_argument("epsilon_coreset must lie in (0, 1)");
  }
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

StreamUpdate stream_update(const Ball& ball, std::span<const double> p, double tol) {
  if (p.size() != ball.center.size()) {
    throw std::invalid_argument("stream_update: dimension mismatch (ball " +
                                std::to_string(ball.center.size()) + ", point " +
                                std::to_string(p.size()) + ")");
  }
  if (!all_finite(p) || !all_finite(ball.center) || !std::isfinite(ball.radius) ||
      ball.radius < 0.0) {
    throw std::invalid_argument("stream_update: non-finite input");
  }
  const double d = std::sqrt(simd::squared_distance(ball.center, p));
  if (!(d > ball.radius * (1.0 + tol))) return {ball, false};

  const double delta = 0.5 * (d - ball.radius);
  StreamUpdate out{ball, true};
  simd::lerp_toward(out.ball.center, p, delta / d);
  out.ball.radius = ball.radius + delta;
  return out;
}

Ball fold_stream(std::span<const Point> points, double tol) {
  if (points.empty()) throw std::invalid_argument("fold_stream: empty point list");
  Ball ball{points.front(), 0.0};
  for (std::size_t i = 1; i < points.size(); ++i) {
    auto step = stream_update(ball, points[i], tol);
    if (step.updated) ball = std::move(step.ball);
  }
  return ball;
}

Ball enclose_ball_and_points(const Ball& ball, std::span<const Point> points,
                             const MebSolverConfig& cfg) {
  return enclose_ball_and_points_detailed(ball, points, cfg).ball;
}

CoreSetResult meb_core_set(std::span<const Point> points, double epsilon) {
  if (points.empty()) throw std::invalid_argument("meb_core_set: empty point list");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("meb_core_set: epsilon must lie in (0, 1)");
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("meb_core_set: dimension mismatch");
  }

  const auto max_iter = static_cast<std::size_t>(std::ceil(1.0 / (epsilon * epsilon)));
  const std::size_t n = points.size();

  CoreSetResult out;
  Point center = points.front();
  // Convex weights of the center over the touched points (dual variables).
  std::vector<double> weight(n, 0.0);
  std::vector<char> touched(n, 0);
  std::vector<std::size_t> support{0};
  weight[0] = 1.0;
  touched[0] = 1;
  out.core_indices.push_back(0);

  std::vector<double> dist2(n);
  auto farthest = [&]() {
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dist2[i] = simd::squared_distance(center, points[i]);
      if (dist2[i] > dist2[best]) best = i;
    }
    return best;
  };

  std::size_t t = 1;
  for (;; ++t) {
    const std::size_t far = farthest();
    // Weak duality: sum_i w_i |p_i - c|^2 <= R*^2 for c the weighted mean.
    double lower2 = 0.0;
    for (std::size_t i : support) lower2 += weight[i] * dist2[i];
    out.lower_bound = std::sqrt(std::max(lower2, 0.0));
    const double upper = std::sqrt(dist2[far]);
    if (upper <= (1.0 + epsilon) * out.lower_bound || t > max_iter) break;

    const double step = 1.0 / static_cast<double>(t + 1);
    simd::lerp_toward(center, points[far], step);
    for (std::size_t i : support) weight[i] *= 1.0 - step;
    weight[far] += step;
    if (!touched[far]) {
      touched[far] = 1;
      support.push_back(far);
      out.core_indices.push_back(far);
    }
  }
  out.iterations = t - 1;

  const std::size_t far = farthest();
  out.ball.radius = std::sqrt(dist2[far]);
  out.ball.center = std::move(center);
  return out;
}

std::vector<Point> adversarial_stream(int n, std::uint64_t seed, SingletonPosition position) {
  if (n < 3 || n % 2 == 0) {
    throw std::invalid_argument("adversarial_stream: n must be odd and >= 3");
  }
  Rng rng(seed);
  const int half = (n - 1) / 2;
  auto jitter = [&]() {
    // Uniform in the disc of radius kAdversarialJitter.
    const double rho = kAdversarialJitter * std::sqrt(rng.uniform01());
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    return std::pair{rho * std::cos(theta), rho * std::sin(theta)};
  };

  // Cloud points alternate top/bottom so the first two already span the
  // diameter of the two clouds.
  std::vector<Point> cloud;
  cloud.reserve(static_cast<std::size_t>(2 * half));
  for (int i = 0; i < half; ++i) {
    for (double y : {1.0, -1.0}) {
      auto [dx, dy] = jitter();
      cloud.push_back({dx, y + dy});
    }
  }

  const Point singleton{1.0 + std::numbers::sqrt2, 0.0};
  std::size_t at = 0;
  switch (position) {
    case SingletonPosition::first: at = 0; break;
    case SingletonPosition::last: at = cloud.size(); break;
    case SingletonPosition::random: at = static_cast<std::size_t>(rng.uniform_index(cloud.size() + 1)); break;
  }
  std::vector<Point> out;
  out.reserve(cloud.size() + 1);
  out.insert(out.end(), cloud.begin(), cloud.begin() + static_cast<std::ptrdiff_t>(at));
  out.push_back(singleton);
  out.insert(out.end(), cloud.begin() + static_cast<std::ptrdiff_t>(at), cloud.end());
  return out;
}

}  // namespace streamsvm::geometry
