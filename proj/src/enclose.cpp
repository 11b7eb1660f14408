// Smallest ball enclosing a ball and a finite point set.
//
// Works in coefficient space: with origin at the old center c and q_i = p_i - c,
// every candidate center is c + sum_i t_i q_i, and all geometry reduces to
// quadratic forms in the Gram matrix G_ij = q_i . q_j.
//
// The dual of the MEB of (points + boundary sphere of the old ball) is a
// maximization over probability measures. Every sphere point has squared norm
// r^2, so only the total sphere mass w and its first moment v (|v| <= w r)
// matter, and v can be optimized in closed form. That leaves a concave
// function on the (L+1)-simplex of weights (u_1..u_L, w):
//
//   h(u, w) = sum_i u_i |q_i|^2 + w r^2 - max(|P| - w r, 0)^2,  P = sum_i u_i q_i
//
// whose maximizer gives the optimal center P * (1 - w r / |P|)_+ and h = R*^2.
// h(u, w) <= R*^2 for every feasible (u, w), which certifies the primal radius.
// Maximized by Frank-Wolfe with away steps and exact line search; the gradient
// coordinates are squared distances from the current center, so the forward
// vertex is the farthest point (or the far side of the old ball).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "streamsvm/geometry.hpp"
#include "streamsvm/simd.hpp"

namespace streamsvm::geometry {
namespace {

// phi(lambda) = S0 + S1 lambda - max(sqrt(a + b lambda + c lambda^2) - (w0 + dw lambda) r, 0)^2
struct LineObjective {
  double s1, a, b, c, w0, dw, r;

  double slope(double lambda) const {
    const double p2 = std::max(a + lambda * (b + c * lambda), 0.0);
    const double p = std::sqrt(p2);
    const double excess = p - (w0 + dw * lambda) * r;
    if (excess <= 0.0) return s1;
    const double dp = p > 0.0 ? (b + 2.0 * c * lambda) / (2.0 * p) : 0.0;
    return s1 - 2.0 * excess * (dp - dw * r);
  }

  // Maximizer of the concave phi on [0, hi], by bisection on its slope.
  double argmax(double hi) const {
    if (slope(0.0) <= 0.0) return 0.0;
    if (slope(hi) >= 0.0) return hi;
    double lo = 0.0;
    for (int k = 0; k < 100 && hi - lo > 1e-17; ++k) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

}  // namespace

GramMergeResult enclose_ball_and_points_gram(std::span<const double> gram, std::size_t count,
                                             double radius, const MebSolverConfig& cfg) {
  cfg.validate();
  if (gram.size() != count * count) {
    throw std::invalid_argument("enclose_ball_and_points_gram: gram size mismatch");
  }
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("enclose_ball_and_points_gram: invalid radius");
  }
  GramMergeResult out;
  out.coefficients.assign(count, 0.0);
  out.radius = radius;
  out.lower_bound = radius;
  out.converged = true;
  if (count == 0) return out;

  auto diag = [&](std::size_t i) { return gram[i * count + i]; };
  auto column = [&](std::size_t i) { return gram.subspan(i * count, count); };

  std::size_t far0 = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (diag(i) > diag(far0)) far0 = i;
  }
  if (std::sqrt(std::max(diag(far0), 0.0)) <= radius) return out;
  out.converged = false;

  const double tol = cfg.merge_tolerance;
  const double r = radius;
  const double r2 = r * r;
  // Vertex `count` is the ball vertex with weight w.
  std::vector<double> u(count, 0.0);
  u[far0] = 1.0;
  double w = 0.0;
  std::vector<double> g(count), dir_g(count), du(count);

  for (std::size_t iter = 0;; ++iter) {
    for (std::size_t i = 0; i < count; ++i) g[i] = simd::dot(column(i), u);
    const double pp = std::max(simd::dot(u, g), 0.0);
    const double pn = std::sqrt(pp);
    const double excess = std::max(pn - w * r, 0.0);
    const double shrink = pn > 0.0 ? excess / pn : 0.0;
    const double center2 = excess * excess;

    double diag_mass = 0.0;
    for (std::size_t i = 0; i < count; ++i) diag_mass += u[i] * diag(i);
    const double h = diag_mass + w * r2 - center2;

    // Gradient coordinate = squared distance to the vertex minus |center|^2.
    auto point_d2 = [&](std::size_t i) { return std::max(diag(i) - 2.0 * shrink * g[i] + center2, 0.0); };
    const double ball_d2 = (excess + r) * (excess + r);

    std::size_t fw = count;
    double fw_d2 = ball_d2;
    std::size_t away = count;
    double away_d2 = w > 0.0 ? ball_d2 : std::numeric_limits<double>::infinity();
    double mean_d2 = w * ball_d2;
    for (std::size_t i = 0; i < count; ++i) {
      const double d2 = point_d2(i);
      if (d2 > fw_d2) {
        fw_d2 = d2;
        fw = i;
      }
      if (u[i] > 0.0 && d2 < away_d2) {
        away_d2 = d2;
        away = i;
      }
      mean_d2 += u[i] * d2;
    }

    const double upper = std::sqrt(fw_d2);
    const double lower = std::sqrt(std::max(h, 0.0));
    for (std::size_t i = 0; i < count; ++i) out.coefficients[i] = shrink * u[i];
    out.radius = upper;
    out.lower_bound = lower;
    out.iterations = iter;
    if (upper <= (1.0 + tol) * lower) {
      out.converged = true;
      return out;
    }
    if (iter >= cfg.max_iterations) return out;

    const double away_weight = away == count ? w : u[away];
    const bool forward = (fw_d2 - mean_d2) >= (mean_d2 - away_d2) || away_weight >= 1.0;

    // Direction in weight space: forward e_fw - z, away z - e_away.
    double dw = 0.0;
    double hi = 1.0;
    if (forward) {
      for (std::size_t i = 0; i < count; ++i) du[i] = -u[i];
      dw = -w;
      if (fw == count) {
        dw += 1.0;
      } else {
        du[fw] += 1.0;
      }
    } else {
      du = u;
      dw = w;
      if (away == count) {
        dw -= 1.0;
      } else {
        du[away] -= 1.0;
      }
      hi = away_weight / (1.0 - away_weight);
    }
    for (std::size_t i = 0; i < count; ++i) dir_g[i] = simd::dot(column(i), du);
    double s1 = dw * r2;
    for (std::size_t i = 0; i < count; ++i) s1 += du[i] * diag(i);
    const LineObjective line{s1, pp, 2.0 * simd::dot(du, g), simd::dot(du, dir_g), w, dw, r};
    const double lambda = line.argmax(hi);
    if (lambda <= 0.0) {
      // No progress possible along the chosen direction at double precision.
      out.converged = upper <= (1.0 + tol) * lower;
      return out;
    }

    simd::axpy(lambda, du, u);
    w += lambda * dw;
    if (!forward && lambda >= hi) {
      if (away == count) {
        w = 0.0;
      } else {
        u[away] = 0.0;
      }
    }
    for (auto& x : u) x = std::max(x, 0.0);
    w = std::max(w, 0.0);
    const double total = std::accumulate(u.begin(), u.end(), w);
    simd::scale(u, 1.0 / total);
    w /= total;
  }
}

MergeResult enclose_ball_and_points_detailed(const Ball& ball, std::span<const Point> points,
                                             const MebSolverConfig& cfg) {
  cfg.validate();
  const std::size_t dim = ball.center.size();
  const std::size_t count = points.size();
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("enclose_ball_and_points: dimension mismatch");
  }

  MergeResult out;
  out.ball = ball;
  out.weights.assign(count + 1, 0.0);
  out.weights[0] = 1.0;
  out.lower_bound = ball.radius;
  if (count == 0) return out;

  std::vector<Point> q(points.begin(), points.end());
  for (auto& v : q) simd::axpy(-1.0, ball.center, v);
  std::vector<double> gram(count * count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i; j < count; ++j) {
      gram[i * count + j] = gram[j * count + i] = simd::dot(q[i], q[j]);
    }
  }

  const GramMergeResult solved = enclose_ball_and_points_gram(gram, count, ball.radius, cfg);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    simd::axpy(solved.coefficients[i], q[i], out.ball.center);
    out.weights[i + 1] = solved.coefficients[i];
    total += solved.coefficients[i];
  }
  out.weights[0] = 1.0 - total;
  out.iterations = solved.iterations;
  out.lower_bound = solved.lower_bound;

  // Recompute the radius from explicit coordinates.
  double r = std::sqrt(simd::squared_distance(out.ball.center, ball.center)) + ball.radius;
  for (const auto& p : points) r = std::max(r, std::sqrt(simd::squared_distance(out.ball.center, p)));
  out.ball.radius = r;

  if (!solved.converged) {
    throw MergeSolverError("enclose_ball_and_points: no convergence to tolerance " +
                               std::to_string(cfg.merge_tolerance) + " within " +
                               std::to_string(cfg.max_iterations) + " iterations",
                           std::move(out));
  }
  return out;
}

}  // namespace streamsvm::geometry
