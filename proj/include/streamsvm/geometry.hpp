#pragma once

// Explicit-space minimum enclosing ball (MEB) primitives.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "streamsvm/error.hpp"

namespace streamsvm::geometry {

using Point = std::vector<double>;

struct Ball {
  Point center;
  double radius = 0.0;
};

// Default strictness margin for the "point lies outside the ball" test.
inline constexpr double kDefaultUpdateTolerance = 1e-12;

struct MebSolverConfig {
  double merge_tolerance = 1e-8;   // relative optimality gap of enclose_ball_and_points
  std::size_t max_iterations = 200000;
  double epsilon_coreset = 1e-3;  // epsilon of the (1+epsilon) core-set oracle

  // Throws std::invalid_argument if a field is out of range.
  void validate() const;
};

struct StreamUpdate {
  Ball ball;
  bool updated = false;
};

// Closed-form one-point update. If p lies strictly outside radius*(1+tol), the
// returned ball has radius r + delta and its center moves delta toward p, with
// 2*delta = |p - c| - r. The new ball is the smallest ball containing the old
// ball and p.
//
// A point exactly on the sphere is NOT an update: there the step is zero and
// counting it would inflate the core-vector count.
StreamUpdate stream_update(const Ball& ball, std::span<const double> p,
                           double tol = kDefaultUpdateTolerance);

// Folds stream_update over points, starting from a zero-radius ball at the
// first point.
Ball fold_stream(std::span<const Point> points, double tol = kDefaultUpdateTolerance);

struct MergeResult {
  Ball ball;
  // Affine coefficients of the new center: center = weights[0] * old_center +
  // sum_i weights[i + 1] * points[i]; the weights sum to one.
  std::vector<double> weights;
  // Certified lower bound on the optimal radius; ball.radius <= (1+tol) * lower_bound.
  double lower_bound = 0.0;
  std::size_t iterations = 0;
};

// Thrown when the merge solver cannot certify merge_tolerance in time. best()
// is the last iterate; it encloses every input but may be suboptimal.
class MergeSolverError : public Error {
 public:
  MergeSolverError(const std::string& what, MergeResult best)
      : Error(what), best_(std::move(best)) {}
  const MergeResult& best() const noexcept { return best_; }

 private:
  MergeResult best_;
};

// Smallest ball enclosing both `ball` and every point (up to merge_tolerance).
//
// Frank-Wolfe with away steps on the MEB dual, restricted to the affine hull
// of {ball.center, points}. The ball is treated as its boundary sphere: the
// farthest ball point from a candidate center c' is the antipode of the
// direction c -> c'. Iteration stops once the primal radius is within
// (1+merge_tolerance) of the dual lower bound.
MergeResult enclose_ball_and_points_detailed(const Ball& ball, std::span<const Point> points,
                                             const MebSolverConfig& cfg);

Ball enclose_ball_and_points(const Ball& ball, std::span<const Point> points,
                             const MebSolverConfig& cfg);

// Same solver on a Gram representation. With q_i = p_i - c, gram is the
// row-major L x L matrix of q_i . q_j. Returns coefficients t (size L) such
// that the new center is c + sum_i t_i q_i, together with the radius.
struct GramMergeResult {
  std::vector<double> coefficients;
  double radius = 0.0;
  double lower_bound = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};
GramMergeResult enclose_ball_and_points_gram(std::span<const double> gram, std::size_t count,
                                             double radius, const MebSolverConfig& cfg);

// Exact MEB by the move-to-front recursion with incremental circumball
// updates. Intended for small dimension; the result encloses every point.
Ball exact_meb(std::span<const Point> points);

struct CoreSetResult {
  Ball ball;
  std::vector<std::size_t> core_indices;  // distinct farthest points, in order of first touch
  std::size_t iterations = 0;
  double lower_bound = 0.0;  // dual certificate: lower_bound <= optimal radius
};

// (1+epsilon)-approximate MEB by the iterative core-set scheme: start at the
// first point, then repeatedly step 1/(t+1) toward the farthest point.
CoreSetResult meb_core_set(std::span<const Point> points, double epsilon);

enum class SingletonPosition { first, last, random };

// Hard instance for the streaming rule: (n-1)/2 points jittered around (0,1),
// (n-1)/2 around (0,-1) and one point at (1+sqrt(2), 0). Jitter norm <= 1e-6.
std::vector<Point> adversarial_stream(int n, std::uint64_t seed, SingletonPosition position);

inline constexpr double kAdversarialJitter = 1e-6;

}  // namespace streamsvm::geometry
