// Exact minimum enclosing ball: move-to-front recursion over a point list with
// an incrementally maintained circumball of the current support set.

#include <algorithm>
#include <cmath>
#include <list>
#include <stdexcept>

#include "streamsvm/geometry.hpp"
#include "streamsvm/simd.hpp"

namespace streamsvm::geometry {
namespace {

// Smallest ball with all support points on its boundary. Support points are
// pushed one at a time; the centers c_k, squared radii and the orthogonalized
// directions v_k are kept per level so pop() is free.
class SupportBall {
 public:
  explicit SupportBall(std::size_t dim)
      : dim_(dim),
        centers_(dim + 2, Point(dim, 0.0)),
        sqr_radii_(dim + 2, -1.0),
        v_(dim + 2, Point(dim, 0.0)),
        z_(dim + 2, 0.0),
        a_(dim + 2, std::vector<double>(dim + 2, 0.0)),
        q0_(dim, 0.0),
        current_center_(dim, 0.0) {}

  std::size_t size() const { return m_; }
  std::size_t dim() const { return dim_; }
  // The most recently computed ball; pop() does not roll it back.
  const Point& center() const { return current_center_; }
  double sqr_radius() const { return current_sqr_radius_; }

  double excess(const Point& p) const {
    if (current_sqr_radius_ < 0.0) return 1.0;
    return simd::squared_distance(p, current_center_) - current_sqr_radius_;
  }

  // Returns false when p is (numerically) affinely dependent on the support.
  bool push(const Point& p) {
    if (m_ == 0) {
      q0_ = p;
      centers_[0] = p;
      sqr_radii_[0] = 0.0;
    } else {
      Point& v = v_[m_];
      for (std::size_t i = 0; i < dim_; ++i) v[i] = p[i] - q0_[i];
      for (std::size_t i = 1; i < m_; ++i) {
        a_[m_][i] = 2.0 * simd::dot(v_[i], v) / z_[i];
      }
      for (std::size_t i = 1; i < m_; ++i) simd::axpy(-a_[m_][i], v_[i], v);
      z_[m_] = 2.0 * simd::squared_norm(v);
      if (!(z_[m_] > kRelativeEps * std::max(current_sqr_radius_, 0.0))) return false;

      const double e = simd::squared_distance(p, centers_[m_ - 1]) - sqr_radii_[m_ - 1];
      const double f = e / z_[m_];
      centers_[m_] = centers_[m_ - 1];
      simd::axpy(f, v, centers_[m_]);
      sqr_radii_[m_] = sqr_radii_[m_ - 1] + e * f / 2.0;
    }
    current_center_ = centers_[m_];
    current_sqr_radius_ = sqr_radii_[m_];
    ++m_;
    return true;
  }

  void pop() { --m_; }

 private:
  static constexpr double kRelativeEps = 1e-14;

  std::size_t dim_;
  std::size_t m_ = 0;
  std::vector<Point> centers_;
  std::vector<double> sqr_radii_;
  std::vector<Point> v_;
  std::vector<double> z_;
  std::vector<std::vector<double>> a_;
  Point q0_;
  Point current_center_;
  double current_sqr_radius_ = -1.0;
};

using PointList = std::list<const Point*>;

void move_to_front(PointList& list, SupportBall& ball, PointList::iterator end) {
  if (ball.size() == ball.dim() + 1) return;
  for (auto it = list.begin(); it != end;) {
    auto j = it++;
    if (ball.excess(**j) > 0.0 && ball.push(**j)) {
      move_to_front(list, ball, j);
      ball.pop();
      list.splice(list.begin(), list, j);
    }
  }
}

}  // namespace

Ball exact_meb(std::span<const Point> points) {
  if (points.empty()) throw std::invalid_argument("exact_meb: empty point list");
  const std::size_t dim = points.front().size();
  PointList list;
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("exact_meb: dimension mismatch");
    list.push_back(&p);
  }

  SupportBall support(dim);
  move_to_front(list, support, list.end());

  // Radius is widened to the farthest point so rounding never leaves a point outside.
  Ball out;
  out.center = support.center();
  out.radius = std::sqrt(std::max(support.sqr_radius(), 0.0));
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, simd::squared_distance(p, out.center));
  out.radius = std::max(out.radius, std::sqrt(worst));
  return out;
}

}  // namespace streamsvm::geometry
