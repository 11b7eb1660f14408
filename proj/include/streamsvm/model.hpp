#pragma once

// SVM models as implicit balls in the augmented feature space
//
//   phi~(x_n, y_n) = [ y_n phi(x_n) ; C^{-1/2} e_n ],
//
// where e_n is a fresh unit axis per example. A center is stored by its
// feature part (w, or signed kernel coefficients) plus the squared norm s2 of
// its slack part. Because a streamed example's slack axis is unseen, the
// distance from the center to phi~(x, y) is sqrt(|w - y x|^2 + s2 + 1/C).
//
// s2 convention. The default ("corrected") stores s2 = |slack part|^2, which
// is 1/C after the first example and evolves as s2 <- s2 (1-s)^2 + s^2 / C.
// The "paper-literal" convention uses the uncorrected recurrence instead:
// the slot starts at 1 and evolves as s2 <- s2 (1-s)^2 + s^2. In that mode s2
// holds C times the true slack mass and distances are not exact.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "streamsvm/data.hpp"

namespace streamsvm::model {

enum class XiConvention { corrected, paper_literal };

struct LinearModel {
  std::vector<double> w;
  double R = 0.0;
  double s2 = 0.0;
  std::int64_t M = 1;
  double C = 1.0;

  std::size_t dim() const { return w.size(); }
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct KernelSpec {
  enum class Kind { linear, rbf, normalized_dot };
  Kind kind = Kind::linear;
  double gamma = 1.0;  // rbf only

  static KernelSpec linear() { return {Kind::linear, 1.0}; }
  static KernelSpec rbf(double gamma) { return {Kind::rbf, gamma}; }
  static KernelSpec normalized_dot() { return {Kind::normalized_dot, 1.0}; }

  // K(x, x) when it is the same for every x (1 for rbf and normalized_dot).
  bool constant_diagonal() const { return kind != Kind::linear; }
  double kappa() const { return 1.0; }

  double operator()(const data::SparseVector& a, const data::SparseVector& b) const;

  // "linear", "rbf:<gamma>" or "normalized_dot".
  std::string to_string() const;
  static KernelSpec parse(std::string_view text);

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct SupportVector {
  data::SparseVector x;
  double alpha = 0.0;  // carries the label sign
  friend bool operator==(const SupportVector&, const SupportVector&) = default;
};

struct KernelModel {
  std::vector<SupportVector> support;
  double R = 0.0;
  double s2 = 0.0;
  std::int64_t M = 1;
  double C = 1.0;
  KernelSpec kernel;
  // |sum_m alpha_m phi(x_m)|^2, maintained incrementally by the trainer.
  double center_norm2 = 0.0;

  friend bool operator==(const KernelModel&, const KernelModel&) = default;

  // Evaluates center_norm2 from scratch, O(M^2).
  double recompute_center_norm2() const;
  // sum_m alpha_m k(x_m, x)
  double score(const data::SparseVector& x) const;
};

struct Prediction {
  double score = 0.0;
  int label = 1;
};

inline int sign_label(double score) { return score >= 0.0 ? 1 : -1; }

// Augmented distance from the center to a fresh example (x, y).
double aug_distance_linear(const LinearModel& m, const data::SparseVector& x, int y);
// Same, with y*x already materialized densely over m.dim() coordinates.
double aug_distance_linear_dense(const LinearModel& m, std::span<const double> signed_x);
double aug_distance_kernel(const KernelModel& m, const data::SparseVector& x, int y);
// Kernel distance when sum_m alpha_m k(x_m, x) is already known.
double aug_distance_kernel(const KernelModel& m, const data::SparseVector& x, int y,
                           double center_dot_x);

Prediction predict(const LinearModel& m, const data::SparseVector& x);
Prediction predict(const KernelModel& m, const data::SparseVector& x);
Prediction predict(std::span<const double> w, const data::SparseVector& x);

// w = sum_m alpha_m x_m; only meaningful for the linear kernel.
std::vector<double> expand_linear(const KernelModel& m, std::size_t dim);

// --- model files (text, "streamsvm-model v1") ------------------------------

using AnyModel = std::variant<LinearModel, KernelModel>;

std::string serialize_model(const LinearModel& m);
std::string serialize_model(const KernelModel& m);
std::string serialize_model(const AnyModel& m);
// Throws ParseError (with line number) on a version mismatch, malformed or
// non-finite fields and invariant violations.
AnyModel deserialize_model(std::string_view text);

void save_model(const std::string& path, const AnyModel& m);
AnyModel load_model(const std::string& path);

}  // namespace streamsvm::model
