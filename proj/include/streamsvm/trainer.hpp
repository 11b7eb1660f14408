#pragma once

// Single-pass trainers. Each consumes an ExampleStream exactly once, in the
// order given; shuffling is the caller's job (see data::permute_stream).

#include <cstdint>
#include <vector>

#include "streamsvm/data.hpp"
#include "streamsvm/error.hpp"
#include "streamsvm/geometry.hpp"
#include "streamsvm/model.hpp"

namespace streamsvm::trainer {

struct TrainConfig {
  double C = 1.0;
  std::size_t L = 1;  // lookahead buffer size
  double update_tol = geometry::kDefaultUpdateTolerance;
  geometry::MebSolverConfig merge;
  model::XiConvention xi_convention = model::XiConvention::corrected;
  std::uint64_t seed = 0;  // stream shuffling only; the trainers never read it
  bool record_trace = false;

  void validate() const;
};

struct TraceRecord {
  std::size_t index = 0;  // 0-based stream position of the triggering example
  double d = 0.0;         // distance that triggered it (0 for a flush)
  double R_before = 0.0;
  double R_after = 0.0;
  bool flush = false;     // lookahead buffer merge
  std::size_t buffered = 0;
};

struct TrainTrace {
  std::vector<TraceRecord> records;  // only filled when record_trace is set
  std::size_t examples = 0;          // stream length
  std::size_t updates = 0;           // center moves (single steps or flushes)
};

template <class Model>
struct TrainResult {
  Model model;
  TrainTrace trace;
};

// Raised when a lookahead flush cannot certify the merge tolerance.
class MergeFailure : public Error {
 public:
  MergeFailure(const std::string& what, std::size_t position) : Error(what), position_(position) {}
  // Stream position of the last example in the failing buffer.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Closed-form streaming update, one example at a time. With s = (1 - R/d)/2
// taken from the radius before the step:
//   w  <- w + s (y x - w)
//   s2 <- s2 (1-s)^2 + s^2 / C      (paper_literal: + s^2)
//   R  <- R + (d - R) / 2,  M <- M + 1
// whenever d > R (1 + update_tol).
TrainResult<model::LinearModel> train_stream_l1(data::ExampleStream& stream, const TrainConfig& cfg);

// Examples that fall outside the ball are buffered; every L of them (and the
// remainder at the end) are merged with the current ball by one
// enclose_ball_and_points solve in a (D + 1 + L)-dimensional working space.
// M counts every buffered example, so it is an upper bound on the number of
// support vectors. Only the corrected s2 convention is supported.
TrainResult<model::LinearModel> train_stream_lookahead(data::ExampleStream& stream,
                                                       const TrainConfig& cfg);

// Kernelized closed-form update. Existing coefficients shrink by (1 - s) and
// the new example enters with coefficient s y. Lookahead (L > 1) is rejected.
TrainResult<model::KernelModel> train_stream_kernel(data::ExampleStream& stream, const TrainConfig& cfg,
                                                    const model::KernelSpec& kernel);

inline constexpr std::size_t kExplicitReferenceMaxExamples = 4096;

// Test oracle: materializes every augmented point [y x ; C^{-1/2} e_n] in
// R^{D+N} and folds geometry::stream_update over them. Refuses N beyond
// kExplicitReferenceMaxExamples.
model::LinearModel train_explicit_reference(data::ExampleStream& stream, const TrainConfig& cfg);

// Dataset conveniences (the dataset is streamed in its stored order).
TrainResult<model::LinearModel> train_stream_l1(const data::Dataset& ds, const TrainConfig& cfg);
TrainResult<model::LinearModel> train_stream_lookahead(const data::Dataset& ds, const TrainConfig& cfg);
TrainResult<model::KernelModel> train_stream_kernel(const data::Dataset& ds, const TrainConfig& cfg,
                                                    const model::KernelSpec& kernel);
model::LinearModel train_explicit_reference(const data::Dataset& ds, const TrainConfig& cfg);

}  // namespace streamsvm::trainer
