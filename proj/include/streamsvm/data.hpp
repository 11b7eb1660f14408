#pragma once

// Examples, datasets, svmlight text I/O, synthetic generators and the
// streaming adapters the trainers consume.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace streamsvm::data {

struct Feature {
  std::uint32_t index = 0;  // 1-based, svmlight convention
  double value = 0.0;
  friend bool operator==(const Feature&, const Feature&) = default;
};

// Sorted by strictly increasing index.
using SparseVector = std::vector<Feature>;

struct Example {
  SparseVector features;
  int label = 1;  // -1 or +1
  friend bool operator==(const Example&, const Example&) = default;
};

struct Dataset {
  std::vector<Example> examples;
  std::size_t dim = 0;  // largest feature index in use (or declared)
  friend bool operator==(const Dataset&, const Dataset&) = default;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

// --- sparse helpers -------------------------------------------------------

double dot(const SparseVector& a, const SparseVector& b);
double dot(const SparseVector& a, std::span<const double> dense);
double squared_norm(const SparseVector& a);
double squared_distance(const SparseVector& a, const SparseVector& b);
// dense[index-1] += alpha * value; dense must cover every index.
void add_scaled(std::span<double> dense, const SparseVector& x, double alpha);
// Largest index, 0 when empty.
std::size_t max_index(const SparseVector& x);

// --- svmlight text --------------------------------------------------------

struct ParseOptions {
  bool zero_one_labels = false;  // map label 0 -> -1 and 1 -> +1
  bool unit_norm = false;        // rescale every nonzero feature vector to norm 1
};

// One example per line: `<label> <idx>:<val> ...`. `#` starts a comment and
// blank lines are skipped. Labels must be +1, 1 or -1 (0/1 with
// zero_one_labels). Throws ParseError with the 1-based line number.
Dataset parse_svmlight(std::istream& in, const ParseOptions& opts = {});
Dataset parse_svmlight(std::string_view text, const ParseOptions& opts = {});
Dataset read_svmlight_file(const std::string& path, const ParseOptions& opts = {});

// Reals are written with 17 significant digits, so parsing the output
// reproduces the dataset exactly. `header`, when non-empty, is written as a
// leading comment line.
std::string write_svmlight(const Dataset& ds, std::string_view header = {});
void write_svmlight(std::ostream& out, const Dataset& ds, std::string_view header = {});
void write_svmlight_file(const std::string& path, const Dataset& ds, std::string_view header = {});

void normalize_unit(Dataset& ds);

// --- synthetic data -------------------------------------------------------

struct SynthSpec {
  std::size_t n_train = 1000;
  std::size_t n_test = 200;
  std::size_t dim = 2;
  double separability_target = 0.85;  // Bayes accuracy, in (0.5, 1]
  std::uint64_t seed = 0;

  void validate() const;
};

// Distance between the two cluster means for which the Bayes-optimal
// separating hyperplane has accuracy `target` (unit covariance, equal priors):
// Phi(distance / 2) = target, solved by bisection.
double calibrated_mean_distance(double target);

// Two unit-covariance Gaussian clusters at +-(distance/2) u for a seeded unit
// direction u; label +1 for the cluster at +u. The separating hyperplane
// passes through the origin. Each split is exactly class balanced (the odd
// example, if any, goes to +1).
std::pair<Dataset, Dataset> gen_gaussian_clusters(const SynthSpec& spec);

// Header comment for generated files.
std::string synth_header(const SynthSpec& spec);

// --- ordering -------------------------------------------------------------

// Fisher-Yates permutation of 0..n-1 from Rng(seed) (see rng.hpp).
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);
Dataset permute_stream(const Dataset& ds, std::uint64_t seed);

// --- streams --------------------------------------------------------------

// Forward-only source of examples. Trainers pull each example once.
class ExampleStream {
 public:
  virtual ~ExampleStream() = default;
  // Next example, or nullptr at the end. The pointer stays valid until the
  // next call.
  virtual const Example* next() = 0;
  // Feature dimension if known in advance, else 0.
  virtual std::size_t dim_hint() const { return 0; }
};

class DatasetStream final : public ExampleStream {
 public:
  explicit DatasetStream(const Dataset& ds) : examples_(ds.examples), dim_(ds.dim) {}
  DatasetStream(std::span<const Example> examples, std::size_t dim) : examples_(examples), dim_(dim) {}

  const Example* next() override {
    return pos_ < examples_.size() ? &examples_[pos_++] : nullptr;
  }
  std::size_t dim_hint() const override { return dim_; }

 private:
  std::span<const Example> examples_;
  std::size_t dim_ = 0;
  std::size_t pos_ = 0;
};

// Counts the examples handed out by the wrapped stream. Each example is
// copied into a single slot that the following call overwrites, so a consumer
// that keeps pointers to earlier examples (instead of copying what it needs)
// observes different data than with the plain stream.
class CountingStream final : public ExampleStream {
 public:
  explicit CountingStream(ExampleStream& inner) : inner_(inner) {}

  const Example* next() override {
    const Example* e = inner_.next();
    if (e == nullptr) {
      ++end_reads_;
      slot_.features.assign(slot_.features.size(), Feature{0, 0.0});
      return nullptr;
    }
    ++delivered_;
    slot_ = *e;
    return &slot_;
  }
  std::size_t dim_hint() const override { return inner_.dim_hint(); }

  std::size_t delivered() const { return delivered_; }
  std::size_t end_reads() const { return end_reads_; }

 private:
  ExampleStream& inner_;
  Example slot_;
  std::size_t delivered_ = 0;
  std::size_t end_reads_ = 0;
};

}  // namespace streamsvm::data
