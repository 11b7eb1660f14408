#include "streamsvm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "streamsvm/error.hpp"
#include "streamsvm/number_text.hpp"
#include "streamsvm/rng.hpp"

namespace streamsvm::data {

// --- sparse helpers -------------------------------------------------------

double dot(const SparseVector& a, const SparseVector& b) {
  double acc = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->index < j->index) {
      ++i;
    } else if (j->index < i->index) {
      ++j;
    } else {
      acc += i->value * j->value;
      ++i;
      ++j;
    }
  }
  return acc;
}

double dot(const SparseVector& a, std::span<const double> dense) {
  double acc = 0.0;
  for (const auto& f : a) {
    if (f.index <= dense.size()) acc += f.value * dense[f.index - 1];
  }
  return acc;
}

double squared_norm(const SparseVector& a) {
  double acc = 0.0;
  for (const auto& f : a) acc += f.value * f.value;
  return acc;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double acc = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    double d;
    if (j == b.end() || (i != a.end() && i->index < j->index)) {
      d = i->value;
      ++i;
    } else if (i == a.end() || j->index < i->index) {
      d = j->value;
      ++j;
    } else {
      d = i->value - j->value;
      ++i;
      ++j;
    }
    acc += d * d;
  }
  return acc;
}

void add_scaled(std::span<double> dense, const SparseVector& x, double alpha) {
  for (const auto& f : x) dense[f.index - 1] += alpha * f.value;
}

std::size_t max_index(const SparseVector& x) { return x.empty() ? 0 : x.back().index; }

// --- svmlight text --------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

int parse_label(std::string_view tok, const ParseOptions& opts, std::size_t line) {
  if (tok == "+1" || tok == "1") return 1;
  if (tok == "-1") return -1;
  if (opts.zero_one_labels && tok == "0") return -1;
  throw ParseError(line, "invalid label '" + std::string(tok) + "'");
}

double parse_value(std::string_view tok, std::size_t line) {
  const auto v = parse_real(tok);
  if (!v) throw ParseError(line, "invalid feature value '" + std::string(tok) + "'");
  return *v;
}

void parse_line(std::string_view text, std::size_t line, const ParseOptions& opts, Dataset& ds) {
  if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
  text = trim(text);
  if (text.empty()) return;

  Example ex;
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t') ++pos;
    return text.substr(start, pos - start);
  };

  ex.label = parse_label(next_token(), opts, line);
  for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line, "malformed feature '" + std::string(tok) + "'");
    }
    const std::string_view idx_tok = tok.substr(0, colon);
    std::uint32_t idx = 0;
    const auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
    if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx == 0) {
      throw ParseError(line, "invalid feature index '" + std::string(idx_tok) + "'");
    }
    if (!ex.features.empty() && idx <= ex.features.back().index) {
      throw ParseError(line, "feature indices must be strictly increasing");
    }
    ex.features.push_back({idx, parse_value(tok.substr(colon + 1), line)});
  }
  ds.dim = std::max(ds.dim, max_index(ex.features));
  ds.examples.push_back(std::move(ex));
}

}  // namespace

Dataset parse_svmlight(std::istream& in, const ParseOptions& opts) {
  Dataset ds;
  std::string buf;
  std::size_t line = 0;
  while (std::getline(in, buf)) parse_line(buf, ++line, opts, ds);
  if (opts.unit_norm) normalize_unit(ds);
  return ds;
}

Dataset parse_svmlight(std::string_view text, const ParseOptions& opts) {
  Dataset ds;
  std::size_t line = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    parse_line(text.substr(0, nl), ++line, opts, ds);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (opts.unit_norm) normalize_unit(ds);
  return ds;
}

Dataset read_svmlight_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_svmlight(in, opts);
}

std::string write_svmlight(const Dataset& ds, std::string_view header) {
  std::string out;
  if (!header.empty()) {
    out += "# ";
    out += header;
    out += '\n';
  }
  for (const auto& ex : ds.examples) {
    out += ex.label > 0 ? "+1" : "-1";
    for (const auto& f : ex.features) {
      out += ' ';
      out += std::to_string(f.index);
      out += ':';
      out += format_real(f.value);
    }
    out += '\n';
  }
  return out;
}

void write_svmlight(std::ostream& out, const Dataset& ds, std::string_view header) {
  out << write_svmlight(ds, header);
}

void write_svmlight_file(const std::string& path, const Dataset& ds, std::string_view header) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_svmlight(out, ds, header);
  if (!out) throw Error("write failed for '" + path + "'");
}

void normalize_unit(Dataset& ds) {
  for (auto& ex : ds.examples) {
    const double n = std::sqrt(squared_norm(ex.features));
    if (n > 0.0) {
      for (auto& f : ex.features) f.value /= n;
    }
  }
}

// --- synthetic data -------------------------------------------------------

void SynthSpec::validate() const {
  if (n_train < 1 || n_test < 1) throw std::invalid_argument("n_train and n_test must be >= 1");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (!(separability_target > 0.5 && separability_target <= 1.0)) {
    throw std::invalid_argument("separability target must lie in (0.5, 1]");
  }
}

double calibrated_mean_distance(double target) {
  if (!(target > 0.5 && target <= 1.0)) {
    throw std::invalid_argument("separability target must lie in (0.5, 1]");
  }
  auto bayes_accuracy = [](double distance) { return 0.5 * std::erfc(-distance / 2.0 / std::sqrt(2.0)); };
  double lo = 0.0;
  double hi = 40.0;  // Phi(20) rounds to 1 in double precision
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bayes_accuracy(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

std::pair<Dataset, Dataset> gen_gaussian_clusters(const SynthSpec& spec) {
  spec.validate();
  const double half = calibrated_mean_distance(spec.separability_target) / 2.0;
  Rng rng(spec.seed);

  std::vector<double> direction(spec.dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& d : direction) {
      d = rng.normal();
      norm2 += d * d;
    }
  } while (norm2 == 0.0);
  for (auto& d : direction) d /= std::sqrt(norm2);

  auto make = [&](std::size_t n) {
    std::vector<int> labels(n, -1);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>((n + 1) / 2), 1);
    rng.shuffle(std::span<int>(labels));
    Dataset ds;
    ds.dim = spec.dim;
    ds.examples.reserve(n);
    for (int y : labels) {
      Example ex;
      ex.label = y;
      ex.features.reserve(spec.dim);
      for (std::size_t k = 0; k < spec.dim; ++k) {
        ex.features.push_back({static_cast<std::uint32_t>(k + 1), y * half * direction[k] + rng.normal()});
      }
      ds.examples.push_back(std::move(ex));
    }
    return ds;
  };
  Dataset train = make(spec.n_train);
  Dataset test = make(spec.n_test);
  return {std::move(train), std::move(test)};
}

std::string synth_header(const SynthSpec& spec) {
  return "streamsvm-synth v1 seed=" + std::to_string(spec.seed) +
         " sep=" + format_real(spec.separability_target);
}

// --- ordering -------------------------------------------------------------

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

Dataset permute_stream(const Dataset& ds, std::uint64_t seed) {
  Dataset out;
  out.dim = ds.dim;
  out.examples.reserve(ds.size());
  for (std::size_t i : permutation(ds.size(), seed)) out.examples.push_back(ds.examples[i]);
  return out;
}

}  // namespace streamsvm::data
