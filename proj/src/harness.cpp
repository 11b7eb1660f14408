#include "streamsvm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <limits>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "streamsvm/error.hpp"
#include "streamsvm/geometry.hpp"
#include "streamsvm/number_text.hpp"
#include "streamsvm/rng.hpp"

namespace streamsvm::harness {

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::stream:
      return "stream";
    case Algo::lookahead:
      return "lookahead";
    case Algo::kernel:
      return "kernel";
    case Algo::perceptron:
      return "perceptron";
    case Algo::sgd:
      return "sgd";
    case Algo::batch_ref:
      return "batch-ref";
  }
  return {};
}

Algo parse_algo(std::string_view name) {
  for (Algo a : {Algo::stream, Algo::lookahead, Algo::kernel, Algo::perceptron, Algo::sgd, Algo::batch_ref}) {
    if (algo_name(a) == name) return a;
  }
  throw Error("unknown algorithm '" + std::string(name) + "'");
}

// --- evaluation -----------------------------------------------------------

namespace {

void require_nonempty(const data::Dataset& test) {
  if (test.empty()) throw Error("evaluate: empty test set");
}

template <class Predict>
double accuracy_of(const data::Dataset& test, Predict&& predict) {
  std::size_t correct = 0;
  for (const auto& ex : test.examples) correct += predict(ex.features) == ex.label;
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace

double evaluate(std::span<const double> w, const data::Dataset& test) {
  require_nonempty(test);
  for (const auto& ex : test.examples) {
    if (data::max_index(ex.features) > w.size()) {
      throw Error("evaluate: test feature " + std::to_string(data::max_index(ex.features)) +
                  " exceeds model dimension " + std::to_string(w.size()));
    }
  }
  return accuracy_of(test, [&](const data::SparseVector& x) { return model::predict(w, x).label; });
}

double evaluate(const model::LinearModel& m, const data::Dataset& test) { return evaluate(m.w, test); }

double evaluate(const model::KernelModel& m, const data::Dataset& test) {
  require_nonempty(test);
  return accuracy_of(test, [&](const data::SparseVector& x) { return model::predict(m, x).label; });
}

double evaluate(const model::AnyModel& m, const data::Dataset& test) {
  return std::visit([&](const auto& v) { return evaluate(v, test); }, m);
}

// --- parallel runs --------------------------------------------------------

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !stop; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          stop = true;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// --- experiments ----------------------------------------------------------

RunResult run_once(Algo algo, const data::Dataset& train, const data::Dataset& test,
                   const ExperimentConfig& cfg, std::size_t L) {
  // Size linear models to cover the test features too.
  data::DatasetStream stream(train.examples, std::max(train.dim, test.dim));
  RunResult r;
  r.algo = algo_name(algo);
  r.L = L;
  const auto start = std::chrono::steady_clock::now();
  trainer::TrainConfig tc = cfg.train;
  switch (algo) {
    case Algo::stream: {
      tc.L = 1;
      const auto res = trainer::train_stream_l1(stream, tc);
      r.accuracy = evaluate(res.model, test);
      r.M = res.model.M;
      r.R = res.model.R;
      break;
    }
    case Algo::lookahead: {
      tc.L = L;
      const auto res = trainer::train_stream_lookahead(stream, tc);
      r.accuracy = evaluate(res.model, test);
      r.M = res.model.M;
      r.R = res.model.R;
      break;
    }
    case Algo::kernel: {
      tc.L = 1;
      const auto res = trainer::train_stream_kernel(stream, tc, cfg.kernel);
      r.accuracy = evaluate(res.model, test);
      r.M = res.model.M;
      r.R = res.model.R;
      break;
    }
    case Algo::perceptron: {
      const auto res = baselines::train_perceptron(stream);
      r.accuracy = evaluate(res.w, test);
      r.M = static_cast<std::int64_t>(res.mistakes);
      break;
    }
    case Algo::sgd: {
      const auto res = baselines::train_sgd_hinge(stream, cfg.sgd);
      r.accuracy = evaluate(res.w, test);
      r.M = static_cast<std::int64_t>(res.steps);
      break;
    }
    case Algo::batch_ref: {
      data::Dataset sized{train.examples, std::max(train.dim, test.dim)};
      const auto res = baselines::train_batch_l2svm_ref(sized, cfg.train.C, cfg.batch_epsilon);
      r.accuracy = evaluate(res.model, test);
      r.M = res.model.M;
      r.R = res.model.R;
      break;
    }
  }
  if (cfg.timing) {
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

namespace {

struct Job {
  Algo algo;
  std::size_t L;
  std::uint64_t seed;
};

std::vector<RunResult> run_jobs(const std::vector<Job>& jobs, const data::Dataset& train,
                                const data::Dataset& test, const ExperimentConfig& cfg) {
  std::vector<RunResult> out(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const data::Dataset order = data::permute_stream(train, job.seed);
    out[i] = run_once(job.algo, order, test, cfg, job.L);
    out[i].seed = job.seed;
  });
  return out;
}

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

}  // namespace

std::vector<RunResult> run_single_pass_comparison(const data::Dataset& train, const data::Dataset& test,
                                                  const std::vector<Algo>& algos,
                                                  const ExperimentConfig& cfg, std::size_t n_runs) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be at least 1");
  std::vector<Job> jobs;
  for (Algo a : algos) {
    const std::size_t L = a == Algo::lookahead ? cfg.lookahead_L : 1;
    for (std::size_t i = 0; i < n_runs; ++i) jobs.push_back({a, L, cfg.seed_base + i});
  }
  return run_jobs(jobs, train, test, cfg);
}

std::vector<Aggregate> aggregate(const std::vector<RunResult>& runs) {
  std::vector<Aggregate> out;
  std::size_t i = 0;
  while (i < runs.size()) {
    std::size_t j = i;
    std::vector<double> acc;
    double sum_M = 0.0, sum_R = 0.0;
    while (j < runs.size() && runs[j].algo == runs[i].algo && runs[j].L == runs[i].L) {
      acc.push_back(runs[j].accuracy);
      sum_M += static_cast<double>(runs[j].M);
      sum_R += runs[j].R;
      ++j;
    }
    Aggregate a;
    a.algo = runs[i].algo;
    a.L = runs[i].L;
    a.n_runs = acc.size();
    mean_std(acc, a.mean_accuracy, a.std_accuracy);
    a.mean_M = sum_M / static_cast<double>(acc.size());
    a.mean_R = sum_R / static_cast<double>(acc.size());
    out.push_back(a);
    i = j;
  }
  return out;
}

SweepResult run_lookahead_sweep(const data::Dataset& train, const data::Dataset& test,
                                const std::vector<std::size_t>& L_list, std::size_t n_perms,
                                const ExperimentConfig& cfg) {
  if (L_list.empty()) throw std::invalid_argument("L list must not be empty");
  if (n_perms < 1) throw std::invalid_argument("n_perms must be at least 1");
  std::vector<Job> jobs;
  for (std::size_t L : L_list) {
    if (L < 1) throw std::invalid_argument("L must be at least 1");
    for (std::size_t i = 0; i < n_perms; ++i) {
      jobs.push_back({L == 1 ? Algo::stream : Algo::lookahead, L, cfg.seed_base + i});
    }
  }
  SweepResult out;
  out.runs = run_jobs(jobs, train, test, cfg);
  for (std::size_t k = 0; k < L_list.size(); ++k) {
    std::vector<double> acc;
    for (std::size_t i = 0; i < n_perms; ++i) acc.push_back(out.runs[k * n_perms + i].accuracy);
    SweepPoint p;
    p.L = L_list[k];
    p.n_perms = n_perms;
    mean_std(acc, p.mean_accuracy, p.std_accuracy);
    out.points.push_back(p);
  }
  return out;
}

std::string ordering_name(Ordering o) {
  switch (o) {
    case Ordering::singleton_last:
      return "singleton-last";
    case Ordering::singleton_first:
      return "singleton-first";
    case Ordering::random:
      return "random";
  }
  return {};
}

AdversarialReport run_adversarial_bound_check(int n, std::size_t n_orderings, std::uint64_t seed_base,
                                              std::size_t threads) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("n must be odd and at least 3");
  if (n_orderings < 1) throw std::invalid_argument("n_orderings must be at least 1");
  const Ordering orderings[] = {Ordering::singleton_last, Ordering::singleton_first, Ordering::random};
  AdversarialReport out;
  out.runs.resize(3 * n_orderings);
  parallel_for(out.runs.size(), threads, [&](std::size_t k) {
    const Ordering o = orderings[k / n_orderings];
    const std::uint64_t seed = seed_base + k % n_orderings;
    std::vector<geometry::Point> pts = geometry::adversarial_stream(
        n, seed, o == Ordering::singleton_first ? geometry::SingletonPosition::first
                                                : geometry::SingletonPosition::last);
    if (o == Ordering::random) {
      Rng rng(seed);
      rng.shuffle(std::span<geometry::Point>(pts));
    }
    AdversarialRun& r = out.runs[k];
    r.ordering = o;
    r.seed = seed;
    r.radius = geometry::fold_stream(pts).radius;
    r.optimal = geometry::exact_meb(pts).radius;
    r.ratio = r.radius / r.optimal;
  });
  for (std::size_t g = 0; g < 3; ++g) {
    RatioStats s;
    s.ordering = orderings[g];
    s.n = n_orderings;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_orderings; ++i) {
      const double r = out.runs[g * n_orderings + i].ratio;
      s.min = std::min(s.min, r);
      s.max = std::max(s.max, r);
      s.mean += r;
    }
    s.mean /= static_cast<double>(n_orderings);
    out.stats.push_back(s);
  }
  return out;
}

// --- output ---------------------------------------------------------------

std::string runs_csv(const std::vector<RunResult>& runs, bool with_time) {
  std::string out = with_time ? "algo,L,seed,accuracy,M,R,wall_ms\n" : "algo,L,seed,accuracy,M,R\n";
  for (const auto& r : runs) {
    out += r.algo + ',' + std::to_string(r.L) + ',' + std::to_string(r.seed) + ',' + format_real(r.accuracy) +
           ',' + std::to_string(r.M) + ',' + format_real(r.R);
    if (with_time) out += ',' + format_real(r.wall_ms);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(sep);
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

template <class Int>
Int parse_int(std::string_view tok, std::size_t line) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "malformed integer '" + std::string(tok) + "'");
  }
  return v;
}

double parse_field(std::string_view tok, std::size_t line) {
  const auto v = parse_real(tok);
  if (!v) throw ParseError(line, "malformed number '" + std::string(tok) + "'");
  return *v;
}

}  // namespace

std::vector<RunResult> parse_runs_csv(std::string_view text) {
  std::vector<RunResult> out;
  std::size_t line = 0;
  bool with_time = false;
  for (auto row : split(text, '\n')) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (row.empty()) continue;
    if (line == 1) {
      if (row == "algo,L,seed,accuracy,M,R,wall_ms") {
        with_time = true;
      } else if (row != "algo,L,seed,accuracy,M,R") {
        throw ParseError(line, "unexpected header");
      }
      continue;
    }
    const auto f = split(row, ',');
    if (f.size() != (with_time ? 7u : 6u)) throw ParseError(line, "wrong number of fields");
    RunResult r;
    r.algo = std::string(f[0]);
    r.L = parse_int<std::size_t>(f[1], line);
    r.seed = parse_int<std::uint64_t>(f[2], line);
    r.accuracy = parse_field(f[3], line);
    r.M = parse_int<std::int64_t>(f[4], line);
    r.R = parse_field(f[5], line);
    if (with_time) r.wall_ms = parse_field(f[6], line);
    out.push_back(r);
  }
  return out;
}

std::string aggregates_csv(const std::vector<Aggregate>& rows) {
  std::string out = "algo,L,n_runs,mean_accuracy,std_accuracy,mean_M,mean_R\n";
  for (const auto& a : rows) {
    out += a.algo + ',' + std::to_string(a.L) + ',' + std::to_string(a.n_runs) + ',' +
           format_real(a.mean_accuracy) + ',' + format_real(a.std_accuracy) + ',' + format_real(a.mean_M) + ',' +
           format_real(a.mean_R) + '\n';
  }
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "L,n_perms,mean_accuracy,std_accuracy\n";
  for (const auto& p : sweep.points) {
    out += std::to_string(p.L) + ',' + std::to_string(p.n_perms) + ',' + format_real(p.mean_accuracy) + ',' +
           format_real(p.std_accuracy) + '\n';
  }
  return out;
}

std::string adversarial_csv(const AdversarialReport& report) {
  std::string out = "ordering,seed,radius,optimal_radius,ratio\n";
  for (const auto& r : report.runs) {
    out += ordering_name(r.ordering) + ',' + std::to_string(r.seed) + ',' + format_real(r.radius) + ',' +
           format_real(r.optimal) + ',' + format_real(r.ratio) + '\n';
  }
  return out;
}

std::string adversarial_summary_json(const AdversarialReport& report) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& s : report.stats) {
    j[ordering_name(s.ordering)] = {{"n", s.n}, {"min_ratio", s.min}, {"max_ratio", s.max}, {"mean_ratio", s.mean}};
  }
  return j.dump();
}

std::vector<int> read_predictions(std::string_view text) {
  std::vector<int> out;
  std::size_t line = 0;
  for (auto row : split(text, '\n')) {
    ++line;
    if (const auto hash = row.find('#'); hash != std::string_view::npos) row = row.substr(0, hash);
    while (!row.empty() && std::isspace(static_cast<unsigned char>(row.back()))) row.remove_suffix(1);
    while (!row.empty() && std::isspace(static_cast<unsigned char>(row.front()))) row.remove_prefix(1);
    if (row.empty()) continue;
    if (row == "+1" || row == "1") {
      out.push_back(1);
    } else if (row == "-1" || row == "0") {
      out.push_back(-1);
    } else {
      throw ParseError(line, "invalid predicted label '" + std::string(row) + "'");
    }
  }
  return out;
}

double prediction_accuracy(const std::vector<int>& predicted, const data::Dataset& test) {
  require_nonempty(test);
  if (predicted.size() != test.size()) {
    throw Error("prediction count " + std::to_string(predicted.size()) + " does not match test size " +
                std::to_string(test.size()));
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == test.examples[i].label;
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace streamsvm::harness
