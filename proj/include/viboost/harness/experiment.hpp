#pragma once

// Experiment protocol: repeated random splits, per-round metrics and their
// aggregation across repeats.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "viboost/adaboost.hpp"
#include "viboost/datagen.hpp"
#include "viboost/error.hpp"
#include "viboost/gibbs.hpp"
#include "viboost/harness/io.hpp"
#include "viboost/hypotheses.hpp"
#include "viboost/random.hpp"
#include "viboost/viboost.hpp"

namespace viboost::harness {

enum class Algorithm { VIBoost, AdaBoost, AdaBoostSmoothed, Gibbs };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::VIBoost: return "viboost";
    case Algorithm::AdaBoost: return "adaboost";
    case Algorithm::AdaBoostSmoothed: return "adaboost-smoothed";
    case Algorithm::Gibbs: return "gibbs";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "viboost") return Algorithm::VIBoost;
  if (s == "adaboost") return Algorithm::AdaBoost;
  if (s == "adaboost-smoothed") return Algorithm::AdaBoostSmoothed;
  if (s == "gibbs") return Algorithm::Gibbs;
  throw ParseError("unknown algorithm '" + s + "'");
}

struct DataSource {
  enum class Kind { DenseFile, SparseFile, Step, LongServedio, SparseText };
  Kind kind = Kind::Step;
  std::string path;
  bool has_header = false;
  double theta = 0.0;  ///< step dataset type prior
  int ls_n = 10;
  double ls_noise = 0.2;
  int ls_count = 1200;
  int text_docs = 145;
  int text_vocab = 2000;
  int text_informative = 40;

  bool is_generator() const noexcept {
    return kind == Kind::Step || kind == Kind::LongServedio || kind == Kind::SparseText;
  }
};

struct ExperimentSpec {
  DataSource source;
  Algorithm algorithm = Algorithm::VIBoost;
  /// Fraction of examples used for training; 1 trains on everything with no test set.
  double train_fraction = 0.1;
  /// When positive, overrides train_fraction with an absolute count.
  int train_count = 0;
  int rounds = 100;
  int repeats = 1;
  std::uint64_t seed = 1;
  std::string output_dir;
  VIConfig vi{};
  int gibbs_iters = 5000;
  int gibbs_burnin = 500;
  int gibbs_thin = 1;

  void validate() const {
    if (repeats < 1) throw DomainError("ExperimentSpec: repeats must be >= 1");
    if (rounds < 1) throw DomainError("ExperimentSpec: rounds must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
      throw DomainError("ExperimentSpec: train_fraction must lie in (0, 1]");
    }
    if (train_count < 0) throw DomainError("ExperimentSpec: train_count must be >= 0");
  }
};

/// Per-round curves of one repeat. Test error is NaN when there is no test set;
/// SNR and noise grade are NaN for algorithms that do not estimate them.
struct RepeatResult {
  std::vector<double> train_error;
  std::vector<double> test_error;
  std::vector<double> snr;
  std::vector<double> noise_grade;
};

struct Summary {
  std::vector<double> mean;
  std::vector<double> se;
};

struct ResultTable {
  Summary train_error;
  Summary test_error;
  Summary snr;
  Summary noise_grade;
  std::vector<RepeatResult> repeats;

  std::size_t rounds() const noexcept { return train_error.mean.size(); }
};

/// Mean and standard error (sample sd / sqrt(R)) per round across repeats.
inline Summary summarize(const std::vector<std::vector<double>>& curves) {
  Summary s;
  if (curves.empty()) return s;
  const std::size_t len = curves.front().size();
  const auto r = static_cast<double>(curves.size());
  s.mean.assign(len, 0.0);
  s.se.assign(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    for (const auto& c : curves) sum += c[t];
    const double mean = sum / r;
    double ss = 0.0;
    for (const auto& c : curves) ss += (c[t] - mean) * (c[t] - mean);
    s.mean[t] = mean;
    s.se[t] = curves.size() > 1 ? std::sqrt(ss / (r - 1.0) / r) : 0.0;
  }
  return s;
}

inline ResultTable aggregate(std::vector<RepeatResult> repeats) {
  auto pick = [&repeats](auto member) {
    std::vector<std::vector<double>> out;
    out.reserve(repeats.size());
    for (const auto& r : repeats) out.push_back(r.*member);
    return out;
  };
  ResultTable t;
  t.train_error = summarize(pick(&RepeatResult::train_error));
  t.test_error = summarize(pick(&RepeatResult::test_error));
  t.snr = summarize(pick(&RepeatResult::snr));
  t.noise_grade = summarize(pick(&RepeatResult::noise_grade));
  t.repeats = std::move(repeats);
  return t;
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Random train/test partition; the two index sets are disjoint and exhaustive.
inline Split random_split(std::size_t n, double train_fraction, int train_count, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t n_train = train_count > 0
                            ? static_cast<std::size_t>(train_count)
                            : static_cast<std::size_t>(std::llround(train_fraction * n));
  n_train = std::clamp<std::size_t>(n_train, 1, n);
  if (n_train < n) std::shuffle(idx.begin(), idx.end(), rng);
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

inline Dataset make_source_dataset(const DataSource& src, Rng& rng) {
  switch (src.kind) {
    case DataSource::Kind::DenseFile: return load_dense_csv(src.path, src.has_header);
    case DataSource::Kind::SparseFile: return load_sparse_binary(src.path);
    case DataSource::Kind::Step: return make_step_dataset(src.theta, rng);
    case DataSource::Kind::LongServedio:
      return make_long_servedio(src.ls_n, src.ls_noise, src.ls_count, rng);
    case DataSource::Kind::SparseText:
      return make_sparse_text(src.text_docs, src.text_vocab, src.text_informative, rng);
  }
  throw DomainError("unknown data source");
}

namespace detail {

inline double sign_error(std::span<const double> margins, std::span<const int> labels) {
  if (labels.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t wrong = 0;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if ((margins[n] >= 0.0 ? 1 : -1) != labels[n]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

/// Tracks H(x) on held-out examples as stages are committed.
class TestMargins {
 public:
  TestMargins(const Dataset& test, const StumpSpace& space)
      : test_(test), space_(space), margins_(test.rows(), 0.0) {}

  void add(const Stage& s) {
    const Stump& h = space_.stumps[s.stump];
    for (std::size_t n = 0; n < test_.rows(); ++n) margins_[n] += s.alpha * h.predict(test_.row(n));
  }
  double error() const { return sign_error(margins_, test_.labels()); }

 private:
  const Dataset& test_;
  const StumpSpace& space_;
  std::vector<double> margins_;
};

}  // namespace detail

/// Trains one repeat and records its per-round curves.
inline RepeatResult run_repeat(const ExperimentSpec& spec, const Dataset& full,
                               std::size_t repeat_index) {
  Rng rng(mix_seed(spec.seed, repeat_index));
  const Dataset generated = spec.source.is_generator() ? make_source_dataset(spec.source, rng)
                                                       : Dataset{};
  const Dataset& data = spec.source.is_generator() ? generated : full;
  const Split split = random_split(data.rows(), spec.train_fraction, spec.train_count, rng);
  const Dataset train = data.subset(split.train);
  const Dataset test = data.subset(split.test);
  const StumpSpace space = build_stumps(train);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  RepeatResult out;
  detail::TestMargins test_margins(test, space);

  switch (spec.algorithm) {
    case Algorithm::VIBoost: {
      VIConfig cfg = spec.vi;
      cfg.rounds = spec.rounds;
      run_viboost(train, space, cfg, [&](std::size_t, const BoostState& s) {
        test_margins.add(s.stages.back());
        const auto rep = noise_report(s);
        out.train_error.push_back(detail::sign_error(s.margins, train.labels()));
        out.test_error.push_back(test_margins.error());
        out.snr.push_back(rep.snr);
        out.noise_grade.push_back(rep.noise_grade);
      });
      break;
    }
    case Algorithm::AdaBoost:
    case Algorithm::AdaBoostSmoothed: {
      AdaConfig cfg;
      cfg.rounds = spec.rounds;
      cfg.tau = spec.vi.tau;
      cfg.smoothing_mu0 = spec.algorithm == Algorithm::AdaBoostSmoothed ? spec.vi.mu0 : 0.0;
      const auto res = run_adaboost(train, space, cfg);
      std::vector<double> margins(train.rows(), 0.0);
      for (const auto& stage : res.ensemble) {
        const auto row = space.row(stage.stump);
        for (std::size_t n = 0; n < margins.size(); ++n) margins[n] += stage.alpha * row[n];
        test_margins.add(stage);
        out.train_error.push_back(detail::sign_error(margins, train.labels()));
        out.test_error.push_back(test_margins.error());
        out.snr.push_back(nan);
        out.noise_grade.push_back(nan);
      }
      break;
    }
    case Algorithm::Gibbs: {
      GibbsHyper hyper{spec.vi.mu0, spec.vi.mu0_prime, spec.vi.zeta1, spec.vi.zeta2};
      const auto trace = run_gibbs(train.labels(), space, hyper, spec.gibbs_iters,
                                   spec.gibbs_burnin, spec.gibbs_thin, rng);
      const auto mean = posterior_means(trace);
      std::vector<double> margins(train.rows(), 0.0);
      for (std::size_t m = 0; m < space.size(); ++m) {
        for (std::size_t n = 0; n < margins.size(); ++n) {
          margins[n] += mean.c[m] * space.prediction(m, n);
        }
        test_margins.add({mean.c[m], m});
      }
      out.train_error.push_back(detail::sign_error(margins, train.labels()));
      out.test_error.push_back(test_margins.error());
      out.snr.push_back(mean.theta / (1.0 - mean.theta));
      out.noise_grade.push_back(mean.xi);
      break;
    }
  }
  return out;
}

/// Runs every repeat (concurrently, one independent stream per repeat) and
/// aggregates in repeat order.
inline ResultTable run_repeats(const ExperimentSpec& spec) {
  spec.validate();
  Dataset full;
  if (!spec.source.is_generator()) {
    Rng unused(spec.seed);
    full = make_source_dataset(spec.source, unused);
    if (spec.algorithm == Algorithm::Gibbs) {
      const std::size_t n_train =
          spec.train_count > 0
              ? static_cast<std::size_t>(spec.train_count)
              : static_cast<std::size_t>(std::llround(spec.train_fraction * full.rows()));
      if (n_train > kGibbsMaxExamples) {
        throw ScaleGuardError("gibbs: training set exceeds the micro-instance limit of 20 examples");
      }
    }
  }

  const auto repeats = static_cast<std::size_t>(spec.repeats);
  std::vector<RepeatResult> results(repeats);
  std::vector<std::exception_ptr> errors(repeats);
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(repeats, std::max(1u, std::thread::hardware_concurrency()));
  auto work = [&] {
    for (std::size_t r = next++; r < repeats; r = next++) {
      try {
        results[r] = run_repeat(spec, full, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return aggregate(std::move(results));
}

inline void write_result_csv(std::ostream& os, const ResultTable& t) {
  os << kFormatTag << '\n';
  os << "round,train_error_mean,train_error_se,test_error_mean,test_error_se,"
        "snr_mean,snr_se,noise_grade_mean,noise_grade_se\n";
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < t.rounds(); ++i) {
    os << i + 1 << ',' << t.train_error.mean[i] << ',' << t.train_error.se[i] << ','
       << t.test_error.mean[i] << ',' << t.test_error.se[i] << ',' << t.snr.mean[i] << ','
       << t.snr.se[i] << ',' << t.noise_grade.mean[i] << ',' << t.noise_grade.se[i] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace viboost::harness
