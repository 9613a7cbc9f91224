#pragma once

// Synthetic data: the noisy-label generative process, the step dataset, the
// Long-Servedio construction, a sparse text stand-in, and the mapping from a
// three-way label-noise mixture to its equivalent binary channel.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "viboost/error.hpp"
#include "viboost/hypotheses.hpp"
#include "viboost/numerics.hpp"
#include "viboost/random.hpp"

namespace viboost {

/// Inputs of the label generator. log_odds and noise_grade may be ±infinity,
/// which yields deterministic labels.
struct GenSpec {
  std::vector<std::vector<double>> domain;
  std::function<double(std::span<const double>)> log_odds;
  double noise_grade = 0.0;
  double type_prior = 1.0;
};

namespace detail {

/// P(y = +1) for log-odds f, resolving infinite odds before any arithmetic.
inline double prob_positive(double f) {
  if (f == std::numeric_limits<double>::infinity()) return 1.0;
  if (f == -std::numeric_limits<double>::infinity()) return 0.0;
  return numerics::sigmoid(f);
}

}  // namespace detail

/// For every instance: w ~ Bernoulli(type_prior); a true label (w = 1) has
/// P(+1) = 1/(1 + e^{-F(x)}), a noisy one P(+1) = 1/(1 + e^{-xi}).
inline Dataset generate_labels(const GenSpec& spec, Rng& rng) {
  if (!(spec.type_prior >= 0.0 && spec.type_prior <= 1.0)) {
    throw DomainError("generate_labels: type_prior must lie in [0, 1]");
  }
  if (std::isnan(spec.noise_grade)) throw DomainError("generate_labels: noise_grade is NaN");
  if (spec.domain.empty()) throw DomainError("generate_labels: empty domain");
  if (!spec.log_odds) throw DomainError("generate_labels: log_odds is not set");
  const std::size_t cols = spec.domain.front().size();
  std::vector<double> features;
  features.reserve(spec.domain.size() * cols);
  std::vector<int> labels;
  std::vector<int> types;
  const double noise_p = detail::prob_positive(spec.noise_grade);
  for (const auto& x : spec.domain) {
    if (x.size() != cols) throw DomainError("generate_labels: instances differ in dimension");
    const int w = bernoulli(rng, spec.type_prior) ? 1 : 0;
    const double p = w == 1 ? detail::prob_positive(spec.log_odds(x)) : noise_p;
    labels.push_back(bernoulli(rng, p) ? 1 : -1);
    types.push_back(w);
    features.insert(features.end(), x.begin(), x.end());
  }
  return Dataset(spec.domain.size(), cols, std::move(features), std::move(labels), std::move(types));
}

inline const double kStepNoiseGrade = std::log(3.0);

/// 100 points x in {-99, -97, ..., 99}; true labels are sign(x) (F = ±inf).
inline Dataset make_step_dataset(double type_prior, Rng& rng,
                                 double noise_grade = kStepNoiseGrade) {
  GenSpec spec;
  for (int x = -99; x <= 99; x += 2) spec.domain.push_back({static_cast<double>(x)});
  spec.log_odds = [](std::span<const double> x) {
    return x[0] > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  };
  spec.noise_grade = noise_grade;
  spec.type_prior = type_prior;
  return generate_labels(spec, rng);
}

/// Long-Servedio distribution over {-1,+1}^{2n+11}.
///
/// y is uniform. x is a large-margin example (all coordinates y) with
/// probability 1/4, a puller (first 11 coordinates y, the other 2n -y) with
/// probability 1/4, and otherwise a penalizer: 5 random coordinates of the
/// first 11 and n+1 random coordinates of the last 2n equal y, the rest -y.
/// Each label is then flipped independently with probability noise_level.
inline Dataset make_long_servedio(int n, double noise_level, int count, Rng& rng) {
  if (n < 1) throw DomainError("make_long_servedio: n must be >= 1");
  if (!(noise_level >= 0.0 && noise_level < 0.5)) {
    throw DomainError("make_long_servedio: noise_level must lie in [0, 0.5)");
  }
  if (count < 1) throw DomainError("make_long_servedio: count must be >= 1");
  constexpr std::size_t kHead = 11;
  constexpr std::size_t kHeadAgree = 5;
  const auto tail = static_cast<std::size_t>(2 * n);
  const std::size_t dim = kHead + tail;
  const auto rows = static_cast<std::size_t>(count);

  std::vector<double> features;
  features.reserve(rows * dim);
  std::vector<int> labels;
  labels.reserve(rows);
  std::vector<std::size_t> head_idx(kHead);
  std::vector<std::size_t> tail_idx(tail);
  std::vector<double> x(dim);

  for (std::size_t r = 0; r < rows; ++r) {
    const int y = bernoulli(rng, 0.5) ? 1 : -1;
    const double kind = uniform01(rng);
    if (kind < 0.25) {
      std::fill(x.begin(), x.end(), y);
    } else if (kind < 0.5) {
      std::fill(x.begin(), x.begin() + kHead, y);
      std::fill(x.begin() + kHead, x.end(), -y);
    } else {
      std::fill(x.begin(), x.end(), -y);
      std::iota(head_idx.begin(), head_idx.end(), 0);
      std::iota(tail_idx.begin(), tail_idx.end(), kHead);
      std::shuffle(head_idx.begin(), head_idx.end(), rng);
      std::shuffle(tail_idx.begin(), tail_idx.end(), rng);
      for (std::size_t i = 0; i < kHeadAgree; ++i) x[head_idx[i]] = y;
      for (std::size_t i = 0; i < static_cast<std::size_t>(n) + 1; ++i) x[tail_idx[i]] = y;
    }
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(bernoulli(rng, noise_level) ? -y : y);
  }
  return Dataset(rows, dim, std::move(features), std::move(labels));
}

/// Synthetic bag-of-words stand-in for a small two-topic document corpus.
/// Features are present (+1) / absent (-1). The first `informative` words are
/// more frequent in one class (odd words favour +1, even words favour -1).
inline Dataset make_sparse_text(int docs, int vocab, int informative, Rng& rng,
                                double base_rate = 0.02, double topic_rate = 0.25) {
  if (docs < 1 || vocab < 1 || informative < 0 || informative > vocab) {
    throw DomainError("make_sparse_text: invalid corpus dimensions");
  }
  const auto rows = static_cast<std::size_t>(docs);
  const auto cols = static_cast<std::size_t>(vocab);
  std::vector<double> features(rows * cols, -1.0);
  std::vector<int> labels(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const int y = r % 2 == 0 ? 1 : -1;
    labels[r] = y;
    for (std::size_t j = 0; j < cols; ++j) {
      double p = base_rate;
      if (j < static_cast<std::size_t>(informative)) {
        const int favoured = j % 2 == 1 ? 1 : -1;
        p = favoured == y ? topic_rate : base_rate;
      }
      if (bernoulli(rng, p)) features[r * cols + j] = 1.0;
    }
  }
  return Dataset(rows, cols, std::move(features), std::move(labels));
}

/// y from v: kept with probability rho1, inverted with rho2, replaced by a
/// Bernoulli(r) label with rho3.
struct NoiseMixture {
  double rho1 = 1.0;
  double rho2 = 0.0;
  double rho3 = 0.0;
  double r = 0.5;
};

/// The same channel as "keep with probability theta, else Bernoulli(s)", and
/// as a binary asymmetric channel with a = P(Y=-1|V=+1), b = P(Y=+1|V=-1).
struct EquivalentChannel {
  double theta = 1.0;
  double s = 0.5;
  double a = 0.0;
  double b = 0.0;
};

inline EquivalentChannel mixture_to_channel(const NoiseMixture& m) {
  constexpr double kSumTol = 1e-12;
  if (!(m.rho1 >= 0.0 && m.rho2 >= 0.0 && m.rho3 >= 0.0) ||
      std::fabs(m.rho1 + m.rho2 + m.rho3 - 1.0) > kSumTol) {
    throw DomainError("mixture_to_channel: rho must be a probability vector");
  }
  if (!(m.r >= 0.0 && m.r <= 1.0)) throw DomainError("mixture_to_channel: r must lie in [0, 1]");
  if (m.rho1 < m.rho2) {
    throw DomainError("mixture_to_channel: inversion-dominant mixtures have no equivalent channel");
  }
  EquivalentChannel c;
  c.theta = 2.0 * m.rho1 + m.rho3 - 1.0;
  const double noisy = 2.0 - 2.0 * m.rho1 - m.rho3;
  // Noise-free mixtures leave s unidentified; report the midpoint.
  c.s = noisy > 0.0 ? (1.0 - m.rho1 - m.rho3 * (1.0 - m.r)) / noisy : 0.5;
  c.a = m.rho2 + m.rho3 * (1.0 - m.r);
  c.b = m.rho2 + m.rho3 * m.r;
  return c;
}

/// (1 + theta) / (1 - theta): true-to-noisy label ratio for a balanced dataset.
inline double expected_snr(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("expected_snr: theta must lie in [0, 1]");
  if (theta == 1.0) return std::numeric_limits<double>::infinity();
  return (1.0 + theta) / (1.0 - theta);
}

}  // namespace viboost
