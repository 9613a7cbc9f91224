#pragma once

// AdaBoost over a stump space, optionally with prior-smoothed stage weights.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "viboost/error.hpp"
#include "viboost/hypotheses.hpp"
#include "viboost/numerics.hpp"

namespace viboost {

struct AdaConfig {
  int rounds = 100;
  /// Prior multiplicity behind the 1/Z shrinkage; 0 gives classic AdaBoost.
  double smoothing_mu0 = 0.0;
  double tau = 1.0;

  void validate() const {
    if (rounds < 1) throw DomainError("AdaConfig: rounds must be >= 1");
    if (!(smoothing_mu0 >= 0.0)) throw DomainError("AdaConfig: smoothing_mu0 must be >= 0");
    if (!(tau > 0.0)) throw DomainError("AdaConfig: tau must be positive");
  }
};

/// (1/(2 tau)) log((mu0/Z + 1 - eps) / (mu0/Z + eps)).
///
/// With mu0 = 0 this is the classic AdaBoost weight; for eps in {0, 1} it is
/// then returned as +inf / -inf, which callers must treat as degenerate.
inline double smoothed_alpha(double eps, double z, double mu0, double tau = 1.0) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("smoothed_alpha: eps must lie in [0, 1]");
  if (!(z > 0.0)) throw DomainError("smoothed_alpha: Z must be positive");
  if (!(mu0 >= 0.0)) throw DomainError("smoothed_alpha: mu0 must be >= 0");
  if (!(tau > 0.0)) throw DomainError("smoothed_alpha: tau must be positive");
  const double shrink = mu0 / z;
  if (shrink == 0.0) {
    if (eps == 0.0) return std::numeric_limits<double>::infinity();
    if (eps == 1.0) return -std::numeric_limits<double>::infinity();
  }
  return (std::log(shrink + (1.0 - eps)) - std::log(shrink + eps)) / (2.0 * tau);
}

struct AdaRound {
  std::size_t stump = 0;
  double eps = 0.0;
  double alpha = 0.0;
  /// sum_n exp(-y_n H(x_n)) after the round.
  double exp_loss = 0.0;
};

struct AdaResult {
  Ensemble ensemble;
  std::vector<AdaRound> rounds;
};

/// Standard AdaBoost loop: uniform start, argmin weighted error (lowest index on
/// ties), stage weight from smoothed_alpha, multiplicative reweighting.
///
/// The example weights are kept as d_n ∝ exp(-tau y_n H(x_n)), recomputed from
/// the margins each round; for tau = 1 this is the usual d_n e^{-alpha y_n h(x_n)}
/// update with renormalization. Z in the smoothed weight is the unnormalized sum.
inline AdaResult run_adaboost(const Dataset& data, const StumpSpace& space, const AdaConfig& cfg) {
  cfg.validate();
  if (space.size() == 0) throw DomainError("run_adaboost: empty stump space");
  if (space.examples != data.rows()) {
    throw DomainError("run_adaboost: stump space was built for a different dataset");
  }
  const std::size_t n_rows = data.rows();
  const auto& labels = data.labels();
  std::vector<double> margins(n_rows, 0.0);
  std::vector<double> log_w(n_rows);
  std::vector<double> d(n_rows);
  AdaResult result;

  for (int t = 0; t < cfg.rounds; ++t) {
    for (std::size_t n = 0; n < n_rows; ++n) log_w[n] = -cfg.tau * labels[n] * margins[n];
    const double log_z = numerics::log_sum_exp(log_w);
    for (std::size_t n = 0; n < n_rows; ++n) d[n] = std::exp(log_w[n] - log_z);

    std::size_t best = 0;
    double best_eps = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < space.size(); ++m) {
      const double eps = weighted_error(space.row(m), labels, d);
      if (eps < best_eps) {
        best_eps = eps;
        best = m;
      }
    }
    // Rounding can leave eps a hair outside [0, 1].
    best_eps = std::clamp(best_eps, 0.0, 1.0);
    const double alpha = smoothed_alpha(best_eps, std::exp(log_z), cfg.smoothing_mu0, cfg.tau);
    if (!std::isfinite(alpha)) {
      throw NumericError("run_adaboost: degenerate stage weight (weighted error is 0 or 1)");
    }
    const auto row = space.row(best);
    double loss = 0.0;
    for (std::size_t n = 0; n < n_rows; ++n) {
      margins[n] += alpha * row[n];
      loss += std::exp(-labels[n] * margins[n]);
    }
    result.ensemble.push_back({alpha, best});
    result.rounds.push_back({best, best_eps, alpha, loss});
  }
  return result;
}

}  // namespace viboost
