#pragma once

// VIBoost: stagewise variational inference over the hierarchical label-noise
// model. Each boosting round fixes one stump h, then alternates the four
// coordinate updates
//
//   alpha      stage weight (approximate mode of the stage v-Log)
//   omega      v-Log posterior of the noise grade xi
//   phi_n      Bernoulli posterior of each type selector w_n
//   eta        Beta posterior of the type prior theta
//
// before committing H <- H + alpha h. phi, omega and eta carry over between rounds.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "viboost/adaboost.hpp"
#include "viboost/error.hpp"
#include "viboost/hypotheses.hpp"
#include "viboost/numerics.hpp"
#include "viboost/vlog.hpp"

namespace viboost {

struct VIConfig {
  double mu0 = 1.0;
  double mu0_prime = 1.0;
  double zeta1 = 1.0;
  double zeta2 = 1.0;
  double tau = 1.0;
  int rounds = 100;
  /// Inner loop stops once an ELBO improvement falls below this.
  double inner_tol = 1e-6;
  int inner_max = 50;
  bool elbo_enabled = false;
  /// Inner iterations per round when the ELBO is not evaluated.
  int fixed_inner = 5;

  double init_phi = 1.0;
  double init_eta1 = 1.0;
  double init_eta2 = 1.0;
  double init_omega1 = 1.0;
  double init_omega2 = 1.0;

  numerics::QuadratureConfig quadrature{};

  void validate() const {
    if (!(mu0 > 0.0) || !(mu0_prime > 0.0) || !(zeta1 > 0.0) || !(zeta2 > 0.0) || !(tau > 0.0)) {
      throw DomainError("VIConfig: mu0, mu0_prime, zeta and tau must be positive");
    }
    if (rounds < 1) throw DomainError("VIConfig: rounds must be >= 1");
    if (inner_max < 1 || fixed_inner < 1) throw DomainError("VIConfig: inner counts must be >= 1");
    if (!(init_phi >= 0.0 && init_phi <= 1.0)) throw DomainError("VIConfig: init_phi in [0,1]");
    if (!(init_eta1 > 0.0) || !(init_eta2 > 0.0) || !(init_omega1 > 0.0) || !(init_omega2 > 0.0)) {
      throw DomainError("VIConfig: initial eta and omega must be positive");
    }
  }
};

struct BoostState {
  std::vector<double> margins;  ///< H(x_n) on the training examples
  Ensemble stages;
  std::vector<double> phi;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
  /// ELBO values in evaluation order; elbo_stage[i] is the round of elbo_trace[i].
  /// Each round starts with one baseline value before its first inner iteration.
  std::vector<double> elbo_trace;
  std::vector<std::size_t> elbo_stage;

  static BoostState initial(std::size_t n, const VIConfig& cfg) {
    BoostState s;
    s.margins.assign(n, 0.0);
    s.phi.assign(n, cfg.init_phi);
    s.omega1 = cfg.init_omega1;
    s.omega2 = cfg.init_omega2;
    s.eta1 = cfg.init_eta1;
    s.eta2 = cfg.init_eta2;
    return s;
  }

  /// Successive ELBO differences within one round.
  std::vector<double> elbo_deltas(std::size_t round) const {
    std::vector<double> out;
    for (std::size_t i = 1; i < elbo_trace.size(); ++i) {
      if (elbo_stage[i] == round && elbo_stage[i - 1] == round) {
        out.push_back(elbo_trace[i] - elbo_trace[i - 1]);
      }
    }
    return out;
  }
};

struct NoiseReport {
  double snr = 1.0;
  double noise_grade = 0.0;
  std::vector<double> per_example_true_prob;
  std::vector<double> elbo_trace;
};

/// SNR = eta1/eta2, noise grade = log(omega2/omega1) (the mode of q(xi)).
inline NoiseReport noise_report(const BoostState& s) {
  return {s.eta1 / s.eta2, std::log(s.omega2 / s.omega1), s.phi, s.elbo_trace};
}

/// Stage v-Log for candidate h:
///   slopes [+1, -1, -y_n h(x_n)], knots [0, 0, -H(x_n) h(x_n)], multiplicities [mu0, mu0, phi_n].
/// The two leading entries are the prior's phantom examples.
inline VLogParams stage_vlog_params(std::span<const int> labels, std::span<const double> margins,
                                    std::span<const std::int8_t> predictions,
                                    std::span<const double> phi, double mu0) {
  const std::size_t n = labels.size();
  if (margins.size() != n || predictions.size() != n || phi.size() != n) {
    throw DomainError("stage_vlog_params: inputs differ in length");
  }
  std::vector<double> slopes{1.0, -1.0};
  std::vector<double> knots{0.0, 0.0};
  std::vector<double> mult{mu0, mu0};
  slopes.reserve(n + 2);
  knots.reserve(n + 2);
  mult.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    slopes.push_back(-static_cast<double>(labels[i] * predictions[i]));
    knots.push_back(-margins[i] * predictions[i]);
    mult.push_back(phi[i]);
  }
  return VLogParams(std::move(slopes), std::move(knots), std::move(mult));
}

inline VLogParams stage_vlog_params(const BoostState& s, std::span<const int> labels,
                                    std::size_t h, const StumpSpace& space, const VIConfig& cfg) {
  return stage_vlog_params(labels, s.margins, space.row(h), s.phi, cfg.mu0);
}

/// Example weighting behind the weighted-error form of the stage weight:
/// Z = sum_n phi_n e^{-tau y_n H(x_n)}, d_n = phi_n e^{-tau y_n H(x_n)} / Z.
struct ExampleWeights {
  double log_z = 0.0;
  std::vector<double> d;
};

inline ExampleWeights example_weights(std::span<const int> labels, std::span<const double> margins,
                                      std::span<const double> phi, double tau) {
  const std::size_t n = labels.size();
  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) {
    lw[i] = phi[i] > 0.0 ? std::log(phi[i]) - tau * labels[i] * margins[i]
                         : -std::numeric_limits<double>::infinity();
  }
  ExampleWeights w;
  w.log_z = numerics::log_sum_exp(lw);
  w.d.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.d[i] = std::exp(lw[i] - w.log_z);
  return w;
}

/// Stage weight from the weighted error: (1/2tau) log((mu0/Z + 1 - eps)/(mu0/Z + eps)).
/// Algebraically identical to mode_approx of the stage v-Log.
inline double stage_alpha_from_error(double eps, double log_z, double mu0, double tau) {
  return smoothed_alpha(std::clamp(eps, 0.0, 1.0), std::exp(log_z), mu0, tau);
}

struct Selection {
  std::size_t stump = 0;
  double eps = 0.0;
  double alpha = 0.0;
};

/// argmax_h |alpha(h)| using the weighted-error form; lowest index wins ties.
inline Selection select_classifier(const BoostState& s, std::span<const int> labels,
                                   const StumpSpace& space, const VIConfig& cfg) {
  if (space.size() == 0) throw DomainError("select_classifier: empty stump space");
  const auto w = example_weights(labels, s.margins, s.phi, cfg.tau);
  Selection best;
  double best_abs = -1.0;
  for (std::size_t m = 0; m < space.size(); ++m) {
    const double eps = weighted_error(space.row(m), labels, w.d);
    const double alpha = stage_alpha_from_error(eps, w.log_z, cfg.mu0, cfg.tau);
    if (std::fabs(alpha) > best_abs) {
      best_abs = std::fabs(alpha);
      best = {m, eps, alpha};
    }
  }
  return best;
}

/// log kappa_n: log-odds that label n is a true label rather than noise.
///
///   psi(eta1) - psi(eta2) + psi(omega0) - psi(omega_y) - log(1 + exp[-y (H + alpha h)])
///
/// where omega_y is omega2 for y = +1 and omega1 for y = -1.
inline double type_log_odds(double eta1, double eta2, double omega1, double omega2, int y,
                            double margin) {
  using numerics::digamma;
  const double omega_y = y == 1 ? omega2 : omega1;
  return digamma(eta1) - digamma(eta2) + digamma(omega1 + omega2) - digamma(omega_y) -
         numerics::log1pexp(-y * margin);
}

/// One pass of the four coordinate updates for a fixed stump h; returns alpha.
inline double vi_inner_iteration(BoostState& s, std::span<const int> labels, std::size_t h,
                                 const StumpSpace& space, const VIConfig& cfg) {
  const std::size_t n = labels.size();
  const auto row = space.row(h);

  const double alpha = mode_approx(stage_vlog_params(s, labels, h, space, cfg), cfg.tau);

  double neg_noise = 0.0;
  double pos_noise = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    (labels[i] == -1 ? neg_noise : pos_noise) += 1.0 - s.phi[i];
  }
  s.omega1 = cfg.mu0_prime + neg_noise;
  s.omega2 = cfg.mu0_prime + pos_noise;

  double phi_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double log_kappa = type_log_odds(s.eta1, s.eta2, s.omega1, s.omega2, labels[i],
                                           s.margins[i] + alpha * row[i]);
    s.phi[i] = numerics::sigmoid(log_kappa);
    phi_sum += s.phi[i];
  }

  s.eta1 = cfg.zeta1 + phi_sum;
  s.eta2 = cfg.zeta2 + (static_cast<double>(n) - phi_sum);
  return alpha;
}

namespace detail {

inline double bernoulli_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace detail

/// Stage ELBO up to an additive constant, for candidate h under the current
/// H, phi, omega and eta. The weight factor enters through log B_c, the log
/// normalizer of the stage v-Log, which is computed by quadrature.
inline double elbo(const BoostState& s, std::span<const int> labels, std::size_t h,
                   const StumpSpace& space, const VIConfig& cfg,
                   const numerics::QuadratureConfig& qcfg = {}) {
  using numerics::digamma;
  const std::size_t n = labels.size();
  const double log_bc = log_normalizer(stage_vlog_params(s, labels, h, space, cfg), qcfg);

  const double w0 = s.omega1 + s.omega2;
  const double e0 = s.eta1 + s.eta2;
  const double z0 = cfg.zeta1 + cfg.zeta2;
  const double psi_w0 = digamma(w0);
  const double psi_w1 = digamma(s.omega1);
  const double psi_w2 = digamma(s.omega2);
  const double psi_e0 = digamma(e0);
  const double psi_e1 = digamma(s.eta1);
  const double psi_e2 = digamma(s.eta2);

  double value = log_bc;
  value += detail::log_beta(s.omega1, s.omega2) + (w0 - 2.0 * cfg.mu0_prime) * psi_w0 -
           (s.omega1 - cfg.mu0_prime) * psi_w1 - (s.omega2 - cfg.mu0_prime) * psi_w2;
  value += detail::log_beta(s.eta1, s.eta2) + (e0 - z0) * psi_e0 - (s.eta1 - cfg.zeta1) * psi_e1 -
           (s.eta2 - cfg.zeta2) * psi_e2;

  double noise_total = 0.0;
  double noise_neg = 0.0;
  double noise_pos = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = s.phi[i];
    value += detail::bernoulli_entropy(p);
    value += psi_e1 * p + psi_e2 * (1.0 - p);
    noise_total += 1.0 - p;
    (labels[i] == -1 ? noise_neg : noise_pos) += 1.0 - p;
  }
  value -= static_cast<double>(n) * psi_e0;
  value += -psi_w0 * noise_total + psi_w1 * noise_neg + psi_w2 * noise_pos;
  return value;
}

struct VIBoostResult {
  Ensemble ensemble;
  NoiseReport report;
  BoostState state;
};

/// Called after every committed round with the 0-based round index.
using RoundObserver = std::function<void(std::size_t round, const BoostState&)>;

/// Runs cfg.rounds boosting rounds. The final classifier is sign(H) with sign(0) = +1.
inline VIBoostResult run_viboost(const Dataset& data, const StumpSpace& space, const VIConfig& cfg,
                         const RoundObserver& observer = {}) {
  cfg.validate();
  if (space.examples != data.rows()) {
    throw DomainError("run_viboost: stump space was built for a different dataset");
  }
  const auto& labels = data.labels();
  BoostState s = BoostState::initial(data.rows(), cfg);

  for (int t = 0; t < cfg.rounds; ++t) {
    const auto round = static_cast<std::size_t>(t);
    const std::size_t h = select_classifier(s, labels, space, cfg).stump;
    double alpha = 0.0;
    if (cfg.elbo_enabled) {
      double prev = elbo(s, labels, h, space, cfg, cfg.quadrature);
      s.elbo_trace.push_back(prev);
      s.elbo_stage.push_back(round);
      for (int i = 0; i < cfg.inner_max; ++i) {
        alpha = vi_inner_iteration(s, labels, h, space, cfg);
        const double cur = elbo(s, labels, h, space, cfg, cfg.quadrature);
        s.elbo_trace.push_back(cur);
        s.elbo_stage.push_back(round);
        const double gain = cur - prev;
        prev = cur;
        if (gain < cfg.inner_tol) break;
      }
    } else {
      for (int i = 0; i < cfg.fixed_inner; ++i) alpha = vi_inner_iteration(s, labels, h, space, cfg);
    }
    const auto row = space.row(h);
    for (std::size_t n = 0; n < s.margins.size(); ++n) s.margins[n] += alpha * row[n];
    s.stages.push_back({alpha, h});
    if (observer) observer(round, s);
  }
  return {s.stages, noise_report(s), s};
}

}  // namespace viboost
