#pragma once

// The Versatile Logistic (v-Log) distribution
//
//   p(z) ∝ prod_k (1 + exp[slope_k (z - knot_k)])^{-multiplicity_k}
//
// together with its conjugate update against binary-logistic observations,
// modal estimates, normalization and sampling.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "viboost/error.hpp"
#include "viboost/numerics.hpp"
#include "viboost/random.hpp"
#include "viboost/slice.hpp"

namespace viboost {

struct VLogParams {
  std::vector<double> slopes;
  std::vector<double> knots;
  std::vector<double> multiplicities;

  VLogParams() = default;

  VLogParams(std::vector<double> s, std::vector<double> k, std::vector<double> m)
      : slopes(std::move(s)), knots(std::move(k)), multiplicities(std::move(m)) {
    check_structure();
  }

  /// v-Log(slope * [+1, -1], knot * [1, 1], [mu_pos, mu_neg]).
  static VLogParams two_term(double slope, double knot, double mu_pos, double mu_neg) {
    return VLogParams({slope, -slope}, {knot, knot}, {mu_pos, mu_neg});
  }

  std::size_t size() const noexcept { return slopes.size(); }

  void check_structure() const {
    if (slopes.size() != knots.size() || slopes.size() != multiplicities.size()) {
      throw DomainError("VLogParams: slope, knot and multiplicity vectors differ in length");
    }
    if (slopes.size() < 2) throw DomainError("VLogParams: at least two terms are required");
    for (double m : multiplicities) {
      if (!(m >= 0.0)) throw DomainError("VLogParams: multiplicities must be nonnegative");
    }
  }

  friend bool operator==(const VLogParams&, const VLogParams&) = default;
};

/// One binary-logistic observation y | z with P(y) = 1 / (1 + exp[-y slope (z - knot)]).
struct BLogObservation {
  int y;
  double slope;
  double knot;
};

/// True iff some positive slope and some negative slope carry positive multiplicity.
inline bool is_valid(const VLogParams& p) noexcept {
  bool pos = false;
  bool neg = false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p.multiplicities[k] > 0.0) {
      pos = pos || p.slopes[k] > 0.0;
      neg = neg || p.slopes[k] < 0.0;
    }
  }
  return pos && neg;
}

inline void require_valid(const VLogParams& p, const char* where) {
  if (!is_valid(p)) {
    throw DomainError(std::string(where) + ": v-Log parameters do not define a proper density");
  }
}

/// sum_k mu_k log(1 + exp[beta_k (z - gamma_k)]); the negative log density up to a constant.
inline double neg_log_density(const VLogParams& p, double z) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = p.multiplicities[k];
    if (m == 0.0) continue;
    acc += m * numerics::log1pexp(p.slopes[k] * (z - p.knots[k]));
  }
  return acc;
}

inline double unnorm_log_density(const VLogParams& p, double z) noexcept {
  return -neg_log_density(p, z);
}

/// d/dz of neg_log_density.
inline double neg_log_density_slope(const VLogParams& p, double z) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = p.multiplicities[k];
    if (m == 0.0) continue;
    acc += m * p.slopes[k] * numerics::sigmoid(p.slopes[k] * (z - p.knots[k]));
  }
  return acc;
}

/// d²/dz² of neg_log_density; always >= 0.
inline double neg_log_density_curvature(const VLogParams& p, double z) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = p.multiplicities[k];
    if (m == 0.0) continue;
    const double s = numerics::sigmoid(p.slopes[k] * (z - p.knots[k]));
    acc += m * p.slopes[k] * p.slopes[k] * s * (1.0 - s);
  }
  return acc;
}

/// Conjugate update: appends one (−y·slope, knot, 1) term per observation.
inline VLogParams posterior_update(const VLogParams& prior, std::span<const BLogObservation> obs) {
  require_valid(prior, "posterior_update");
  VLogParams out = prior;
  out.slopes.reserve(prior.size() + obs.size());
  out.knots.reserve(prior.size() + obs.size());
  out.multiplicities.reserve(prior.size() + obs.size());
  for (const auto& o : obs) {
    if (o.y != 1 && o.y != -1) throw DomainError("posterior_update: labels must be +1 or -1");
    out.slopes.push_back(-o.y * o.slope);
    out.knots.push_back(o.knot);
    out.multiplicities.push_back(1.0);
  }
  return out;
}

/// Symmetric doubling from zero until the log-density slope changes sign.
inline numerics::Bracket mode_bracket(const VLogParams& p) {
  double half = 1.0;
  for (int i = 0; i < 1100; ++i, half *= 2.0) {
    if (neg_log_density_slope(p, -half) < 0.0 && neg_log_density_slope(p, half) > 0.0) {
      return {-half, half};
    }
  }
  throw BracketError("mode_bracket: no sign change of the log-density slope found");
}

/// The unique mode, by bracketing and golden-section search on the negative log density.
inline double mode_exact(const VLogParams& p, double tol = numerics::kDefaultGoldenTol) {
  require_valid(p, "mode_exact");
  const auto bracket = mode_bracket(p);
  return numerics::golden_section_min([&p](double z) { return neg_log_density(p, z); }, bracket,
                                      tol);
}

/// Closed-form modal estimate from the single-tail approximation
/// log(1 + e^{b(z - g)}) ≈ e^{tau b (z - g)}, valid when all |slope_k| are equal.
///
///   alpha = 1/(2 tau b) log( sum_{b_k<0} mu_k e^{tau b g_k} / sum_{b_k>0} mu_k e^{-tau b g_k} )
///
/// Both sums are evaluated in log space.
inline double mode_approx(const VLogParams& p, double tau = 1.0) {
  if (!(tau > 0.0)) throw DomainError("mode_approx: tau must be positive");
  const double b = std::fabs(p.slopes.front());
  if (!(b > 0.0)) throw DomainError("mode_approx: slopes must be nonzero");
  std::vector<double> neg_terms;
  std::vector<double> pos_terms;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (std::fabs(std::fabs(p.slopes[k]) - b) > 1e-12) {
      throw DomainError("mode_approx: slope magnitudes are not all equal");
    }
    const double m = p.multiplicities[k];
    if (m == 0.0) continue;
    if (p.slopes[k] < 0.0) {
      neg_terms.push_back(std::log(m) + tau * b * p.knots[k]);
    } else {
      pos_terms.push_back(std::log(m) - tau * b * p.knots[k]);
    }
  }
  if (neg_terms.empty() || pos_terms.empty()) {
    throw DomainError("mode_approx: one slope sign carries zero total multiplicity");
  }
  return (numerics::log_sum_exp(neg_terms) - numerics::log_sum_exp(pos_terms)) / (2.0 * tau * b);
}

/// log of the integral of exp(unnorm_log_density) over the real line.
///
/// The integrand is translated to its mode so that it peaks at exactly 1,
/// then integrated with the arctan substitution.
inline double log_normalizer(const VLogParams& p, const numerics::QuadratureConfig& cfg = {}) {
  const double mode = mode_exact(p);
  const double floor = neg_log_density(p, mode);
  const double integral = numerics::integrate_real_line(
      [&](double z) { return std::exp(-(neg_log_density(p, z + mode) - floor)); }, cfg);
  return -floor + std::log(integral);
}

/// Closed-form log normalizer of v-Log(slope·[+1,−1], knot·1, [mu1, mu2]):
/// log((1/slope) Γ(mu1)Γ(mu2)/Γ(mu1+mu2)).
inline double two_term_log_normalizer(double slope, double mu1, double mu2) {
  if (!(slope > 0.0) || !(mu1 > 0.0) || !(mu2 > 0.0)) {
    throw DomainError("two_term_log_normalizer: arguments must be positive");
  }
  return -std::log(slope) + std::lgamma(mu1) + std::lgamma(mu2) - std::lgamma(mu1 + mu2);
}

struct TwoTermExpectations {
  double log1pexp_pos;  ///< E log(1 + e^{+Z})
  double log1pexp_neg;  ///< E log(1 + e^{-Z})
};

/// Expectations under v-Log([+1,−1], 0, [omega1, omega2]) via the Beta transform.
inline TwoTermExpectations two_term_expectations(double omega1, double omega2) {
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) {
    throw DomainError("two_term_expectations: multiplicities must be positive");
  }
  const double psi0 = numerics::digamma(omega1 + omega2);
  return {psi0 - numerics::digamma(omega1), psi0 - numerics::digamma(omega2)};
}

/// Z = knot + (1/slope) log(1/V − 1) maps V ~ Beta(mu_pos, mu_neg) onto
/// v-Log(slope·[+1,−1], knot·1, [mu_pos, mu_neg]).
inline double beta_to_vlog(double v, double slope, double knot) {
  return knot + std::log(1.0 / v - 1.0) / slope;
}

namespace detail {

struct TwoTermForm {
  bool matches = false;
  double slope = 0.0;
  double knot = 0.0;
  double mu_pos = 0.0;
  double mu_neg = 0.0;
};

inline TwoTermForm as_two_term(const VLogParams& p) {
  TwoTermForm f;
  if (p.size() != 2) return f;
  const std::size_t ip = p.slopes[0] > 0.0 ? 0 : 1;
  const std::size_t in = 1 - ip;
  if (!(p.slopes[ip] > 0.0) || !(p.slopes[in] < 0.0)) return f;
  if (p.slopes[ip] != -p.slopes[in] || p.knots[0] != p.knots[1]) return f;
  if (!(p.multiplicities[ip] > 0.0) || !(p.multiplicities[in] > 0.0)) return f;
  return {true, p.slopes[ip], p.knots[0], p.multiplicities[ip], p.multiplicities[in]};
}

}  // namespace detail

/// Number of slice updates applied from the mode for a single general-case draw.
inline constexpr int kSliceStepsPerDraw = 20;

/// Markov chain over a fixed v-Log, started at its mode.
class VLogSliceChain {
 public:
  explicit VLogSliceChain(VLogParams p) : params_(std::move(p)) {
    require_valid(params_, "VLogSliceChain");
    state_ = mode_exact(params_);
    width_ = 2.0 / std::sqrt(std::max(neg_log_density_curvature(params_, state_), 1e-12));
  }

  double next(Rng& rng) {
    state_ = slice_step([this](double z) { return unnorm_log_density(params_, z); }, state_,
                        width_, rng);
    return state_;
  }

  double state() const noexcept { return state_; }
  const VLogParams& params() const noexcept { return params_; }

 private:
  VLogParams params_;
  double state_ = 0.0;
  double width_ = 1.0;
};

/// A draw from v-Log(p).
///
/// Two-term, equal-|slope|, shared-knot parameters are sampled exactly through
/// the Beta transform. Anything else runs a short slice-sampling chain from
/// the mode; log-concavity makes every slice a single interval.
inline double sample(const VLogParams& p, Rng& rng) {
  require_valid(p, "sample");
  if (const auto f = detail::as_two_term(p); f.matches) {
    // log(1/V - 1) = log Gb - log Ga for V = Ga / (Ga + Gb).
    const double la = log_gamma_draw(rng, f.mu_pos);
    const double lb = log_gamma_draw(rng, f.mu_neg);
    return f.knot + (lb - la) / f.slope;
  }
  VLogSliceChain chain(p);
  double z = chain.state();
  for (int i = 0; i < kSliceStepsPerDraw; ++i) z = chain.next(rng);
  return z;
}

}  // namespace viboost
