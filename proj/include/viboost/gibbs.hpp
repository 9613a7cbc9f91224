#pragma once

// Gibbs sampler for the static noise model over a small, fixed set of stumps.
// Used as an exact-inference reference for VIBoost on micro instances.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "viboost/error.hpp"
#include "viboost/hypotheses.hpp"
#include "viboost/numerics.hpp"
#include "viboost/random.hpp"
#include "viboost/slice.hpp"
#include "viboost/vlog.hpp"

namespace viboost {

class ScaleGuardError : public DomainError {
 public:
  using DomainError::DomainError;
};

inline constexpr std::size_t kGibbsMaxStumps = 10;
inline constexpr std::size_t kGibbsMaxExamples = 20;

struct GibbsHyper {
  double mu0 = 1.0;
  double mu0_prime = 1.0;
  double zeta1 = 1.0;
  double zeta2 = 1.0;
};

struct GibbsState {
  std::vector<double> c;
  double xi = 0.0;
  std::vector<int> w;
  double theta = 0.5;

  static GibbsState initial(std::size_t m, std::size_t n) {
    return {std::vector<double>(m, 0.0), 0.0, std::vector<int>(n, 1), 0.5};
  }
};

struct GibbsTrace {
  std::vector<GibbsState> samples;
  int burnin = 0;
  int thin = 1;
};

/// Full conditional of c_i: slopes [+1, -1, -y_n f_i(x_n)], knots
/// [0, 0, -f~_i(x_n) f_i(x_n)], multiplicities [mu0, mu0, w_n], where
/// f~_i = sum_{m != i} c_m f_m.
inline VLogParams conditional_c(std::size_t i, const GibbsState& s, std::span<const int> labels,
                                const StumpSpace& space, double mu0) {
  if (i >= space.size() || i >= s.c.size()) throw DomainError("conditional_c: index out of range");
  const std::size_t n = labels.size();
  std::vector<double> slopes{1.0, -1.0};
  std::vector<double> knots{0.0, 0.0};
  std::vector<double> mult{mu0, mu0};
  for (std::size_t k = 0; k < n; ++k) {
    double others = 0.0;
    for (std::size_t m = 0; m < space.size(); ++m) {
      if (m != i) others += s.c[m] * space.prediction(m, k);
    }
    const double f = space.prediction(i, k);
    slopes.push_back(-labels[k] * f);
    knots.push_back(-others * f);
    mult.push_back(static_cast<double>(s.w[k]));
  }
  return VLogParams(std::move(slopes), std::move(knots), std::move(mult));
}

/// Multiplicities [omega1, omega2] of the xi conditional v-Log([+1,-1], 0, .).
inline std::pair<double, double> conditional_xi(const GibbsState& s, std::span<const int> labels,
                                                double mu0_prime) {
  double neg = mu0_prime;
  double pos = mu0_prime;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    (labels[n] == -1 ? neg : pos) += 1.0 - s.w[n];
  }
  return {neg, pos};
}

/// P(w_i = 1 | rest) for label y with ensemble output f and noise grade xi.
inline double conditional_w(double theta, int y, double f, double xi) {
  if (theta <= 0.0) return 0.0;
  if (theta >= 1.0) return 1.0;
  const double log_true = std::log(theta) - numerics::log1pexp(-y * f);
  const double log_noise = std::log1p(-theta) - numerics::log1pexp(-y * xi);
  return numerics::sigmoid(log_true - log_noise);
}

/// Parameters (a, b) of the Beta conditional of theta.
inline std::pair<double, double> conditional_theta(const GibbsState& s, double zeta1,
                                                   double zeta2) {
  double ones = 0.0;
  for (int w : s.w) ones += w;
  return {zeta1 + ones, zeta2 + (static_cast<double>(s.w.size()) - ones)};
}

/// Slice updates applied to each c_i per sweep, continuing from its current value.
inline constexpr int kGibbsSliceSteps = 3;

/// One systematic scan: every c_i, then xi, every w_i, then theta.
inline void gibbs_sweep(GibbsState& s, std::span<const int> labels, const StumpSpace& space,
                        const GibbsHyper& hyper, Rng& rng) {
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < s.c.size(); ++i) {
    const auto cond = conditional_c(i, s, labels, space, hyper.mu0);
    const double curv = neg_log_density_curvature(cond, s.c[i]);
    const double width = 2.0 / std::sqrt(std::max(curv, 1e-3));
    double ci = s.c[i];
    for (int k = 0; k < kGibbsSliceSteps; ++k) {
      ci = slice_step([&cond](double z) { return unnorm_log_density(cond, z); }, ci, width, rng);
    }
    s.c[i] = ci;
  }

  const auto [omega1, omega2] = conditional_xi(s, labels, hyper.mu0_prime);
  s.xi = sample(VLogParams::two_term(1.0, 0.0, omega1, omega2), rng);

  for (std::size_t k = 0; k < n; ++k) {
    double f = 0.0;
    for (std::size_t m = 0; m < s.c.size(); ++m) f += s.c[m] * space.prediction(m, k);
    s.w[k] = bernoulli(rng, conditional_w(s.theta, labels[k], f, s.xi)) ? 1 : 0;
  }

  const auto [a, b] = conditional_theta(s, hyper.zeta1, hyper.zeta2);
  s.theta = beta_draw(rng, a, b);
}

/// Runs `iters` sweeps and keeps every `thin`-th state after `burnin`.
/// Refuses instances beyond the micro scale this sampler is meant for.
inline GibbsTrace run_gibbs(std::span<const int> labels, const StumpSpace& space,
                            const GibbsHyper& hyper, int iters, int burnin, int thin, Rng& rng,
                            GibbsState init = {}) {
  if (space.size() > kGibbsMaxStumps || labels.size() > kGibbsMaxExamples) {
    throw ScaleGuardError("run_gibbs: micro instances only (at most 10 stumps and 20 examples)");
  }
  if (space.examples != labels.size()) {
    throw DomainError("run_gibbs: stump space was built for a different dataset");
  }
  if (burnin < 0 || thin < 1 || iters <= burnin) {
    throw DomainError("run_gibbs: need iters > burnin >= 0 and thin >= 1");
  }
  if (init.c.empty() && init.w.empty()) init = GibbsState::initial(space.size(), labels.size());
  if (init.c.size() != space.size() || init.w.size() != labels.size()) {
    throw DomainError("run_gibbs: initial state has the wrong shape");
  }
  GibbsTrace trace{{}, burnin, thin};
  trace.samples.reserve(static_cast<std::size_t>((iters - burnin) / thin + 1));
  GibbsState s = std::move(init);
  for (int t = 0; t < iters; ++t) {
    gibbs_sweep(s, labels, space, hyper, rng);
    if (t >= burnin && (t - burnin) % thin == 0) trace.samples.push_back(s);
  }
  return trace;
}

struct GibbsSummary {
  double theta = 0.0;
  double xi = 0.0;
  std::vector<double> c;
  std::vector<double> w;
};

inline GibbsSummary posterior_means(const GibbsTrace& trace) {
  GibbsSummary out;
  if (trace.samples.empty()) return out;
  out.c.assign(trace.samples.front().c.size(), 0.0);
  out.w.assign(trace.samples.front().w.size(), 0.0);
  for (const auto& s : trace.samples) {
    out.theta += s.theta;
    out.xi += s.xi;
    for (std::size_t i = 0; i < s.c.size(); ++i) out.c[i] += s.c[i];
    for (std::size_t i = 0; i < s.w.size(); ++i) out.w[i] += s.w[i];
  }
  const double inv = 1.0 / static_cast<double>(trace.samples.size());
  out.theta *= inv;
  out.xi *= inv;
  for (double& v : out.c) v *= inv;
  for (double& v : out.w) v *= inv;
  return out;
}

/// One row per retained sweep: sweep,theta,xi,c_0..c_{M-1},w_0..w_{N-1}.
inline void write_trace_csv(std::ostream& os, const GibbsTrace& trace) {
  os << "# viboost-lab v1\n";
  os << "sweep,theta,xi";
  const std::size_t m = trace.samples.empty() ? 0 : trace.samples.front().c.size();
  const std::size_t n = trace.samples.empty() ? 0 : trace.samples.front().w.size();
  for (std::size_t i = 0; i < m; ++i) os << ",c_" << i;
  for (std::size_t i = 0; i < n; ++i) os << ",w_" << i;
  os << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const auto& s = trace.samples[k];
    os << trace.burnin + static_cast<int>(k) * trace.thin << ',' << s.theta << ',' << s.xi;
    for (double c : s.c) os << ',' << c;
    for (int w : s.w) os << ',' << w;
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace viboost
