#pragma once

// Seeded generators and independent reference computations shared by the
// unit tests and the acceptance binary. Nothing here calls into the library
// routine it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "viboost/vlog.hpp"

namespace testing_support {

using Gen = std::mt19937_64;

inline double uniform(Gen& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline int coin(Gen& g) { return std::bernoulli_distribution(0.5)(g) ? 1 : -1; }

/// Random valid v-Log with K in [2, max_k]; entries 0 and 1 guarantee validity.
inline viboost::VLogParams random_vlog(Gen& g, int max_k = 8, bool unit_slopes = false) {
  const int k = std::uniform_int_distribution<int>(2, max_k)(g);
  std::vector<double> slopes(k), knots(k), mult(k);
  for (int i = 0; i < k; ++i) {
    const double mag = unit_slopes ? 1.0 : uniform(g, 0.2, 3.0);
    slopes[i] = i == 0 ? mag : i == 1 ? -mag : coin(g) * mag;
    knots[i] = uniform(g, -4.0, 4.0);
    mult[i] = i < 2 ? uniform(g, 0.2, 4.0) : (uniform(g, 0, 1) < 0.15 ? 0.0 : uniform(g, 0, 4.0));
  }
  return viboost::VLogParams(std::move(slopes), std::move(knots), std::move(mult));
}

/// Direct product form of the unnormalized density, evaluated naively.
inline double naive_density(const viboost::VLogParams& p, double z) {
  double v = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    v *= std::pow(1.0 + std::exp(p.slopes[k] * (z - p.knots[k])), -p.multiplicities[k]);
  }
  return v;
}

/// Naive log of the unnormalized density, safe for moderate |z|.
inline double naive_log_density(const viboost::VLogParams& p, double z) {
  double v = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double t = p.slopes[k] * (z - p.knots[k]);
    v -= p.multiplicities[k] * (t > 30.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)));
  }
  return v;
}

/// Digamma by upward recurrence to x >= 20 and the asymptotic series through x^-18.
inline double digamma_oracle(double x) {
  double acc = 0.0;
  while (x < 20.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // B_{2k} / (2k) for k = 1..9
  static constexpr double c[] = {1.0 / 12,         -1.0 / 120,       1.0 / 252,
                                 -1.0 / 240,       1.0 / 132,        -691.0 / 32760,
                                 1.0 / 12,         -3617.0 / 8160,   43867.0 / 14364};
  const double inv2 = 1.0 / (x * x);
  double pow = inv2;
  double series = 0.0;
  for (double ck : c) {
    series += ck * pow;
    pow *= inv2;
  }
  return acc + std::log(x) - 0.5 / x - series;
}

/// Composite trapezoid rule of f on [a, b] with step h.
template <class F>
double trapezoid(F&& f, double a, double b, double h) {
  const auto n = static_cast<long>(std::llround((b - a) / h));
  double s = 0.5 * (f(a) + f(b));
  for (long i = 1; i < n; ++i) s += f(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
  return s * (b - a) / static_cast<double>(n);
}

/// Minimizer of f over a uniform grid on [a, b].
template <class F>
double grid_argmin(F&& f, double a, double b, double h) {
  double best = a;
  double best_v = f(a);
  const auto n = static_cast<long>(std::llround((b - a) / h));
  for (long i = 1; i <= n; ++i) {
    const double z = a + h * static_cast<double>(i);
    const double v = f(z);
    if (v < best_v) {
      best_v = v;
      best = z;
    }
  }
  return best;
}

/// Tabulated CDF of a v-Log on [lo, hi] by trapezoid integration of the
/// density relative to its peak.
struct TabulatedCdf {
  double lo = 0.0;
  double h = 0.0;
  std::vector<double> cdf;

  double operator()(double z) const {
    if (z <= lo) return 0.0;
    const double pos = (z - lo) / h;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= cdf.size()) return 1.0;
    const double frac = pos - static_cast<double>(i);
    return cdf[i] + frac * (cdf[i + 1] - cdf[i]);
  }
};

inline TabulatedCdf tabulate_cdf(const viboost::VLogParams& p, double lo, double hi, double h) {
  TabulatedCdf t;
  t.lo = lo;
  t.h = h;
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / h));
  std::vector<double> logd(n + 1);
  double peak = -1e300;
  for (std::size_t i = 0; i <= n; ++i) {
    logd[i] = naive_log_density(p, lo + h * static_cast<double>(i));
    peak = std::max(peak, logd[i]);
  }
  t.cdf.assign(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    t.cdf[i] = t.cdf[i - 1] + 0.5 * h * (std::exp(logd[i - 1] - peak) + std::exp(logd[i] - peak));
  }
  const double total = t.cdf.back();
  for (double& c : t.cdf) c /= total;
  return t;
}

/// One-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&v](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i] / n;
    mb += rb[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// Brute-force posterior of the static noise model on a micro instance:
/// exact enumeration over w, trapezoid grids over c (one axis per stump) and
/// xi, and the Beta integral over theta in closed form.
struct MicroPosterior {
  double mean_theta = 0.0;
  std::vector<double> w_marginal;  ///< P(w = pattern | y), pattern bit n is w_n
};

inline double log_sigmoid(double t) {
  return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}

inline MicroPosterior micro_posterior(const std::vector<int>& y,
                                      const std::vector<std::vector<int>>& f,  // f[m][n]
                                      double mu0, double mu0_prime, double zeta1, double zeta2,
                                      double half_width = 20.0, double step = 0.2) {
  const std::size_t n = y.size();
  const std::size_t m = f.size();
  const std::size_t patterns = std::size_t{1} << n;
  const auto pts = static_cast<std::size_t>(std::llround(2.0 * half_width / step)) + 1;
  std::vector<double> grid(pts);
  std::vector<double> trap(pts, step);
  for (std::size_t i = 0; i < pts; ++i) grid[i] = -half_width + step * static_cast<double>(i);
  trap.front() = trap.back() = 0.5 * step;

  auto log_prior = [](double z, double mu) { return mu * (log_sigmoid(z) + log_sigmoid(-z)); };

  // L_c(w) = sum over the c grid of prior(c) * prod_{n: w_n = 1} sigmoid(y_n F_c(x_n))
  std::vector<double> lc(patterns, 0.0);
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> term(n);
  std::vector<double> prod(patterns);
  for (;;) {
    double weight = 1.0;
    double lp = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      weight *= trap[idx[k]];
      lp += log_prior(grid[idx[k]], mu0);
    }
    for (std::size_t j = 0; j < n; ++j) {
      double fx = 0.0;
      for (std::size_t k = 0; k < m; ++k) fx += grid[idx[k]] * f[k][j];
      term[j] = std::exp(log_sigmoid(y[j] * fx));
    }
    prod[0] = weight * std::exp(lp);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t half = std::size_t{1} << j;
      for (std::size_t s = 0; s < half; ++s) prod[s | half] = prod[s] * term[j];
    }
    for (std::size_t s = 0; s < patterns; ++s) lc[s] += prod[s];
    std::size_t k = 0;
    while (k < m && ++idx[k] == pts) idx[k++] = 0;
    if (k == m) break;
  }

  // L_xi(w) = sum over the xi grid of prior(xi) * prod_{n: w_n = 0} sigmoid(y_n xi)
  std::vector<double> lx(patterns, 0.0);
  for (std::size_t i = 0; i < pts; ++i) {
    const double xi = grid[i];
    const double base = trap[i] * std::exp(log_prior(xi, mu0_prime));
    for (std::size_t s = 0; s < patterns; ++s) {
      double v = base;
      for (std::size_t j = 0; j < n; ++j) {
        if (!((s >> j) & 1U)) v *= std::exp(log_sigmoid(y[j] * xi));
      }
      lx[s] += v;
    }
  }

  MicroPosterior out;
  out.w_marginal.assign(patterns, 0.0);
  double total = 0.0;
  double theta_acc = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t s = 0; s < patterns; ++s) {
    double k = 0.0;
    for (std::size_t j = 0; j < n; ++j) k += static_cast<double>((s >> j) & 1U);
    const double log_beta = std::lgamma(zeta1 + k) + std::lgamma(zeta2 + nn - k) -
                            std::lgamma(zeta1 + zeta2 + nn);
    const double w = lc[s] * lx[s] * std::exp(log_beta);
    out.w_marginal[s] = w;
    total += w;
    theta_acc += w * (zeta1 + k) / (zeta1 + zeta2 + nn);
  }
  for (double& v : out.w_marginal) v /= total;
  out.mean_theta = theta_acc / total;
  return out;
}

}  // namespace testing_support
