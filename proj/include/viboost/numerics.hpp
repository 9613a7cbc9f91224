#pragma once

// Scalar special functions, 1-D minimization and real-line quadrature.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "viboost/error.hpp"

namespace viboost::numerics {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 1 << 16;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw DomainError("QuadratureConfig: tolerances must be positive");
    }
    if (max_subdivisions < 1) {
      throw DomainError("QuadratureConfig: max_subdivisions must be >= 1");
    }
  }
};

struct Bracket {
  double lo;
  double hi;
};

inline constexpr double kDefaultGoldenTol = 1e-8;

/// log(1 + e^z), written as log(1 + e^{-|z|}) + max(z, 0) so it never overflows.
inline double log1pexp(double z) noexcept {
  return std::log1p(std::exp(-std::fabs(z))) + std::max(z, 0.0);
}

/// Logistic function 1 / (1 + e^{-z}) without overflow in either tail.
inline double sigmoid(double z) noexcept {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(sum exp(v)); entries equal to -inf are ignored. Returns -inf for an empty sum.
inline double log_sum_exp(std::span<const double> v) noexcept {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// Digamma function psi(x) for x > 0.
///
/// Shifts the argument up to x >= 6 with psi(x) = psi(x + 1) - 1/x, then
/// applies the asymptotic expansion in 1/x^2 through the x^-14 term. The
/// truncation error at x = 6 is below 1e-13.
inline double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("digamma: argument must be finite and positive, got " + std::to_string(x));
  }
  double shift = 0.0;
  while (x < 6.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number coefficients B_2k / (2k).
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

/// Minimizes a unimodal f on [bracket.lo, bracket.hi] by golden-section search.
///
/// Returns a point within tol of the minimizer. Throws BracketError when an
/// interior probe rises above both of its neighbours, which cannot happen for
/// a unimodal function.
template <class F>
double golden_section_min(F&& f, Bracket bracket, double tol = kDefaultGoldenTol) {
  if (!(bracket.lo < bracket.hi)) {
    throw DomainError("golden_section_min: bracket requires lo < hi");
  }
  if (!(tol > 0.0)) {
    throw DomainError("golden_section_min: tol must be positive");
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto violates = [](double mid, double left, double right) {
    const double top = std::max(left, right);
    return mid > top + 1e-12 * (1.0 + std::fabs(top));
  };

  double a = bracket.lo;
  double b = bracket.hi;
  double fa = f(a);
  double fb = f(b);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);

  while ((b - a) > 2.0 * tol) {
    if (violates(fc, fa, fd) || violates(fd, fc, fb)) {
      throw BracketError("golden_section_min: function is not unimodal on the bracket");
    }
    if (fc <= fd) {
      b = d;
      fb = fd;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      fa = fc;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    // Interval below representable resolution.
    if (!(c > a) || !(d < b)) break;
  }
  return 0.5 * (a + b);
}

namespace detail {

struct SimpsonPanel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
  double eps;
};

inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

}  // namespace detail

/// Adaptive Simpson quadrature of h over the finite interval [a, b].
template <class H>
double adaptive_simpson(H&& h, double a, double b, const QuadratureConfig& cfg) {
  cfg.validate();
  using detail::SimpsonPanel;

  // A fixed initial partition makes sure narrow features near the centre are sampled.
  constexpr int kInitialPanels = 16;
  std::vector<SimpsonPanel> stack;
  stack.reserve(64);
  std::vector<double> xs(2 * kInitialPanels + 1);
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
    fs[i] = h(xs[i]);
  }
  double coarse = 0.0;
  for (int p = 0; p < kInitialPanels; ++p) {
    coarse += detail::simpson(xs[2 * p], xs[2 * p + 2], fs[2 * p], fs[2 * p + 1], fs[2 * p + 2]);
  }
  const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(coarse));
  for (int p = kInitialPanels - 1; p >= 0; --p) {
    const auto i = static_cast<std::size_t>(2 * p);
    stack.push_back({xs[i], xs[i + 1], xs[i + 2], fs[i], fs[i + 1], fs[i + 2],
                     detail::simpson(xs[i], xs[i + 2], fs[i], fs[i + 1], fs[i + 2]),
                     target / kInitialPanels});
  }

  double total = 0.0;
  int subdivisions = 0;
  while (!stack.empty()) {
    const SimpsonPanel p = stack.back();
    stack.pop_back();
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = h(lm);
    const double frm = h(rm);
    const double left = detail::simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = detail::simpson(p.m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    if (std::fabs(delta) <= 15.0 * p.eps) {
      total += left + right + delta / 15.0;
      continue;
    }
    if (++subdivisions > cfg.max_subdivisions) {
      throw ConvergenceError("adaptive_simpson: subdivision budget exhausted before tolerance met");
    }
    stack.push_back({p.m, rm, p.b, p.fm, frm, p.fb, right, 0.5 * p.eps});
    stack.push_back({p.a, lm, p.m, p.fa, flm, p.fm, left, 0.5 * p.eps});
  }
  return total;
}

/// Integral of g over the whole real line.
///
/// Uses z = tan(u) so the integral becomes one over (-pi/2, pi/2) with
/// integrand g(tan u) sec^2 u, which is taken to be 0 at both endpoints.
template <class G>
double integrate_real_line(G&& g, const QuadratureConfig& cfg = {}) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  auto transformed = [&g](double u) {
    if (u <= -half_pi || u >= half_pi) return 0.0;
    const double value = g(std::tan(u));
    if (value == 0.0) return 0.0;
    const double c = std::cos(u);
    return value / (c * c);
  };
  return adaptive_simpson(transformed, -half_pi, half_pi, cfg);
}

}  // namespace viboost::numerics
