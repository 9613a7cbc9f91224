#pragma once

// Random-stream helpers shared by the samplers and data generators.

#include <cmath>
#include <cstdint>
#include <random>

namespace viboost {

using Rng = std::mt19937_64;

/// Uniform draw on the open interval (0, 1).
inline double uniform01(Rng& rng) {
  // 53 random bits, shifted off zero by half an ulp.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// log of a Gamma(shape, 1) draw. Small shapes are boosted by one and
/// corrected with U^{1/shape} in log space so the result never underflows.
inline double log_gamma_draw(Rng& rng, double shape) {
  if (shape < 1.0) {
    std::gamma_distribution<double> g(shape + 1.0, 1.0);
    return std::log(g(rng)) + std::log(uniform01(rng)) / shape;
  }
  std::gamma_distribution<double> g(shape, 1.0);
  return std::log(g(rng));
}

/// Draw from Beta(a, b) through a pair of Gamma variates.
inline double beta_draw(Rng& rng, double a, double b) {
  const double la = log_gamma_draw(rng, a);
  const double lb = log_gamma_draw(rng, b);
  // a/(a+b) = 1/(1 + e^{lb - la})
  const double t = lb - la;
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

/// SplitMix64 finalizer; used to derive independent per-repeat seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace viboost
