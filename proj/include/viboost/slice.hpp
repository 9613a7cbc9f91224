#pragma once

#include <cmath>

#include "viboost/error.hpp"
#include "viboost/random.hpp"

namespace viboost {

/// One univariate slice-sampling update (stepping out, then shrinkage).
///
/// log_density may be unnormalized. For a log-concave target every slice is a
/// single interval, so the update leaves the target exactly invariant.
template <class LogDensity>
double slice_step(LogDensity&& log_density, double x0, double width, Rng& rng,
                  int max_step_out = 1 << 20) {
  const double level = log_density(x0) + std::log(uniform01(rng));
  double left = x0 - width * uniform01(rng);
  double right = left + width;
  int steps = 0;
  while (log_density(left) > level) {
    left -= width;
    if (++steps > max_step_out) throw NumericError("slice_step: stepping out did not terminate");
  }
  steps = 0;
  while (log_density(right) > level) {
    right += width;
    if (++steps > max_step_out) throw NumericError("slice_step: stepping out did not terminate");
  }
  for (;;) {
    const double x = left + (right - left) * uniform01(rng);
    if (log_density(x) > level) return x;
    if (x < x0) {
      left = x;
    } else {
      right = x;
    }
    if (!(right > left)) return x0;
  }
}

}  // namespace viboost
