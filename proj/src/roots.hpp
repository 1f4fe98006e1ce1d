#pragma once

#include <cmath>
#include <limits>

namespace compat::detail {

// Log-psi range beyond which a root is treated as 0 or +inf.
inline constexpr double kLogPsiLimit = 700.0;
inline constexpr double kLogPsiTolerance = 1e-10;

// Solves f(x) = target for f nondecreasing in x, starting the bracket search at
// `start` and widening geometrically. Returns -inf/+inf when the crossing lies
// outside [-kLogPsiLimit, kLogPsiLimit].
template <typename F>
double solve_increasing(F&& f, double target, double start) {
  double lo = start;
  double hi = start;
  if (f(start) < target) {
    double step = 1.0;
    do {
      lo = hi;
      hi = start + step;
      step *= 2.0;
      if (hi > kLogPsiLimit) {
        hi = kLogPsiLimit;
        if (f(hi) < target) return std::numeric_limits<double>::infinity();
        break;
      }
    } while (f(hi) < target);
  } else {
    double step = 1.0;
    do {
      hi = lo;
      lo = start - step;
      step *= 2.0;
      if (lo < -kLogPsiLimit) {
        lo = -kLogPsiLimit;
        if (f(lo) >= target) return -std::numeric_limits<double>::infinity();
        break;
      }
    } while (f(lo) >= target);
  }
  // Invariant: f(lo) < target <= f(hi).
  while (hi - lo > kLogPsiTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <typename F>
double solve_decreasing(F&& f, double target, double start) {
  return solve_increasing([&](double x) { return -f(x); }, -target, start);
}

}  // namespace compat::detail
