#include "compat/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

namespace compat::special {

namespace {

constexpr std::int64_t kTableSize = 1 << 16;

// std::lgamma writes the global signgam, so it is only called here, under the
// thread-safe initialization of a function-local static.
const std::vector<double>& factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kTableSize);
    for (std::int64_t n = 0; n < kTableSize; ++n) {
      t[static_cast<std::size_t>(n)] = std::lgamma(static_cast<double>(n) + 1.0);
    }
    return t;
  }();
  return table;
}

double stirling_log_factorial(double n) {
  const double inv = 1.0 / n;
  const double inv2 = inv * inv;
  const double series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
  return n * std::log(n) - n + 0.5 * std::log(2.0 * std::numbers::pi * n) + series;
}

}  // namespace

double log_factorial(std::int64_t n) {
  if (n < 0) return std::numeric_limits<double>::quiet_NaN();
  if (n < kTableSize) return factorial_table()[static_cast<std::size_t>(n)];
  return stirling_log_factorial(static_cast<double>(n));
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_upper_quantile(double q) {
  // Pr(Z > z) = erfc(z / sqrt2) / 2
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double chi2_1_upper_tail(double t) {
  if (t <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * t));
}

}  // namespace compat::special
