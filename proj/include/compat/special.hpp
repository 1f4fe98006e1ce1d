#pragma once

// Special functions shared by the inference modules.

#include <cstdint>

namespace compat::special {

// ln(n!) for n >= 0. Tabulated for small n, Stirling series above.
double log_factorial(std::int64_t n);

// ln C(n, k); -inf when k is outside [0, n].
double log_choose(std::int64_t n, std::int64_t k);

// Standard normal CDF.
double normal_cdf(double z);

// Upper quantile z with Pr(Z > z) = q, for q in (0, 1).
double normal_upper_quantile(double q);

// Pr(chi2_1 >= t).
double chi2_1_upper_tail(double t);

}  // namespace compat::special
