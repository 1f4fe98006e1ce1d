#pragma once

// Large-sample approximations: Pearson chi-square, Woolf standard error of the
// log odds ratio, and Wald tests and limits.

#include "compat/exact.hpp"
#include "compat/interval.hpp"
#include "compat/table.hpp"

namespace compat {

struct Chi2Result {
  double t = 0.0;
  int df = 1;
  double p = 1.0;
};

// Uncorrected Pearson statistic against independence. Throws
// ZeroExpectedCount when a margin is zero.
Chi2Result pearson_chi2(const Table2x2& t);

// Expected exposed-case count with the observed margins when the odds ratio is
// psi (the root of E (n0 - m1 + E) = psi (n1 - E)(m1 - E)).
double expected_exposed_cases(const Table2x2& t, double psi);

// Pearson statistic against a general hypothesis OR = psi, with expected
// counts fitted under psi given the margins. Equals pearson_chi2 at psi = 1.
Chi2Result pearson_chi2_at(const Table2x2& t, double psi);

// Limits where the Pearson P-value crosses alpha.
IntervalEstimate pearson_limits(const Table2x2& t, double alpha);

enum class SeCorrection { None, Haldane };

// sqrt(1/a + 1/b + 1/c + 1/d). Haldane adds 0.5 to every cell; it is only
// meant for sparse-data experiments. Throws ZeroCell without the correction.
double log_or_se(const Table2x2& t, SeCorrection correction = SeCorrection::None);

// Log odds ratio matching log_or_se's correction.
double log_or_estimate(const Table2x2& t, SeCorrection correction = SeCorrection::None);

struct WaldInput {
  double b = 0.0;   // estimate, log-OR scale
  double se = 1.0;  // standard error of b
  double c = 0.0;   // hypothesized value, log-OR scale
};

// Two-sided 2 Phi(-|b - c| / se).
double wald_p(const WaldInput& in);

// exp(b -/+ z se) with z the upper alpha/2 normal quantile. alpha = 1 gives a
// zero-width interval at exp(b).
IntervalEstimate wald_limits(double b, double se, double alpha);

// Exact, Pearson and Wald results for one hypothesis side by side. Wald
// fields are NaN when a cell is zero.
struct MethodComparison {
  double psi = 1.0;
  double alpha = 0.05;
  ExactPValue exact;
  Chi2Result pearson;
  double wald_p = 0.0;
  IntervalEstimate exact_interval;
  IntervalEstimate pearson_interval;
  IntervalEstimate wald_interval;
};

MethodComparison compare_methods(const Table2x2& t, double psi, double alpha,
                                 const ExactOptions& opts = {});

}  // namespace compat
