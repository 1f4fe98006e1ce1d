#include "compat/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "compat/error.hpp"
#include "compat/special.hpp"
#include "roots.hpp"

namespace compat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidAlpha, "alpha must lie in (0, 1)");
  }
}

void check_margins_positive(const Table2x2& t) {
  if (t.cases() == 0 || t.noncases() == 0 || t.exposed() == 0 || t.unexposed() == 0) {
    throw Error(ErrorKind::ZeroExpectedCount,
                "a zero margin gives a zero expected count in table " + t.to_string());
  }
}

}  // namespace

Chi2Result pearson_chi2(const Table2x2& t) {
  check_margins_positive(t);
  const auto expected = summarize(t).expected;
  const auto observed = t.cells();
  double stat = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double diff = static_cast<double>(observed[i]) - expected[i];
    stat += diff * diff / expected[i];
  }
  return {stat, 1, special::chi2_1_upper_tail(stat)};
}

double expected_exposed_cases(const Table2x2& t, double psi) {
  check_margins_positive(t);
  if (!(psi > 0.0) || !std::isfinite(psi)) {
    throw Error(ErrorKind::InvalidPsi, "odds ratio must be positive and finite");
  }
  const auto n1 = static_cast<double>(t.exposed());
  const auto m1 = static_cast<double>(t.cases());
  const auto n0 = static_cast<double>(t.unexposed());
  double lo = std::max(0.0, m1 - n0);
  double hi = std::min(n1, m1);
  const double log_psi = std::log(psi);
  // Fitted log odds ratio of the table with exposed-case count e; increasing in e.
  const auto fitted = [&](double e) {
    return std::log(e) + std::log(n0 - m1 + e) - std::log(n1 - e) - std::log(m1 - e);
  };
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (fitted(mid) < log_psi ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Chi2Result pearson_chi2_at(const Table2x2& t, double psi) {
  const double e = expected_exposed_cases(t, psi);
  const auto n1 = static_cast<double>(t.exposed());
  const auto m1 = static_cast<double>(t.cases());
  const auto n0 = static_cast<double>(t.unexposed());
  const double diff = static_cast<double>(t.a()) - e;
  // All four cells deviate from expectation by the same |diff|.
  const double inv = 1.0 / e + 1.0 / (n1 - e) + 1.0 / (m1 - e) + 1.0 / (n0 - m1 + e);
  const double stat = diff * diff * inv;
  return {stat, 1, special::chi2_1_upper_tail(stat)};
}

IntervalEstimate pearson_limits(const Table2x2& t, double alpha) {
  check_alpha(alpha);
  check_margins_positive(t);
  IntervalEstimate iv{0.0, kInf, alpha, IntervalMethod::PearsonInversion};
  const double critical = std::pow(special::normal_upper_quantile(0.5 * alpha), 2);
  const double est = log_sample_or(t);
  const double start = std::isfinite(est) ? est : 0.0;
  const auto stat = [&](double x) { return pearson_chi2_at(t, std::exp(x)).t; };
  // The statistic falls to zero at the sample odds ratio and grows on either side.
  if (est > -kInf) {
    iv.lower = std::exp(detail::solve_decreasing(stat, critical, start));
  }
  if (est < kInf) {
    iv.upper = std::exp(detail::solve_increasing(stat, critical, start));
  }
  return iv;
}

double log_or_se(const Table2x2& t, SeCorrection correction) {
  const double add = correction == SeCorrection::Haldane ? 0.5 : 0.0;
  if (correction == SeCorrection::None && (t.a() == 0 || t.b() == 0 || t.c() == 0 || t.d() == 0)) {
    throw Error(ErrorKind::ZeroCell, "Woolf standard error needs four nonzero cells, got " +
                                         t.to_string());
  }
  double v = 0.0;
  for (Count cell : t.cells()) v += 1.0 / (static_cast<double>(cell) + add);
  return std::sqrt(v);
}

double log_or_estimate(const Table2x2& t, SeCorrection correction) {
  if (correction == SeCorrection::None) return log_sample_or(t);
  const auto c = t.cells();
  return std::log(static_cast<double>(c[0]) + 0.5) + std::log(static_cast<double>(c[3]) + 0.5) -
         std::log(static_cast<double>(c[1]) + 0.5) - std::log(static_cast<double>(c[2]) + 0.5);
}

double wald_p(const WaldInput& in) {
  if (!(in.se > 0.0)) throw Error(ErrorKind::NonpositiveSE, "standard error must be positive");
  const double z = std::abs(in.b - in.c) / in.se;
  return 2.0 * special::normal_cdf(-z);
}

IntervalEstimate wald_limits(double b, double se, double alpha) {
  if (!(se > 0.0)) throw Error(ErrorKind::NonpositiveSE, "standard error must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidAlpha, "alpha must lie in (0, 1]");
  }
  const double z = alpha == 1.0 ? 0.0 : special::normal_upper_quantile(0.5 * alpha);
  return {std::exp(b - z * se), std::exp(b + z * se), alpha, IntervalMethod::Wald};
}

MethodComparison compare_methods(const Table2x2& t, double psi, double alpha,
                                 const ExactOptions& opts) {
  MethodComparison out;
  out.psi = psi;
  out.alpha = alpha;
  out.exact = exact_p(t, psi, opts);
  out.exact_interval = exact_limits(t, alpha, opts);
  out.pearson = pearson_chi2_at(t, psi);
  out.pearson_interval = pearson_limits(t, alpha);
  if (t.a() > 0 && t.b() > 0 && t.c() > 0 && t.d() > 0) {
    const double b = log_sample_or(t);
    const double se = log_or_se(t);
    out.wald_p = wald_p({b, se, std::log(psi)});
    out.wald_interval = wald_limits(b, se, alpha);
  } else {
    out.wald_p = kNaN;
    out.wald_interval = {kNaN, kNaN, alpha, IntervalMethod::Wald};
  }
  return out;
}

}  // namespace compat
