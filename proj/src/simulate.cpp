#include "compat/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "compat/asymptotic.hpp"
#include "compat/error.hpp"
#include "compat/exact.hpp"
#include "compat/parallel.hpp"

namespace compat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_run(std::int64_t n_sims) {
  if (n_sims < 1) throw Error(ErrorKind::InvalidSpec, "n_sims must be at least 1");
}

SimReport base_report(const Scenario& sc, std::string method, std::int64_t n_sims,
                      std::uint64_t seed) {
  SimReport rep;
  rep.scenario = sc;
  rep.method = std::move(method);
  rep.n_sims = n_sims;
  rep.seed = seed;
  return rep;
}

// Draws every replicate's table and applies fn, storing one value per slot.
template <typename T, typename F>
std::vector<T> per_replicate(const Scenario& sc, std::int64_t n_sims, std::uint64_t seed, F&& fn) {
  const TableSampler sampler(sc);
  std::vector<T> out(static_cast<std::size_t>(n_sims));
  parallel_for(out.size(), [&](std::size_t r) {
    Philox4x32 rng(seed, r);
    out[r] = fn(sampler.draw(rng));
  });
  return out;
}

}  // namespace

std::string_view to_string(CoverageMethod m) { return m == CoverageMethod::Exact ? "exact" : "wald"; }

CoverageMethod coverage_method_from_string(std::string_view s) {
  if (s == "exact") return CoverageMethod::Exact;
  if (s == "wald") return CoverageMethod::Wald;
  throw Error(ErrorKind::ParseError, "unknown coverage method '" + std::string(s) + "'");
}

SimReport coverage_sim(const Scenario& sc, CoverageMethod method, double alpha,
                       std::int64_t n_sims, std::uint64_t seed) {
  sc.validate();
  check_run(n_sims);
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidSpec, "alpha must lie in (0, 1)");

  // 0 = miss, 1 = covered, 2 = no interval.
  const auto outcome = per_replicate<char>(sc, n_sims, seed, [&](const Table2x2& t) -> char {
    if (method == CoverageMethod::Exact) {
      return static_cast<char>(exact_limits(t, alpha).contains(sc.or_pop));
    }
    if (t.a() == 0 || t.b() == 0 || t.c() == 0 || t.d() == 0) return 2;
    return static_cast<char>(wald_limits(log_sample_or(t), log_or_se(t), alpha).contains(sc.or_pop));
  });
  std::int64_t covered = 0;
  std::int64_t undefined = 0;
  for (char o : outcome) {
    covered += o == 1;
    undefined += o == 2;
  }
  const std::int64_t defined = n_sims - undefined;

  SimReport rep = base_report(sc, "coverage/" + std::string(to_string(method)), n_sims, seed);
  rep.estimate = defined > 0 ? static_cast<double>(covered) / static_cast<double>(defined) : kNaN;
  rep.mc_error = defined > 0 ? binomial_mc_error(rep.estimate, defined) : kNaN;
  rep.extras["alpha"] = alpha;
  rep.extras["undefined_fraction"] = static_cast<double>(undefined) / static_cast<double>(n_sims);
  const double as_miss = static_cast<double>(covered) / static_cast<double>(n_sims);
  rep.extras["coverage_undefined_as_miss"] = as_miss;
  rep.extras["coverage_undefined_as_miss_mc_error"] = binomial_mc_error(as_miss, n_sims);
  return rep;
}

SimReport sparse_bias_sim(const Scenario& sc, std::int64_t n_sims, std::uint64_t seed) {
  sc.validate();
  check_run(n_sims);
  const double truth = std::log(sc.or_pop);
  // +/-inf for a zero off-diagonal or diagonal cell, NaN when both are zero.
  const auto errors = per_replicate<double>(sc, n_sims, seed, [&](const Table2x2& t) {
    return log_sample_or(t) - truth;
  });
  std::vector<double> finite;
  std::vector<double> defined;
  finite.reserve(errors.size());
  defined.reserve(errors.size());
  for (double e : errors) {
    if (std::isnan(e)) continue;
    defined.push_back(e);
    if (std::isfinite(e)) finite.push_back(e);
  }
  const auto total = static_cast<double>(n_sims);

  SimReport rep = base_report(sc, "sparse-bias", n_sims, seed);
  const auto n = static_cast<double>(finite.size());
  rep.extras["finite_count"] = n;
  rep.extras["infinite_fraction"] = static_cast<double>(defined.size() - finite.size()) / total;
  rep.extras["undefined_fraction"] = 1.0 - static_cast<double>(defined.size()) / total;
  // Median over every defined estimate; infinite ones sort to the ends.
  if (!defined.empty()) {
    const auto mid = defined.begin() + static_cast<std::ptrdiff_t>(defined.size() / 2);
    std::nth_element(defined.begin(), mid, defined.end());
    rep.extras["median_error_with_infinite"] = *mid;
  } else {
    rep.extras["median_error_with_infinite"] = kNaN;
  }
  if (finite.empty()) {
    rep.estimate = kNaN;
    rep.mc_error = kNaN;
    rep.extras["median_error"] = kNaN;
    rep.extras["median_mc_error"] = kNaN;
    return rep;
  }
  double sum = 0.0;
  for (double e : finite) sum += e;
  const double mean = sum / n;
  double ss = 0.0;
  for (double e : finite) ss += (e - mean) * (e - mean);
  const double sd = finite.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  std::sort(finite.begin(), finite.end());
  const std::size_t mid = finite.size() / 2;
  const double median =
      finite.size() % 2 == 1 ? finite[mid] : 0.5 * (finite[mid - 1] + finite[mid]);

  rep.estimate = mean;
  rep.mc_error = sd / std::sqrt(n);
  rep.extras["median_error"] = median;
  // Large-sample standard error of a median under near-normality.
  rep.extras["median_mc_error"] = std::sqrt(std::acos(-1.0) / 2.0) * sd / std::sqrt(n);
  return rep;
}

SimReport significance_filter_sim(const Scenario& sc, double alpha, std::int64_t n_sims,
                                  std::uint64_t seed, TestMethod test) {
  sc.validate();
  check_run(n_sims);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidSpec, "alpha must lie in (0, 1]");

  struct Draw {
    double abs_log_or = kNaN;
    bool selected = false;
  };
  const auto draws = per_replicate<Draw>(sc, n_sims, seed, [&](const Table2x2& t) {
    const double l = log_sample_or(t);
    if (!std::isfinite(l)) return Draw{};
    return Draw{std::abs(l), null_p_value(t, test) <= alpha};
  });

  double all_sum = 0.0;
  double sel_sum = 0.0;
  double sel_sq = 0.0;
  std::int64_t all_n = 0;
  std::int64_t sel_n = 0;
  for (const auto& d : draws) {
    if (std::isnan(d.abs_log_or)) continue;
    all_sum += d.abs_log_or;
    ++all_n;
    if (d.selected) {
      sel_sum += d.abs_log_or;
      sel_sq += d.abs_log_or * d.abs_log_or;
      ++sel_n;
    }
  }

  SimReport rep = base_report(sc, "significance-filter/" + std::string(to_string(test)), n_sims, seed);
  const double truth = std::abs(std::log(sc.or_pop));
  rep.estimate = sel_n > 0 ? sel_sum / static_cast<double>(sel_n) : kNaN;
  if (sel_n > 1) {
    const double var = (sel_sq - sel_sum * rep.estimate) / static_cast<double>(sel_n - 1);
    rep.mc_error = std::sqrt(std::max(0.0, var) / static_cast<double>(sel_n));
  } else {
    rep.mc_error = kNaN;
  }
  rep.extras["alpha"] = alpha;
  rep.extras["overall_mean_abs"] = all_n > 0 ? all_sum / static_cast<double>(all_n) : kNaN;
  rep.extras["true_abs_log_or"] = truth;
  rep.extras["inflation_ratio"] = truth > 0.0 ? rep.estimate / truth : kNaN;
  rep.extras["selected_fraction"] = static_cast<double>(sel_n) / static_cast<double>(n_sims);
  rep.extras["undefined_fraction"] = 1.0 - static_cast<double>(all_n) / static_cast<double>(n_sims);
  return rep;
}

}  // namespace compat
