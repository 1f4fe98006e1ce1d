#pragma once

// Monte Carlo checks of repeated-sampling claims: interval coverage,
// sparse-data bias of the log odds ratio, and estimate inflation under a
// significance filter.
//
// Every replicate r of a run with seed s draws its table from Philox
// substream (s, r), consuming two uniforms. Runs that share a scenario and a
// seed therefore see identical tables, which is how exact-vs-Wald comparisons
// are paired.

#include <cstdint>

#include "compat/sampling.hpp"

namespace compat {

enum class CoverageMethod { Exact, Wald };

std::string_view to_string(CoverageMethod m);
CoverageMethod coverage_method_from_string(std::string_view s);

inline constexpr std::int64_t kDefaultSims = 10000;

// estimate: fraction of defined intervals containing or_pop.
// extras: undefined_fraction (Wald with a zero cell), coverage_undefined_as_miss.
SimReport coverage_sim(const Scenario& sc, CoverageMethod method, double alpha,
                       std::int64_t n_sims, std::uint64_t seed);

// estimate: mean of (finite sample log OR - ln or_pop). Dropping the
// infinite estimates removes the most extreme tables, so in very sparse
// scenarios this mean can sit below zero while the median over all defined
// estimates sits above it.
// extras: median_error (finite), median_mc_error, median_error_with_infinite,
// infinite_fraction, undefined_fraction (0/0 tables), finite_count.
SimReport sparse_bias_sim(const Scenario& sc, std::int64_t n_sims, std::uint64_t seed);

// estimate: mean |sample log OR| among finite replicates whose null P-value is
// <= alpha. extras: overall_mean_abs, true_abs_log_or, inflation_ratio (to
// the true value), selected_fraction, undefined_fraction.
SimReport significance_filter_sim(const Scenario& sc, double alpha, std::int64_t n_sims,
                                  std::uint64_t seed, TestMethod test = TestMethod::Exact);

}  // namespace compat
