// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "compat/asymptotic.hpp"
#include "compat/compatibility.hpp"
#include "compat/decisions.hpp"
#include "compat/exact.hpp"
#include "compat/prior.hpp"
#include "compat/simulate.hpp"
#include "compat/table.hpp"
#include "oracles.hpp"

using namespace compat;

namespace {

const Table2x2 kReference(10, 110, 16, 464);

// Round half away from zero at `digits` decimals.
double at(double x, int digits) {
  const double f = std::pow(10.0, digits);
  return std::round(x * f) / f;
}

bool same(double x, double want, int digits) {
  return std::abs(at(x, digits) - want) < 0.5 * std::pow(10.0, -digits);
}

// Collects failed checks with a short description of each.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  [[nodiscard]] bool ok() const { return failures_.empty(); }
  [[nodiscard]] std::string text() const {
    std::string s = notes_;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + std::string("failed: ") + f;
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string num(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

Checks criterion1() {
  Checks c;
  const auto s = summarize(kReference);
  c.expect(same(s.rd.value, 0.050, 3), "RD = 0.050");
  c.expect(same(s.rr.value, 2.5, 1), "RR = 2.5");
  c.expect(same(s.odds_ratio.value, 2.64, 2), "OR = 2.64 at 2 dp");
  c.expect(same(s.odds_ratio.value, 2.6, 1), "OR = 2.6 at 1 dp");
  // Canonical order: exposed cases, exposed noncases, unexposed cases, unexposed noncases.
  c.expect(same(s.expected[0], 5.2, 1), "expected exposed cases 5.2");
  c.expect(same(s.expected[1], 114.8, 1), "expected exposed noncases 114.8");
  c.expect(same(s.expected[2], 20.8, 1), "expected unexposed cases 20.8");
  c.expect(same(s.expected[3], 459.2, 1), "expected unexposed noncases 459.2");
  c.note("RD=" + num(s.rd.value) + " RR=" + num(s.rr.value) + " OR=" + num(s.odds_ratio.value));
  return c;
}

Checks criterion2() {
  Checks c;
  const auto r = pearson_chi2(kReference);
  c.expect(std::abs(r.t - 5.79) <= 0.01, "chi2 = 5.79 +- 0.01");
  c.expect(r.df == 1, "df = 1");
  c.expect(same(r.p, 0.016, 3), "p = 0.016");
  c.note("chi2=" + num(r.t) + " df=" + std::to_string(r.df) + " p=" + num(r.p, 3));
  return c;
}

Checks criterion3() {
  Checks c;
  for (const auto& [psi, want] : {std::pair{1.0, 0.041}, {2.0, 0.644}, {6.0, 0.070}}) {
    const double p = exact_p(kReference, psi).p;
    c.expect(same(p, want, 3), "p(" + num(psi) + ") = " + num(want));
    c.note("p(" + num(psi) + ")=" + num(p, 5));
  }
  return c;
}

Checks criterion4() {
  Checks c;
  const auto e = cmle_or(kReference);
  c.expect(same(e.estimate, 2.64, 2), "point estimate 2.64");
  const auto iv = exact_limits(kReference, 0.05);
  c.expect(same(iv.lower, 1.04, 2), "lower limit 1.04");
  c.expect(same(iv.upper, 6.36, 2), "upper limit 6.36");
  const double pl = exact_p(kReference, iv.lower).p;
  const double pu = exact_p(kReference, iv.upper).p;
  c.expect(std::abs(pl - 0.05) <= 1e-6, "p at lower limit = 0.05");
  c.expect(std::abs(pu - 0.05) <= 1e-6, "p at upper limit = 0.05");
  c.note("estimate=" + num(e.estimate, 5) + " (cmle " + num(e.cmle, 5) + ") limits=(" +
         num(iv.lower, 5) + ", " + num(iv.upper, 5) + ") |p-0.05|=" +
         num(std::max(std::abs(pl - 0.05), std::abs(pu - 0.05)), 2));
  return c;
}

Checks criterion5() {
  Checks c;
  c.expect(same(s_value(0.041), 4.6, 1), "s(0.041) = 4.6");
  c.expect(same(s_value(0.05), 4.3, 1), "s(0.05) = 4.3");
  c.expect(same(s_value(0.644), 0.6, 1), "s(0.644) = 0.6");
  c.expect(coin_toss_equivalent(0.041) == 5, "n(0.041) = 5");
  const auto br = coin_toss_bracket(0.041);
  c.expect(same(std::exp2(-br.upper), 0.031, 3), "1/2^5 = 0.031");
  c.expect(same(std::exp2(-br.lower), 0.063, 3), "1/2^4 = 0.063");
  c.note("s=" + num(s_value(0.041), 3) + "/" + num(s_value(0.05), 3) + "/" +
         num(s_value(0.644), 3) + " bracket=" + std::to_string(br.lower) + ".." +
         std::to_string(br.upper));
  return c;
}

Checks criterion6() {
  Checks c;
  const double b = bonferroni(0.05, 20);
  c.expect(b == 0.0025, "bonferroni(0.05, 20) = 0.0025");
  const double f1 = familywise_rate(0.05, 20, Independent{}).estimate;
  const double f2 = familywise_rate(0.0025, 20, Independent{}).estimate;
  const double f3 = familywise_rate(0.0025, 20, PerfectlyCorrelated{}).estimate;
  c.expect(same(f1, 0.64, 2), "familywise(0.05, 20) = 0.64");
  c.expect(same(f2, 0.049, 3), "familywise(0.0025, 20) = 0.049");
  c.expect(f3 == 0.0025, "perfectly correlated = 0.0025 exactly");
  c.note("bonferroni=" + num(b) + " fw=" + num(f1) + "/" + num(f2) + "/" + num(f3));
  return c;
}

Checks criterion7() {
  Checks c;
  const auto pd = prior_to_data({1 / 1.2, 1.2, 0.95, RatioScale::OddsRatio});
  c.expect(pd.required_cases_per_arm == 232, "232 cases per arm");
  c.expect(pd.required_total_cases == 464, "464 total");
  c.note("cases per arm " + num(pd.cases_per_arm, 6) + " -> " +
         std::to_string(pd.required_cases_per_arm) + ", total " +
         std::to_string(pd.required_total_cases));
  return c;
}

Checks criterion8() {
  Checks c;
  const auto pd = prior_to_data({1 / 1.2, 1.2, 0.95, RatioScale::OddsRatio});
  const auto fit = augment_and_fit(kReference, pd);
  const double want = oracle::grid_posterior_mode(10, 110, 16, 464, pd.center_log, pd.implied_se);
  c.expect(fit.converged, "fit converged");
  c.expect(std::abs(fit.log_or_posterior - want) <= 1e-3, "posterior mode within 1e-3 of the grid");
  c.expect(std::abs(fit.log_or_posterior) < std::abs(fit.log_or_posterior - fit.frequentist_log_or),
           "posterior mode closer to 0 than to the frequentist estimate");
  c.note("mode=" + num(fit.log_or_posterior, 6) + " grid=" + num(want, 6) +
         " frequentist=" + num(fit.frequentist_log_or, 6));
  return c;
}

Checks criterion9() {
  Checks c;
  std::mt19937_64 gen(20240611);

  // PMF normalization.
  double worst_norm = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Count n = std::uniform_int_distribution<Count>(1, 3000)(gen);
    const Count m1 = std::uniform_int_distribution<Count>(0, n)(gen);
    const Count n1 = std::uniform_int_distribution<Count>(0, n)(gen);
    for (double psi : {0.01, 0.3, 1.0, 2.6364, 40.0}) {
      const NchgDistribution d(m1, n1, n, psi);
      double sum = 0.0;
      for (Count a = d.a_min(); a <= d.a_max(); ++a) sum += d.pmf(a);
      worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
    }
  }
  c.expect(worst_norm <= 1e-12, "normalization <= 1e-12");

  // Every table with N <= 12 against subset enumeration.
  double worst_enum = 0.0;
  for (int n = 1; n <= 12; ++n) {
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; a + b <= n; ++b) {
        for (int cc = 0; a + b + cc <= n; ++cc) {
          const Table2x2 t(a, b, cc, n - a - b - cc);
          for (double psi : {0.25, 1.0, 3.0}) {
            const auto want = oracle::enumerated_pmf(a + cc, a + b, n, psi);
            const auto d = NchgDistribution::for_table(t, psi);
            for (Count k = d.a_min(); k <= d.a_max(); ++k) {
              worst_enum = std::max(
                  worst_enum, std::abs(d.pmf(k) - static_cast<double>(want[static_cast<std::size_t>(k)])));
            }
            worst_enum = std::max(
                worst_enum, std::abs(exact_tail(t, psi, Tail::Upper) -
                                     static_cast<double>(oracle::enumerated_upper(a + cc, a + b, n, psi, a))));
          }
        }
      }
    }
  }
  c.expect(worst_enum <= 1e-12, "enumeration oracle <= 1e-12");

  // Duality: p > alpha exactly on the open interval, away from the limits.
  int duality_bad = 0;
  int tables = 0;
  std::uniform_int_distribution<Count> cell(0, 40);
  while (tables < 200) {
    const Table2x2 t(cell(gen), cell(gen), cell(gen), cell(gen));
    if (t.cases() == 0 || t.noncases() == 0 || t.exposed() == 0 || t.unexposed() == 0) continue;
    ++tables;
    const auto iv = exact_limits(t, 0.05);
    const double step = std::log(10.0) / 50.0;
    for (int k = -200; k <= 200; ++k) {
      const double psi = std::exp(k * step);
      const bool inside = exact_p(t, psi).p > 0.05;
      if (inside == iv.contains(psi)) continue;
      const double near_lo = iv.lower > 0 ? std::abs(std::log(psi / iv.lower)) : 1e9;
      const double near_hi = std::isfinite(iv.upper) ? std::abs(std::log(psi / iv.upper)) : 1e9;
      if (std::min(near_lo, near_hi) > 1e-7) ++duality_bad;
    }
  }
  c.expect(duality_bad == 0, "duality on 200 tables");

  // Flip symmetry.
  double worst_flip = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Table2x2 t(cell(gen), cell(gen), cell(gen), cell(gen) + 1);
    for (double psi : {0.1, 1.0, 2.6364, 9.0}) {
      worst_flip = std::max(worst_flip,
                            std::abs(exact_p(flip_exposure(t), 1 / psi).p - exact_p(t, psi).p));
    }
  }
  c.expect(worst_flip <= 1e-10, "flip symmetry <= 1e-10");

  // S-additivity.
  double worst_s = 0.0;
  std::uniform_real_distribution<double> unit(1e-12, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double p1 = unit(gen), p2 = unit(gen);
    worst_s = std::max(worst_s, std::abs(s_value(p1 * p2) - s_value(p1) - s_value(p2)));
  }
  c.expect(worst_s <= 1e-10, "S-additivity <= 1e-10");

  // Power at the alpha extremes.
  PowerSpec spec{40, 60, 0.2, 2.0, 0.0, TestMethod::Exact, 2000, 5};
  const double p0 = power_mc(spec).estimate;
  spec.alpha = 1.0;
  const double p1 = power_mc(spec).estimate;
  c.expect(p0 == 0.0, "power(alpha=0) = 0");
  c.expect(p1 == 1.0, "power(alpha=1) = 1");

  // Exact-test size at the null.
  double worst_excess = -1.0;
  for (const auto& [n1, n0, r0] : std::vector<std::tuple<Count, Count, double>>{
           {30, 30, 0.1}, {80, 20, 0.3}, {50, 50, 0.5}, {120, 480, 16.0 / 480}, {15, 25, 0.2}}) {
    const PowerSpec null{n1, n0, r0, 1.0, 0.05, TestMethod::Exact, 10000, 77};
    const auto r = power_mc(null);
    worst_excess = std::max(worst_excess, r.estimate - (0.05 + 3 * r.mc_error));
  }
  c.expect(worst_excess <= 0.0, "null rejection <= alpha + 3 mc_error on 5 scenarios");

  c.note("norm " + num(worst_norm, 2) + ", enum " + num(worst_enum, 2) + ", flip " +
         num(worst_flip, 2) + ", S " + num(worst_s, 2) + ", duality misses " +
         std::to_string(duality_bad) + ", worst size margin " + num(worst_excess, 3));
  return c;
}

Checks criterion10() {
  Checks c;
  const Scenario shaped{120, 480, 16.0 / 480, 2.636, "reference shape"};
  const auto cov = coverage_sim(shaped, CoverageMethod::Exact, 0.05, 10000, 2026);
  c.expect(cov.estimate >= 0.95 - 3 * cov.mc_error, "exact coverage >= 0.95 - 3 mc_error");
  // Same shape with the arm sizes swapped and the rounded baseline.
  const Scenario swapped{480, 120, 0.033, 2.636, "arms swapped"};
  const auto cov2 = coverage_sim(swapped, CoverageMethod::Exact, 0.05, 10000, 2026);
  c.expect(cov2.estimate >= 0.95 - 3 * cov2.mc_error, "exact coverage, arms swapped");

  const Scenario sparse{50, 50, 0.02, 4.0, "sparse"};
  const auto e = coverage_sim(sparse, CoverageMethod::Exact, 0.05, 10000, 2027);
  const auto w = coverage_sim(sparse, CoverageMethod::Wald, 0.05, 10000, 2027);
  c.expect(w.estimate < e.estimate, "paired Wald coverage below exact");

  const Scenario low{100, 100, 0.05, 1.5, "low power"};
  const auto f = significance_filter_sim(low, 0.05, 10000, 2028);
  c.expect(f.estimate > std::log(1.5), "filtered mean |log OR| > ln 1.5");

  c.note("exact coverage " + num(cov.estimate) + " (mc " + num(cov.mc_error, 2) +
         "), arms swapped " + num(cov2.estimate) + "; sparse exact " + num(e.estimate) + " vs wald " + num(w.estimate) +
         " (undefined as miss " + num(w.extras.at("coverage_undefined_as_miss")) +
         "); filtered |log OR| " + num(f.estimate) + " vs " + num(std::log(1.5)));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::function<Checks()>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Checks c;
    try {
      c = criteria[i]();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!c.ok()) ++failed;
    std::printf("%s criterion %zu: %s [%.1fs]\n", c.ok() ? "PASS" : "FAIL", i + 1, c.text().c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
