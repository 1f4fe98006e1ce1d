#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "compat/error.hpp"
#include "compat/exact.hpp"
#include "oracles.hpp"

using namespace compat;

namespace {

const Table2x2 kReference(10, 110, 16, 464);

double p_at(const Table2x2& t, double psi, ExactOptions o = {}) { return exact_p(t, psi, o).p; }

}  // namespace

TEST_CASE("pmf on tiny margins") {
  const NchgDistribution central(2, 2, 4, 1.0);
  CHECK(nchg_pmf(central, 0) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(nchg_pmf(central, 1) == doctest::Approx(4.0 / 6).epsilon(1e-14));
  CHECK(nchg_pmf(central, 2) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  const NchgDistribution two(2, 2, 4, 2.0);
  CHECK(nchg_pmf(two, 0) == doctest::Approx(1.0 / 13).epsilon(1e-14));
  CHECK(nchg_pmf(two, 1) == doctest::Approx(8.0 / 13).epsilon(1e-14));
  CHECK(nchg_pmf(two, 2) == doctest::Approx(4.0 / 13).epsilon(1e-14));
  CHECK(nchg_pmf(two, 3) == 0.0);
  CHECK(nchg_pmf(two, -1) == 0.0);
}

TEST_CASE("invalid psi") {
  const NchgDistribution zero(2, 2, 4, 0.0);
  CHECK_THROWS_AS(nchg_pmf(zero, 0), Error);
  CHECK_THROWS_AS(NchgDistribution(2, 2, 4, -1.0), Error);
  CHECK_THROWS_AS(exact_p(kReference, 0.0), Error);
  CHECK_THROWS_AS(exact_tail(kReference, -2.0, Tail::Upper), Error);
}

TEST_CASE("point masses at psi 0 and infinity") {
  const NchgDistribution lo(3, 4, 10, 0.0);
  CHECK(lo.pmf(lo.a_min()) == 1.0);
  const NchgDistribution hi(3, 4, 10, std::numeric_limits<double>::infinity());
  CHECK(hi.pmf(hi.a_max()) == 1.0);
}

TEST_CASE("normalization over randomized margins") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 60; ++i) {
    const Count n = std::uniform_int_distribution<Count>(1, 2000)(gen);
    const Count m1 = std::uniform_int_distribution<Count>(0, n)(gen);
    const Count n1 = std::uniform_int_distribution<Count>(0, n)(gen);
    for (double psi : {0.01, 0.1, 1.0, 2.6364, 10.0, 100.0}) {
      const NchgDistribution dist(m1, n1, n, psi);
      double sum = 0.0;
      for (Count a = dist.a_min(); a <= dist.a_max(); ++a) sum += dist.pmf(a);
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("central case matches a factorial oracle") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 40; ++i) {
    const Count n = std::uniform_int_distribution<Count>(1, 400)(gen);
    const Count m1 = std::uniform_int_distribution<Count>(0, n)(gen);
    const Count n1 = std::uniform_int_distribution<Count>(0, n)(gen);
    const NchgDistribution dist(m1, n1, n, 1.0);
    for (Count a = dist.a_min(); a <= dist.a_max(); ++a) {
      const double want = static_cast<double>(oracle::central_pmf(m1, n1, n, a));
      if (want < 1e-250) continue;
      CHECK(dist.pmf(a) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("tails match exhaustive enumeration for every table with N <= 12") {
  int checked = 0;
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; a + b <= n; ++b) {
        for (int c = 0; a + b + c <= n; ++c) {
          const int d = n - a - b - c;
          const Table2x2 t(a, b, c, d);
          for (double psi : {0.3, 1.0, 2.6364, 7.0}) {
            const double up = exact_tail(t, psi, Tail::Upper);
            const double lo = exact_tail(t, psi, Tail::Lower);
            const auto eu = oracle::enumerated_upper(a + c, a + b, n, psi, a);
            const auto el = oracle::enumerated_lower(a + c, a + b, n, psi, a);
            worst = std::max({worst, std::abs(up - static_cast<double>(eu)),
                              std::abs(lo - static_cast<double>(el))});
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 0);
  CHECK(worst <= 1e-12);
}

TEST_CASE("tail identity and boundary") {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<Count> cell(0, 30);
  for (int i = 0; i < 200; ++i) {
    const Table2x2 t(cell(gen), cell(gen), cell(gen), cell(gen) + 1);
    for (double psi : {0.2, 1.0, 5.0}) {
      const auto dist = NchgDistribution::for_table(t, psi);
      const double lo = exact_tail(t, psi, Tail::Lower);
      const double up = exact_tail(t, psi, Tail::Upper);
      CHECK(lo + up == doctest::Approx(1.0 + dist.pmf(t.a())).epsilon(1e-12));
      CHECK(lo >= 0.0);
      CHECK(up <= 1.0 + 1e-15);
    }
  }
  // a_obs at a_max: the upper tail is the point probability.
  const Table2x2 t(3, 0, 2, 5);
  const auto dist = NchgDistribution::for_table(t, 1.7);
  CHECK(dist.a_max() == 3);
  CHECK(exact_tail(t, 1.7, Tail::Upper) == doctest::Approx(dist.pmf(3)).epsilon(1e-14));
}

TEST_CASE("upper tail at the null is below 0.05 for the 10,110,16,464 table") {
  CHECK(exact_tail(kReference, 1.0, Tail::Upper) < 0.05);
}

TEST_CASE("P-values on the 10,110,16,464 table") {
  CHECK(p_at(kReference, 1.0) == doctest::Approx(0.041).epsilon(0.0005 / 0.041));
  CHECK(std::round(p_at(kReference, 1.0) * 1000) == 41);
  CHECK(std::round(p_at(kReference, 2.0) * 1000) == 644);
  CHECK(std::round(p_at(kReference, 6.0) * 1000) == 70);
}

TEST_CASE("minimum-likelihood rule is available and differs") {
  const ExactOptions ml{TwoSidedRule::MinimumLikelihood, false};
  const double p1 = p_at(kReference, 1.0, ml);
  CHECK(p1 > 0.0);
  CHECK(p1 < 0.05);
  CHECK(p1 != doctest::Approx(p_at(kReference, 1.0)).epsilon(1e-3));
}

TEST_CASE("mid-p is smaller than the plain P-value") {
  const ExactOptions mid{TwoSidedRule::TwiceSmallerTail, true};
  for (double psi : {0.5, 1.0, 6.0, 12.0}) CHECK(p_at(kReference, psi, mid) < p_at(kReference, psi));
}

TEST_CASE("point estimate") {
  const auto e = cmle_or(kReference);
  CHECK(e.kind == EstimateKind::Interior);
  CHECK(std::round(e.estimate * 100) == 264);
  CHECK(std::round(e.cmle * 100) == 263);
  CHECK(e.max_p == doctest::Approx(1.0));
  CHECK(e.plateau_lower < e.cmle);
  CHECK(e.cmle < e.plateau_upper);
  CHECK(e.discrepancy == doctest::Approx(std::abs(std::log(e.estimate / e.cmle))));
  // The conditional mean equation holds at the CMLE.
  CHECK(ConditionalModel(kReference).mean(e.cmle) == doctest::Approx(10.0).epsilon(1e-8));

  const auto sym = cmle_or(Table2x2(5, 5, 5, 5));
  CHECK(sym.estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sym.cmle == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(cmle_or(Table2x2(2, 0, 0, 2)).kind == EstimateKind::BoundaryInfinite);
  CHECK(cmle_or(Table2x2(0, 2, 2, 0)).kind == EstimateKind::BoundaryZero);
}

TEST_CASE("exact limits") {
  const auto iv = exact_limits(kReference, 0.05);
  CHECK(std::round(iv.lower * 100) == 104);
  CHECK(std::round(iv.upper * 100) == 636);
  CHECK(std::abs(p_at(kReference, iv.lower) - 0.05) <= 1e-6);
  CHECK(std::abs(p_at(kReference, iv.upper) - 0.05) <= 1e-6);
  CHECK(iv.method == IntervalMethod::Exact);

  const auto paired = exact_limits(kReference, 0.05, {}, LimitConstruction::PairedTails);
  CHECK(paired.lower == doctest::Approx(iv.lower).epsilon(1e-8));
  CHECK(paired.upper == doctest::Approx(iv.upper).epsilon(1e-8));

  CHECK_THROWS_AS(exact_limits(kReference, 0.0), Error);
  CHECK_THROWS_AS(exact_limits(kReference, 1.0), Error);
}

TEST_CASE("minimum-likelihood limits solve their own equation") {
  const ExactOptions ml{TwoSidedRule::MinimumLikelihood, false};
  const auto iv = exact_limits(kReference, 0.05, ml);
  // The minimum-likelihood P-value jumps, so check the crossing from both sides.
  CHECK(p_at(kReference, iv.lower * (1 - 1e-6), ml) <= 0.05 + 1e-9);
  CHECK(p_at(kReference, iv.lower * (1 + 1e-6), ml) > 0.05 - 1e-9);
  CHECK(p_at(kReference, iv.upper * (1 + 1e-6), ml) <= 0.05 + 1e-9);
  CHECK(p_at(kReference, iv.upper * (1 - 1e-6), ml) > 0.05 - 1e-9);
}

TEST_CASE("boundary tables give one-sided limits") {
  const auto up = exact_limits(Table2x2(4, 0, 1, 6), 0.05);
  CHECK(up.lower > 0.0);
  CHECK(std::isinf(up.upper));
  const auto down = exact_limits(Table2x2(0, 5, 4, 3), 0.05);
  CHECK(down.lower == 0.0);
  CHECK(std::isfinite(down.upper));
  const auto flat = exact_limits(Table2x2(0, 5, 0, 3), 0.05);
  CHECK(flat.lower == 0.0);
  CHECK(std::isinf(flat.upper));
}

TEST_CASE("nesting in alpha") {
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (double alpha : {0.001, 0.01, 0.05, 0.1, 0.3}) {
    const auto iv = exact_limits(kReference, alpha);
    CHECK(iv.lower >= lo);
    CHECK(iv.upper <= hi);
    lo = iv.lower;
    hi = iv.upper;
  }
}

TEST_CASE("stochastic ordering of tails") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<Count> cell(0, 25);
  for (int i = 0; i < 50; ++i) {
    const Table2x2 t(cell(gen), cell(gen), cell(gen), cell(gen) + 1);
    double prev_up = -1.0, prev_lo = 2.0;
    for (double lp = -4.0; lp <= 4.0; lp += 0.25) {
      const double up = exact_tail(t, std::exp(lp), Tail::Upper);
      const double lo = exact_tail(t, std::exp(lp), Tail::Lower);
      CHECK(up >= prev_up - 1e-13);
      CHECK(lo <= prev_lo + 1e-13);
      prev_up = up;
      prev_lo = lo;
    }
  }
}

TEST_CASE("P-value function is unimodal with its peak at the estimate") {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<Count> cell(1, 40);
  for (int i = 0; i < 20; ++i) {
    const Table2x2 t(cell(gen), cell(gen), cell(gen), cell(gen));
    const auto est = cmle_or(t);
    REQUIRE(est.kind == EstimateKind::Interior);
    const double center = std::log10(est.estimate);
    double prev = 0.0;
    for (int k = -800; k <= 800; ++k) {
      const double lpsi = center + k / 400.0;
      const double p = p_at(t, std::pow(10.0, lpsi));
      if (k <= 0) {
        CHECK(p >= prev - 1e-12);
      } else {
        CHECK(p <= prev + 1e-12);
      }
      prev = p;
    }
  }
}

TEST_CASE("test-inversion duality on random tables") {
  std::mt19937_64 gen(29);
  std::uniform_int_distribution<Count> cell(0, 40);
  int tables = 0;
  while (tables < 200) {
    const Table2x2 t(cell(gen), cell(gen), cell(gen), cell(gen));
    if (t.cases() == 0 || t.noncases() == 0 || t.exposed() == 0 || t.unexposed() == 0) continue;
    ++tables;
    const auto iv = exact_limits(t, 0.05);
    const double step = std::log(10.0) / 100.0;
    for (int k = -400; k <= 400; ++k) {
      const double psi = std::exp(k * step);
      const bool inside = p_at(t, psi) > 0.05;
      const bool in_iv = iv.lower < psi && psi < iv.upper;
      if (inside != in_iv) {
        // Only allowed within one grid step of a limit.
        const double near_lo = iv.lower > 0 ? std::abs(std::log(psi / iv.lower)) : 1e9;
        const double near_hi = std::isfinite(iv.upper) ? std::abs(std::log(psi / iv.upper)) : 1e9;
        CHECK(std::min(near_lo, near_hi) <= step);
      }
    }
  }
}

TEST_CASE("flip symmetry") {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<Count> cell(0, 50);
  for (int i = 0; i < 200; ++i) {
    const Table2x2 t(cell(gen), cell(gen), cell(gen), cell(gen) + 1);
    for (double psi : {0.1, 0.7, 1.0, 2.6364, 9.0}) {
      CHECK(std::abs(p_at(flip_exposure(t), 1.0 / psi) - p_at(t, psi)) <= 1e-10);
    }
  }
}

TEST_CASE("large margins do not overflow") {
  const Table2x2 big(4000, 6000, 3000, 7000);
  const double p = p_at(big, 1.0);
  CHECK(p >= 0.0);
  CHECK(p < 1e-40);
  const auto e = cmle_or(big);
  CHECK(e.cmle == doctest::Approx(4000.0 * 7000 / (6000.0 * 3000)).epsilon(1e-3));
  const auto iv = exact_limits(big, 0.05);
  CHECK(iv.lower < e.cmle);
  CHECK(iv.upper > e.cmle);
}
