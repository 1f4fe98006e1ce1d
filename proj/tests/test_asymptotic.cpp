#include <doctest.h>

#include <cmath>
#include <random>

#include "compat/asymptotic.hpp"
#include "compat/error.hpp"
#include "oracles.hpp"

using namespace compat;

namespace {

const Table2x2 kReference(10, 110, 16, 464);

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::ParseError;
}

}  // namespace

TEST_CASE("pearson statistic") {
  const auto r = pearson_chi2(kReference);
  CHECK(std::round(r.t * 100) == 579);
  CHECK(r.df == 1);
  CHECK(std::round(r.p * 1000) == 16);
  const auto s = pearson_chi2(Table2x2(5, 5, 5, 5));
  CHECK(s.t == 0.0);
  CHECK(s.p == 1.0);
  CHECK(kind_of([] { pearson_chi2(Table2x2(0, 5, 0, 5)); }) == ErrorKind::ZeroExpectedCount);
}

TEST_CASE("pearson matches the closed form") {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<Count> cell(1, 200);
  for (int i = 0; i < 300; ++i) {
    const Count a = cell(gen), b = cell(gen), c = cell(gen), d = cell(gen);
    const long double n = a + b + c + d;
    const long double diff = static_cast<long double>(a) * d - static_cast<long double>(b) * c;
    const long double want = n * diff * diff /
                             (static_cast<long double>(a + b) * (c + d) * (a + c) * (b + d));
    CHECK(pearson_chi2(Table2x2(a, b, c, d)).t ==
          doctest::Approx(static_cast<double>(want)).epsilon(1e-11));
  }
}

TEST_CASE("pearson at a general odds ratio") {
  CHECK(pearson_chi2_at(kReference, 1.0).t == doctest::Approx(pearson_chi2(kReference).t).epsilon(1e-10));
  // Fitted counts reproduce psi and the margins.
  for (double psi : {0.4, 2.0, 7.5}) {
    const double e = expected_exposed_cases(kReference, psi);
    const double eb = 120 - e, ec = 26 - e, ed = 480 - 26 + e;
    CHECK(e * ed / (eb * ec) == doctest::Approx(psi).epsilon(1e-9));
  }
  const auto iv = pearson_limits(kReference, 0.05);
  CHECK(pearson_chi2_at(kReference, iv.lower).p == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(pearson_chi2_at(kReference, iv.upper).p == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(iv.method == IntervalMethod::PearsonInversion);
}

TEST_CASE("woolf standard error") {
  CHECK(log_or_se(kReference) == doctest::Approx(std::sqrt(1.0 / 10 + 1.0 / 110 + 1.0 / 16 + 1.0 / 464)));
  CHECK(std::round(log_or_se(kReference) * 10000) == 4168);
  for (Count k : {1, 4, 9, 100}) {
    CHECK(log_or_se(Table2x2(k, k, k, k)) == doctest::Approx(2.0 / std::sqrt(double(k))));
  }
  CHECK(kind_of([] { log_or_se(Table2x2(0, 1, 2, 3)); }) == ErrorKind::ZeroCell);
  CHECK(log_or_se(Table2x2(0, 1, 2, 3), SeCorrection::Haldane) ==
        doctest::Approx(std::sqrt(1 / 0.5 + 1 / 1.5 + 1 / 2.5 + 1 / 3.5)));
  CHECK(log_or_estimate(Table2x2(0, 1, 2, 3), SeCorrection::Haldane) ==
        doctest::Approx(std::log(0.5 * 3.5 / (1.5 * 2.5))));
}

TEST_CASE("wald P-value") {
  CHECK(wald_p({0.3, 0.2, 0.3}) == 1.0);
  const double b = std::log(10.0 * 464 / (110.0 * 16));
  const double se = log_or_se(kReference);
  const double p = wald_p({b, se, 0.0});
  CHECK(p == doctest::Approx(static_cast<double>(oracle::normal_two_sided(b / se))).epsilon(1e-12));
  CHECK(std::round(p * 1000) == 20);
  CHECK(std::round(wald_p({1.96, 1.0, 0.0}) * 10000) == 500);
  CHECK(kind_of([] { wald_p({0.0, 0.0, 0.0}); }) == ErrorKind::NonpositiveSE);
}

TEST_CASE("wald limits") {
  const double b = std::log(10.0 * 464 / (110.0 * 16));
  const double se = log_or_se(kReference);
  const auto iv = wald_limits(b, se, 0.05);
  CHECK(iv.lower == doctest::Approx(1.16).epsilon(0.005));
  CHECK(iv.upper == doctest::Approx(5.97).epsilon(0.005));
  CHECK(std::round(iv.lower * 100) == 116);
  CHECK(std::round(iv.upper * 100) == 597);
  CHECK(std::abs(std::log(iv.upper) - b - (b - std::log(iv.lower))) <= 1e-12);
  CHECK(std::abs(wald_p({b, se, std::log(iv.lower)}) - 0.05) <= 1e-10);
  CHECK(std::abs(wald_p({b, se, std::log(iv.upper)}) - 0.05) <= 1e-10);
  const auto zero = wald_limits(b, se, 1.0);
  CHECK(zero.lower == doctest::Approx(std::exp(b)));
  CHECK(zero.upper == doctest::Approx(std::exp(b)));
  CHECK(kind_of([&] { wald_limits(b, se, 0.0); }) == ErrorKind::InvalidAlpha);
  CHECK(kind_of([&] { wald_limits(b, -1.0, 0.05); }) == ErrorKind::NonpositiveSE);
}

TEST_CASE("wald p decreases in distance from the estimate") {
  double prev = 1.0;
  for (double c = 0.0; c <= 3.0; c += 0.1) {
    const double p = wald_p({0.0, 0.5, c});
    CHECK(p <= prev);
    CHECK(wald_p({0.0, 0.5, -c}) == doctest::Approx(p));
    prev = p;
  }
}

TEST_CASE("pearson and exact converge as the table grows") {
  double prev = 1.0;
  for (Count k : {1, 5, 25, 125}) {
    const Table2x2 t(3 * k, 12 * k, 5 * k, 40 * k);
    const double gap = std::abs(pearson_chi2(t).p - exact_p(t, 1.0).p);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("method comparison") {
  const auto m = compare_methods(kReference, 1.0, 0.05);
  CHECK(m.exact.p == doctest::Approx(exact_p(kReference, 1.0).p));
  CHECK(m.pearson.p == doctest::Approx(pearson_chi2(kReference).p));
  // Wald is narrower than the exact interval here.
  CHECK(m.wald_interval.lower > m.exact_interval.lower);
  CHECK(m.wald_interval.upper < m.exact_interval.upper);
  const auto z = compare_methods(Table2x2(0, 5, 3, 4), 1.0, 0.05);
  CHECK(std::isnan(z.wald_p));
}
