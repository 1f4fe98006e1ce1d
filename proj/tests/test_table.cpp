#include <doctest.h>

#include <cmath>
#include <random>

#include "compat/error.hpp"
#include "compat/table.hpp"

using namespace compat;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected compat::Error");
  return ErrorKind::ParseError;
}

}  // namespace

TEST_CASE("construction and margins") {
  const Table2x2 t(10, 110, 16, 464);
  CHECK(t.total() == 600);
  CHECK(t.cases() == 26);
  CHECK(t.exposed() == 120);
  CHECK(t.unexposed() == 480);
  CHECK(t.noncases() == 574);
  CHECK(t.to_string() == "10,110,16,464");
  CHECK(Table2x2(1, 0, 0, 1).total() == 2);
}

TEST_CASE("invalid tables") {
  CHECK(kind_of([] { Table2x2(0, 0, 0, 0); }) == ErrorKind::EmptyTable);
  CHECK(kind_of([] { Table2x2(-1, 2, 3, 4); }) == ErrorKind::NegativeCount);
  CHECK(kind_of([] { parse_table("1,2,3"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_table("1,2,x,4"); }) == ErrorKind::ParseError);
  CHECK(parse_table("10,110,16,464") == Table2x2(10, 110, 16, 464));
}

TEST_CASE("summary of the 10,110,16,464 table") {
  const auto s = summarize(Table2x2(10, 110, 16, 464));
  CHECK(s.rd.value == doctest::Approx(10.0 / 120 - 16.0 / 480).epsilon(1e-14));
  CHECK(s.rr.value == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(s.odds_ratio.value == doctest::Approx(10.0 * 464 / (110.0 * 16)).epsilon(1e-14));
  CHECK(s.expected[0] == doctest::Approx(5.2));
  CHECK(s.expected[1] == doctest::Approx(114.8));
  CHECK(s.expected[2] == doctest::Approx(20.8));
  CHECK(s.expected[3] == doctest::Approx(459.2));
}

TEST_CASE("symmetric table") {
  const auto s = summarize(Table2x2(5, 5, 5, 5));
  CHECK(s.rd.value == 0.0);
  CHECK(s.rr.value == 1.0);
  CHECK(s.odds_ratio.value == 1.0);
}

TEST_CASE("zero denominators are tagged") {
  const auto s = summarize(Table2x2(3, 0, 0, 4));
  CHECK(s.odds_ratio.kind == MeasureKind::PositiveInfinite);
  CHECK(s.rr.kind == MeasureKind::PositiveInfinite);
  const auto u = summarize(Table2x2(0, 3, 0, 4));
  CHECK(u.odds_ratio.kind == MeasureKind::Undefined);
  CHECK(u.rr.kind == MeasureKind::Undefined);
  CHECK(u.rd.value == 0.0);
  CHECK(std::isinf(log_sample_or(Table2x2(3, 0, 0, 4))));
  CHECK(std::isnan(log_sample_or(Table2x2(0, 3, 0, 4))));
}

TEST_CASE("flip exposure") {
  const Table2x2 t(10, 110, 16, 464);
  CHECK(flip_exposure(t) == Table2x2(16, 464, 10, 110));
  CHECK(flip_exposure(flip_exposure(t)) == t);
  CHECK(summarize(flip_exposure(t)).odds_ratio.value ==
        doctest::Approx(110.0 * 16 / (10.0 * 464)).epsilon(1e-14));
}

TEST_CASE("properties on random tables") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<Count> cell(0, 60);
  for (int i = 0; i < 500; ++i) {
    Count a = cell(gen), b = cell(gen), c = cell(gen), d = cell(gen);
    if (a + b + c + d == 0) continue;
    const Table2x2 t(a, b, c, d);
    const auto s = summarize(t);
    const double n = static_cast<double>(t.total());
    // Expected counts reproduce both margins.
    CHECK(s.expected[0] + s.expected[1] == doctest::Approx(t.exposed()).epsilon(1e-12));
    CHECK(s.expected[2] + s.expected[3] == doctest::Approx(t.unexposed()).epsilon(1e-12));
    CHECK(s.expected[0] + s.expected[2] == doctest::Approx(t.cases()).epsilon(1e-12));
    CHECK(s.expected[0] + s.expected[1] + s.expected[2] + s.expected[3] ==
          doctest::Approx(n).epsilon(1e-12));

    const auto f = summarize(flip_exposure(t));
    if (s.rd.is_finite() && f.rd.is_finite()) CHECK(f.rd.value == doctest::Approx(-s.rd.value));
    if (s.odds_ratio.is_finite() && s.odds_ratio.value > 0) {
      CHECK(f.odds_ratio.value == doctest::Approx(1.0 / s.odds_ratio.value).epsilon(1e-12));
    }
    // Measures on the same side of the null, OR farthest from it.
    if (a * d > 0 && b * c > 0) {
      const double rd = s.rd.value, rr = s.rr.value, orr = s.odds_ratio.value;
      if (rd > 0) {
        CHECK(orr > rr);
        CHECK(rr > 1.0);
      } else if (rd < 0) {
        CHECK(orr < rr);
        CHECK(rr < 1.0);
      }
    }
  }
}
