#include "compat/table.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include "compat/error.hpp"

namespace compat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeCount: return "NegativeCount";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::InvalidPsi: return "InvalidPsi";
    case ErrorKind::InvalidAlpha: return "InvalidAlpha";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ZeroExpectedCount: return "ZeroExpectedCount";
    case ErrorKind::ZeroCell: return "ZeroCell";
    case ErrorKind::NonpositiveSE: return "NonpositiveSE";
    case ErrorKind::EmptyCurve: return "EmptyCurve";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::DegeneratePrior: return "DegeneratePrior";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SeparatedData: return "SeparatedData";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Table2x2::Table2x2(Count a, Count b, Count c, Count d) : a_(a), b_(b), c_(c), d_(d) {
  if (a < 0 || b < 0 || c < 0 || d < 0) {
    throw Error(ErrorKind::NegativeCount, "table cells must be nonnegative, got " + to_string());
  }
  if (total() == 0) {
    throw Error(ErrorKind::EmptyTable, "table total must be at least 1");
  }
}

std::string Table2x2::to_string() const {
  return std::to_string(a_) + "," + std::to_string(b_) + "," + std::to_string(c_) + "," +
         std::to_string(d_);
}

Table2x2 parse_table(const std::string& text) {
  std::vector<Count> cells;
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    std::string_view field = rest.substr(0, comma);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    Count value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
      throw Error(ErrorKind::ParseError, "expected four integer counts a,b,c,d, got '" + text + "'");
    }
    cells.push_back(value);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (cells.size() != 4) {
    throw Error(ErrorKind::ParseError, "expected four integer counts a,b,c,d, got '" + text + "'");
  }
  return {cells[0], cells[1], cells[2], cells[3]};
}

Measure Measure::ratio(double num, double den) {
  if (den != 0.0) return finite(num / den);
  if (num > 0.0) return infinite();
  return undefined();
}

double Measure::as_double() const noexcept {
  switch (kind) {
    case MeasureKind::Finite: return value;
    case MeasureKind::PositiveInfinite: return std::numeric_limits<double>::infinity();
    case MeasureKind::Undefined: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AssociationSummary summarize(const Table2x2& t) {
  const auto a = static_cast<double>(t.a());
  const auto b = static_cast<double>(t.b());
  const auto c = static_cast<double>(t.c());
  const auto d = static_cast<double>(t.d());
  const auto n1 = static_cast<double>(t.exposed());
  const auto n0 = static_cast<double>(t.unexposed());
  const auto m1 = static_cast<double>(t.cases());
  const auto m0 = static_cast<double>(t.noncases());
  const auto total = static_cast<double>(t.total());

  AssociationSummary s;
  s.p_exposed = Measure::ratio(a, n1);
  s.p_unexposed = Measure::ratio(c, n0);
  s.odds_exposed = Measure::ratio(a, b);
  s.odds_unexposed = Measure::ratio(c, d);

  if (s.p_exposed.is_finite() && s.p_unexposed.is_finite()) {
    s.rd = Measure::finite(s.p_exposed.value - s.p_unexposed.value);
    s.rr = Measure::ratio(s.p_exposed.value, s.p_unexposed.value);
  }
  s.odds_ratio = Measure::ratio(a * d, b * c);

  s.expected = {n1 * m1 / total, n1 * m0 / total, n0 * m1 / total, n0 * m0 / total};
  return s;
}

Table2x2 flip_exposure(const Table2x2& t) { return {t.c(), t.d(), t.a(), t.b()}; }

double log_sample_or(const Table2x2& t) {
  const double ad = static_cast<double>(t.a()) * static_cast<double>(t.d());
  const double bc = static_cast<double>(t.b()) * static_cast<double>(t.c());
  if (ad == 0.0 && bc == 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (bc == 0.0) return std::numeric_limits<double>::infinity();
  if (ad == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(ad) - std::log(bc);
}

}  // namespace compat
