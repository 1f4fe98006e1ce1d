#pragma once

// Canonical 2x2 table and descriptive association measures.
//
// Cell order is always (exposed-case, exposed-noncase, unexposed-case,
// unexposed-noncase):
//
//              case   noncase
//   exposed     a       b        n1 = a + b
//   unexposed   c       d        n0 = c + d
//               m1      m0       N

#include <array>
#include <cstdint>
#include <string>

namespace compat {

using Count = std::int64_t;

class Table2x2 {
 public:
  // Throws NegativeCount or EmptyTable.
  Table2x2(Count a, Count b, Count c, Count d);

  [[nodiscard]] Count a() const noexcept { return a_; }
  [[nodiscard]] Count b() const noexcept { return b_; }
  [[nodiscard]] Count c() const noexcept { return c_; }
  [[nodiscard]] Count d() const noexcept { return d_; }

  [[nodiscard]] Count total() const noexcept { return a_ + b_ + c_ + d_; }
  [[nodiscard]] Count cases() const noexcept { return a_ + c_; }
  [[nodiscard]] Count noncases() const noexcept { return b_ + d_; }
  [[nodiscard]] Count exposed() const noexcept { return a_ + b_; }
  [[nodiscard]] Count unexposed() const noexcept { return c_ + d_; }

  [[nodiscard]] std::array<Count, 4> cells() const noexcept { return {a_, b_, c_, d_}; }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Table2x2&, const Table2x2&) = default;

 private:
  Count a_;
  Count b_;
  Count c_;
  Count d_;
};

inline Table2x2 make_table(Count a, Count b, Count c, Count d) { return {a, b, c, d}; }

// Parses "a,b,c,d". Throws ParseError on malformed text.
Table2x2 parse_table(const std::string& text);

// A ratio or difference whose denominator may vanish. Descriptive output never
// throws; degenerate values are tagged instead.
enum class MeasureKind { Finite, PositiveInfinite, Undefined };

struct Measure {
  MeasureKind kind = MeasureKind::Undefined;
  double value = 0.0;

  static Measure finite(double v) { return {MeasureKind::Finite, v}; }
  static Measure infinite() { return {MeasureKind::PositiveInfinite, 0.0}; }
  static Measure undefined() { return {MeasureKind::Undefined, 0.0}; }
  // num/den with the tagging rules for den == 0.
  static Measure ratio(double num, double den);

  [[nodiscard]] bool is_finite() const noexcept { return kind == MeasureKind::Finite; }
  // Finite value, +inf, or NaN.
  [[nodiscard]] double as_double() const noexcept;

  friend bool operator==(const Measure&, const Measure&) = default;
};

struct AssociationSummary {
  Measure rd;
  Measure rr;
  Measure odds_ratio;
  Measure p_exposed;
  Measure p_unexposed;
  Measure odds_exposed;
  Measure odds_unexposed;
  // Expected counts under independence, canonical cell order.
  std::array<double, 4> expected{};
};

AssociationSummary summarize(const Table2x2& t);

// Swaps the exposed and unexposed rows.
Table2x2 flip_exposure(const Table2x2& t);

// Sample odds ratio ad/bc on the log scale; +/-inf when one of the products is
// zero, NaN when both are.
double log_sample_or(const Table2x2& t);

}  // namespace compat
