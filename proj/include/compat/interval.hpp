#pragma once

#include <string_view>

namespace compat {

enum class IntervalMethod { Exact, Wald, PearsonInversion };

std::string_view to_string(IntervalMethod m);
IntervalMethod interval_method_from_string(std::string_view s);

// Odds-ratio scale compatibility interval. lower may be 0 and upper may be
// +inf when the data sit on the boundary of the sample space.
struct IntervalEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.05;
  IntervalMethod method = IntervalMethod::Exact;

  // Values strictly inside the limits have p > alpha.
  [[nodiscard]] bool contains(double psi) const noexcept { return lower < psi && psi < upper; }

  friend bool operator==(const IntervalEstimate&, const IntervalEstimate&) = default;
};

}  // namespace compat
