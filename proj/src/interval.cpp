#include "compat/interval.hpp"

#include <string>

#include "compat/error.hpp"

namespace compat {

std::string_view to_string(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::Exact: return "exact";
    case IntervalMethod::Wald: return "wald";
    case IntervalMethod::PearsonInversion: return "pearson-inversion";
  }
  return "exact";
}

IntervalMethod interval_method_from_string(std::string_view s) {
  if (s == "exact") return IntervalMethod::Exact;
  if (s == "wald") return IntervalMethod::Wald;
  if (s == "pearson-inversion" || s == "pearson") return IntervalMethod::PearsonInversion;
  throw Error(ErrorKind::ParseError, "unknown interval method '" + std::string(s) + "'");
}

}  // namespace compat
