#pragma once

// Shared Monte Carlo plumbing: scenarios, reports, table sampling and the
// null-hypothesis tests used inside simulations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "compat/rng.hpp"
#include "compat/table.hpp"

namespace compat {

// Two independent binomial arms. baseline_risk is the risk among the
// unexposed; the exposed risk has odds baseline_odds * or_pop.
struct Scenario {
  Count n_exposed = 1;
  Count n_unexposed = 1;
  double baseline_risk = 0.5;
  double or_pop = 1.0;
  std::string label;

  // Throws InvalidSpec.
  void validate() const;
  [[nodiscard]] double exposed_risk() const;
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct SimReport {
  std::optional<Scenario> scenario;
  std::string method;
  std::int64_t n_sims = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double mc_error = 0.0;
  std::map<std::string, double> extras;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

// Binomial(n, p) by inversion of a tabulated CDF: one uniform per draw, and
// draws are monotone in the uniform so runs sharing uniforms are coupled.
class BinomialSampler {
 public:
  BinomialSampler(Count n, double p);
  [[nodiscard]] Count draw(double u) const noexcept;

 private:
  std::vector<double> cdf_;
};

class TableSampler {
 public:
  explicit TableSampler(const Scenario& sc);
  // Consumes exactly two uniforms: exposed arm first, then unexposed.
  Table2x2 draw(Philox4x32& rng) const;

 private:
  Count n_exposed_;
  Count n_unexposed_;
  BinomialSampler exposed_;
  BinomialSampler unexposed_;
};

enum class TestMethod { Exact, Pearson, Wald };

std::string_view to_string(TestMethod m);
TestMethod test_method_from_string(std::string_view s);

// Two-sided P-value for OR = 1. When the statistic does not exist (a zero
// margin, or a zero cell for Wald) the table carries no evidence and the
// P-value is 1, so it is rejected only at alpha = 1.
double null_p_value(const Table2x2& t, TestMethod method);

// sqrt(est (1 - est) / n).
double binomial_mc_error(double est, std::int64_t n);

}  // namespace compat
