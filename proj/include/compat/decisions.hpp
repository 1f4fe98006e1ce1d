#pragma once

// Alpha-level decision rules, Monte Carlo power, and multiplicity arithmetic.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "compat/interval.hpp"
#include "compat/sampling.hpp"

namespace compat {

enum class Decision { Reject, FailToReject };

// "reject" / "fail-to-reject".
std::string_view to_string(Decision d);

struct TestDecision {
  std::optional<double> p;  // empty for interval-based decisions
  double alpha = 0.05;
  Decision decision = Decision::FailToReject;

  friend bool operator==(const TestDecision&, const TestDecision&) = default;
};

// Reject iff p <= alpha. Throws InvalidP or InvalidAlpha (alpha in (0, 1)).
TestDecision alpha_test(double p, double alpha);

// Reject iff psi is not strictly inside the interval, which matches
// alpha_test on the P-value the interval was inverted from.
TestDecision interval_test(const IntervalEstimate& iv, double psi);

struct PowerSpec {
  Count n_exposed = 1;
  Count n_unexposed = 1;
  double baseline_risk = 0.5;
  double or_pop = 1.0;
  double alpha = 0.05;  // [0, 1]; 0 never rejects and 1 always does
  TestMethod test = TestMethod::Exact;
  std::int64_t n_sims = 10000;
  std::uint64_t seed = 0;

  // Throws InvalidSpec.
  void validate() const;
  [[nodiscard]] Scenario scenario() const;
};

// Rejection rate of the OR = 1 test over simulated tables. Replicate r uses
// Philox substream (seed, r), so calls with the same seed share draws across
// alpha values, tests, and odds ratios. extras: beta, undefined_fraction.
SimReport power_mc(const PowerSpec& spec);

// Power at several alpha levels from one set of draws.
std::vector<SimReport> power_mc_alphas(const PowerSpec& spec, std::span<const double> alphas);

struct PowerPoint {
  double or_pop = 1.0;
  double power = 0.0;
  double beta = 1.0;
  double mc_error = 0.0;

  friend bool operator==(const PowerPoint&, const PowerPoint&) = default;
};

// power_mc at each grid odds ratio, all with the spec's seed. Throws InvalidGrid.
std::vector<PowerPoint> power_curve(const PowerSpec& spec, std::span<const double> or_grid);

// alpha / k. Throws InvalidAlpha or InvalidK.
double bonferroni(double alpha, std::int64_t k);

struct Independent {};
struct PerfectlyCorrelated {};
// Equicorrelated standard normal statistics with pairwise correlation rho.
struct SimulatedDependence {
  double rho = 0.0;
  std::int64_t n_sims = 10000;
  std::uint64_t seed = 0;
};
using Dependence = std::variant<Independent, PerfectlyCorrelated, SimulatedDependence>;

// Probability that at least one of k true null hypotheses is rejected at
// level alpha. Analytic for the two extremes (mc_error 0), Monte Carlo in
// between.
SimReport familywise_rate(double alpha, std::int64_t k, const Dependence& dependence);

}  // namespace compat
