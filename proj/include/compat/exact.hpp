#pragma once

// Exact conditional inference for the odds ratio of a 2x2 table.
//
// Conditioning on both margins leaves the exposed-case count A with the
// (Fisher) noncentral hypergeometric distribution
//
//   Pr(A = a; psi) ∝ C(n1, a) C(N - n1, m1 - a) psi^a,   a_min <= a <= a_max,
//
// whose only parameter is the odds ratio psi. Everything here (P-values, the
// point estimate and compatibility limits) is derived from that distribution.

#include <span>
#include <string_view>
#include <vector>

#include "compat/interval.hpp"
#include "compat/table.hpp"

namespace compat {

enum class Tail { Lower, Upper };
enum class Side { Lower, Upper, TwoSided };

// How tail areas are combined into a two-sided P-value.
//   TwiceSmallerTail:  min(1, 2 min(Pr(A <= a), Pr(A >= a)))
//   MinimumLikelihood: sum of Pr(A = k) over k no more probable than a
// TwiceSmallerTail is the default.
enum class TwoSidedRule { TwiceSmallerTail, MinimumLikelihood };

std::string_view to_string(Side s);
std::string_view to_string(TwoSidedRule r);
TwoSidedRule two_sided_rule_from_string(std::string_view s);

struct ExactOptions {
  TwoSidedRule rule = TwoSidedRule::TwiceSmallerTail;
  // Counts only half of the observed point's probability in each tail.
  bool mid_p = false;
};

// How exact limits are found.
//   TwoSidedInversion: roots of p(psi) = alpha for the configured two-sided rule
//   PairedTails:       lower tail = alpha/2 and upper tail = alpha/2 separately
// The two agree for TwiceSmallerTail.
enum class LimitConstruction { TwoSidedInversion, PairedTails };

class NchgDistribution {
 public:
  // psi may be 0 or +inf, giving point masses at a_min and a_max.
  // Throws InvalidSpec for inconsistent margins, InvalidPsi for negative/NaN psi.
  NchgDistribution(Count cases, Count exposed, Count total, double psi);

  static NchgDistribution for_table(const Table2x2& t, double psi);

  [[nodiscard]] Count a_min() const noexcept { return a_min_; }
  [[nodiscard]] Count a_max() const noexcept { return a_max_; }
  [[nodiscard]] double psi() const noexcept { return psi_; }

  // Zero outside the support.
  [[nodiscard]] double pmf(Count a) const noexcept;
  [[nodiscard]] double lower_tail(Count a) const noexcept;  // Pr(A <= a)
  [[nodiscard]] double upper_tail(Count a) const noexcept;  // Pr(A >= a)
  [[nodiscard]] double mean() const noexcept;
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

 private:
  NchgDistribution(Count a_min, double psi, std::vector<double> weights);
  friend class ConditionalModel;

  Count a_min_;
  Count a_max_;
  double psi_;
  std::vector<double> weights_;
};

// The conditional model of one observed table, with the psi-free part of the
// log weights precomputed so that repeated evaluation over psi is cheap.
class ConditionalModel {
 public:
  explicit ConditionalModel(const Table2x2& t);

  struct Tails {
    double lower;  // Pr(A <= a_obs)
    double upper;  // Pr(A >= a_obs)
    double point;  // Pr(A = a_obs)
  };

  [[nodiscard]] Count a_min() const noexcept { return a_min_; }
  [[nodiscard]] Count a_max() const noexcept { return a_max_; }
  [[nodiscard]] Count a_obs() const noexcept { return a_obs_; }
  [[nodiscard]] bool degenerate() const noexcept { return a_min_ == a_max_; }

  [[nodiscard]] NchgDistribution distribution(double psi) const;
  [[nodiscard]] Tails tails(double psi) const;
  [[nodiscard]] double mean(double psi) const;
  [[nodiscard]] double p_value(double psi, const ExactOptions& opts) const;
  // Tails with the observed point split when mid_p is set.
  [[nodiscard]] double adjusted_tail(double psi, Tail tail, bool mid_p) const;

 private:
  // Normalized weights at psi into the scratch buffer (psi in [0, inf]).
  void weights_at(double psi, std::vector<double>& out) const;

  Count cases_;
  Count exposed_;
  Count total_;
  Count a_min_;
  Count a_max_;
  Count a_obs_;
  std::vector<double> log_base_;
};

// Throws InvalidPsi unless 0 < psi < inf.
double nchg_pmf(const NchgDistribution& dist, Count a);

// Pr(A <= a_obs) or Pr(A >= a_obs) given the table's margins.
double exact_tail(const Table2x2& t, double psi, Tail side);

struct ExactPValue {
  double p = 1.0;
  double psi = 1.0;
  Side side = Side::TwoSided;
  TwoSidedRule rule = TwoSidedRule::TwiceSmallerTail;
  bool mid_p = false;
};

ExactPValue exact_p(const Table2x2& t, double psi, const ExactOptions& opts = {});

enum class EstimateKind { Interior, BoundaryZero, BoundaryInfinite, Undefined };

std::string_view to_string(EstimateKind k);

// The exact P-value function is flat at its maximum (p = 1) over a range of
// psi. `estimate` is the log-scale midpoint of that range, and `cmle` solves
// E_psi[A] = a_obs. Both are reported; they usually agree to about 1%.
struct PointEstimate {
  EstimateKind kind = EstimateKind::Undefined;
  double estimate = 0.0;
  double plateau_lower = 0.0;
  double plateau_upper = 0.0;
  double max_p = 1.0;
  double cmle = 0.0;
  // |ln(estimate) - ln(cmle)|, zero on the boundary.
  double discrepancy = 0.0;
};

// Boundary tables (a_obs at a_min or a_max) are tagged, not thrown.
PointEstimate cmle_or(const Table2x2& t, const ExactOptions& opts = {});

IntervalEstimate exact_limits(const Table2x2& t, double alpha, const ExactOptions& opts = {},
                              LimitConstruction construction = LimitConstruction::TwoSidedInversion);

}  // namespace compat
