#include "compat/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "compat/error.hpp"
#include "compat/special.hpp"
#include "roots.hpp"

namespace compat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack when comparing point probabilities for the minimum-likelihood
// rule, so that ties lost to rounding still count.
constexpr double kTieTolerance = 1e-7;

void check_margins(Count cases, Count exposed, Count total) {
  if (total < 1 || cases < 0 || exposed < 0 || cases > total || exposed > total) {
    throw Error(ErrorKind::InvalidSpec, "inconsistent margins for the noncentral hypergeometric");
  }
}

void check_psi_nonneg(double psi) {
  if (std::isnan(psi) || psi < 0.0) {
    throw Error(ErrorKind::InvalidPsi, "odds ratio must be nonnegative");
  }
}

void check_psi(double psi) {
  if (!(psi > 0.0) || !std::isfinite(psi)) {
    throw Error(ErrorKind::InvalidPsi, "odds ratio must be positive and finite");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidAlpha, "alpha must lie in (0, 1)");
  }
}

}  // namespace

std::string_view to_string(Side s) {
  switch (s) {
    case Side::Lower: return "lower";
    case Side::Upper: return "upper";
    case Side::TwoSided: return "two-sided";
  }
  return "two-sided";
}

std::string_view to_string(TwoSidedRule r) {
  switch (r) {
    case TwoSidedRule::TwiceSmallerTail: return "twice-smaller-tail";
    case TwoSidedRule::MinimumLikelihood: return "minimum-likelihood";
  }
  return "twice-smaller-tail";
}

TwoSidedRule two_sided_rule_from_string(std::string_view s) {
  if (s == "twice-smaller-tail") return TwoSidedRule::TwiceSmallerTail;
  if (s == "minimum-likelihood") return TwoSidedRule::MinimumLikelihood;
  throw Error(ErrorKind::ParseError, "unknown two-sided rule '" + std::string(s) + "'");
}

std::string_view to_string(EstimateKind k) {
  switch (k) {
    case EstimateKind::Interior: return "interior";
    case EstimateKind::BoundaryZero: return "boundary-zero";
    case EstimateKind::BoundaryInfinite: return "boundary-infinite";
    case EstimateKind::Undefined: return "undefined";
  }
  return "undefined";
}

// ---------------------------------------------------------------------------
// NchgDistribution

NchgDistribution::NchgDistribution(Count a_min, double psi, std::vector<double> weights)
    : a_min_(a_min),
      a_max_(a_min + static_cast<Count>(weights.size()) - 1),
      psi_(psi),
      weights_(std::move(weights)) {}

NchgDistribution::NchgDistribution(Count cases, Count exposed, Count total, double psi)
    : a_min_(0), a_max_(0), psi_(psi) {
  check_margins(cases, exposed, total);
  check_psi_nonneg(psi);
  // Any table with these margins; a_obs does not affect the distribution.
  const Count a = std::min(cases, exposed);
  const Table2x2 t(a, exposed - a, cases - a, total - exposed - (cases - a));
  *this = ConditionalModel(t).distribution(psi);
}

NchgDistribution NchgDistribution::for_table(const Table2x2& t, double psi) {
  check_psi_nonneg(psi);
  return ConditionalModel(t).distribution(psi);
}

double NchgDistribution::pmf(Count a) const noexcept {
  if (a < a_min_ || a > a_max_) return 0.0;
  return weights_[static_cast<std::size_t>(a - a_min_)];
}

double NchgDistribution::lower_tail(Count a) const noexcept {
  if (a < a_min_) return 0.0;
  double s = 0.0;
  for (Count k = a_min_; k <= std::min(a, a_max_); ++k) s += pmf(k);
  return s;
}

double NchgDistribution::upper_tail(Count a) const noexcept {
  if (a > a_max_) return 0.0;
  double s = 0.0;
  for (Count k = a_max_; k >= std::max(a, a_min_); --k) s += pmf(k);
  return s;
}

double NchgDistribution::mean() const noexcept {
  double m = 0.0;
  for (Count k = a_min_; k <= a_max_; ++k) m += static_cast<double>(k) * pmf(k);
  return m;
}

double nchg_pmf(const NchgDistribution& dist, Count a) {
  check_psi(dist.psi());
  return dist.pmf(a);
}

// ---------------------------------------------------------------------------
// ConditionalModel

ConditionalModel::ConditionalModel(const Table2x2& t)
    : cases_(t.cases()),
      exposed_(t.exposed()),
      total_(t.total()),
      a_min_(std::max<Count>(0, t.exposed() + t.cases() - t.total())),
      a_max_(std::min(t.exposed(), t.cases())),
      a_obs_(t.a()) {
  const Count unexposed = total_ - exposed_;
  log_base_.reserve(static_cast<std::size_t>(a_max_ - a_min_ + 1));
  for (Count a = a_min_; a <= a_max_; ++a) {
    log_base_.push_back(special::log_choose(exposed_, a) +
                        special::log_choose(unexposed, cases_ - a));
  }
}

void ConditionalModel::weights_at(double psi, std::vector<double>& out) const {
  out.assign(log_base_.size(), 0.0);
  if (psi == 0.0) {
    out.front() = 1.0;
    return;
  }
  if (psi == kInf) {
    out.back() = 1.0;
    return;
  }
  const double lp = std::log(psi);
  double top = -kInf;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = log_base_[k] + static_cast<double>(k) * lp;
    top = std::max(top, out[k]);
  }
  double sum = 0.0;
  for (double& w : out) {
    w = std::exp(w - top);
    sum += w;
  }
  for (double& w : out) w /= sum;
}

NchgDistribution ConditionalModel::distribution(double psi) const {
  check_psi_nonneg(psi);
  std::vector<double> w;
  weights_at(psi, w);
  return {a_min_, psi, std::move(w)};
}

ConditionalModel::Tails ConditionalModel::tails(double psi) const {
  const auto obs = static_cast<std::size_t>(a_obs_ - a_min_);
  const std::size_t last = log_base_.size() - 1;
  if (psi == 0.0 || psi == kInf) {
    const std::size_t at = psi == 0.0 ? 0 : last;
    return {obs >= at ? 1.0 : 0.0, obs <= at ? 1.0 : 0.0, obs == at ? 1.0 : 0.0};
  }
  const double lp = std::log(psi);
  double top = -kInf;
  for (std::size_t k = 0; k <= last; ++k) {
    top = std::max(top, log_base_[k] + static_cast<double>(k) * lp);
  }
  double lower = 0.0;
  double upper = 0.0;
  double point = 0.0;
  for (std::size_t k = 0; k <= last; ++k) {
    const double w = std::exp(log_base_[k] + static_cast<double>(k) * lp - top);
    if (k < obs) {
      lower += w;
    } else if (k > obs) {
      upper += w;
    } else {
      point = w;
    }
  }
  const double sum = lower + upper + point;
  return {(lower + point) / sum, (upper + point) / sum, point / sum};
}

double ConditionalModel::mean(double psi) const {
  std::vector<double> w;
  weights_at(psi, w);
  double m = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    m += static_cast<double>(a_min_ + static_cast<Count>(k)) * w[k];
  }
  return m;
}

double ConditionalModel::adjusted_tail(double psi, Tail tail, bool mid_p) const {
  const Tails t = tails(psi);
  const double half = mid_p ? 0.5 * t.point : 0.0;
  return (tail == Tail::Lower ? t.lower : t.upper) - half;
}

double ConditionalModel::p_value(double psi, const ExactOptions& opts) const {
  if (opts.rule == TwoSidedRule::TwiceSmallerTail) {
    const Tails t = tails(psi);
    const double half = opts.mid_p ? 0.5 * t.point : 0.0;
    return std::min(1.0, 2.0 * std::min(t.lower - half, t.upper - half));
  }
  std::vector<double> w;
  weights_at(psi, w);
  const double observed = w[static_cast<std::size_t>(a_obs_ - a_min_)];
  double p = 0.0;
  for (double x : w) {
    if (x <= observed * (1.0 + kTieTolerance)) p += x;
  }
  if (opts.mid_p) p -= 0.5 * observed;
  return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Free functions

double exact_tail(const Table2x2& t, double psi, Tail side) {
  check_psi(psi);
  const auto tails = ConditionalModel(t).tails(psi);
  return side == Tail::Lower ? tails.lower : tails.upper;
}

ExactPValue exact_p(const Table2x2& t, double psi, const ExactOptions& opts) {
  check_psi(psi);
  return {ConditionalModel(t).p_value(psi, opts), psi, Side::TwoSided, opts.rule, opts.mid_p};
}

namespace {

double start_log_psi(const Table2x2& t) {
  const double l = log_sample_or(t);
  return std::isfinite(l) ? l : 0.0;
}

// Range of psi over which the minimum-likelihood P-value equals 1: psi values
// at which a_obs is a mode of the distribution. Uses the PMF ratio
// Pr(a)/Pr(a-1) = psi * (n1-a+1)(m1-a+1) / (a (N-n1-m1+a)).
std::pair<double, double> mode_range(const Table2x2& t, const ConditionalModel& model) {
  const auto n1 = static_cast<double>(t.exposed());
  const auto m1 = static_cast<double>(t.cases());
  const auto n = static_cast<double>(t.total());
  const auto ratio = [&](Count a_int) {
    const auto a = static_cast<double>(a_int);
    return (n1 - a + 1.0) * (m1 - a + 1.0) / (a * (n - n1 - m1 + a));
  };
  const Count a = model.a_obs();
  const double lo = a > model.a_min() ? 1.0 / ratio(a) : 0.0;
  const double hi = a < model.a_max() ? 1.0 / ratio(a + 1) : kInf;
  return {lo, hi};
}

}  // namespace

PointEstimate cmle_or(const Table2x2& t, const ExactOptions& opts) {
  const ConditionalModel model(t);
  PointEstimate est;
  if (model.degenerate()) {
    est.kind = EstimateKind::Undefined;
    est.estimate = std::numeric_limits<double>::quiet_NaN();
    est.cmle = est.estimate;
    est.plateau_lower = 0.0;
    est.plateau_upper = kInf;
    est.max_p = 1.0;
    return est;
  }

  const double start = start_log_psi(t);
  if (opts.rule == TwoSidedRule::TwiceSmallerTail) {
    // p = 1 exactly where both (possibly mid-p adjusted) tails reach 1/2.
    const double log_lo = detail::solve_increasing(
        [&](double x) { return model.adjusted_tail(std::exp(x), Tail::Upper, opts.mid_p); }, 0.5,
        start);
    const double log_hi = detail::solve_decreasing(
        [&](double x) { return model.adjusted_tail(std::exp(x), Tail::Lower, opts.mid_p); }, 0.5,
        start);
    est.plateau_lower = model.a_obs() == model.a_min() ? 0.0 : std::exp(log_lo);
    est.plateau_upper = model.a_obs() == model.a_max() ? kInf : std::exp(log_hi);
  } else {
    std::tie(est.plateau_lower, est.plateau_upper) = mode_range(t, model);
  }

  if (model.a_obs() == model.a_min()) {
    est.kind = EstimateKind::BoundaryZero;
    est.estimate = 0.0;
    est.cmle = 0.0;
  } else if (model.a_obs() == model.a_max()) {
    est.kind = EstimateKind::BoundaryInfinite;
    est.estimate = kInf;
    est.cmle = kInf;
  } else {
    est.kind = EstimateKind::Interior;
    est.estimate = std::sqrt(est.plateau_lower * est.plateau_upper);
    const auto observed = static_cast<double>(model.a_obs());
    est.cmle = std::exp(detail::solve_increasing(
        [&](double x) { return model.mean(std::exp(x)); }, observed, start));
    est.discrepancy = std::abs(std::log(est.estimate) - std::log(est.cmle));
  }
  if (est.kind == EstimateKind::Interior) {
    est.max_p = model.p_value(est.estimate, opts);
  } else {
    // Evaluate inside the half-open plateau.
    const double inside = est.kind == EstimateKind::BoundaryZero ? 0.5 * est.plateau_upper
                                                                 : 2.0 * est.plateau_lower;
    est.max_p = model.p_value(inside, opts);
  }
  return est;
}

IntervalEstimate exact_limits(const Table2x2& t, double alpha, const ExactOptions& opts,
                              LimitConstruction construction) {
  check_alpha(alpha);
  const ConditionalModel model(t);
  IntervalEstimate iv{0.0, kInf, alpha, IntervalMethod::Exact};
  if (model.degenerate()) return iv;

  const double start = start_log_psi(t);
  const bool paired = construction == LimitConstruction::PairedTails ||
                      opts.rule == TwoSidedRule::TwiceSmallerTail;
  if (paired) {
    // p(psi) > alpha  <=>  both adjusted tails exceed alpha/2.
    const double half = 0.5 * alpha;
    if (model.a_obs() > model.a_min()) {
      iv.lower = std::exp(detail::solve_increasing(
          [&](double x) { return model.adjusted_tail(std::exp(x), Tail::Upper, opts.mid_p); },
          half, start));
    }
    if (model.a_obs() < model.a_max()) {
      iv.upper = std::exp(detail::solve_decreasing(
          [&](double x) { return model.adjusted_tail(std::exp(x), Tail::Lower, opts.mid_p); },
          half, start));
    }
    return iv;
  }

  // The minimum-likelihood P-value is not monotone on either side of its
  // plateau, so bracket outward from the plateau and bisect to a crossing.
  const auto [plo, phi] = mode_range(t, model);
  double centre = 0.0;
  if (plo > 0.0 && std::isfinite(phi)) {
    centre = 0.5 * (std::log(plo) + std::log(phi));
  } else if (plo > 0.0) {
    centre = std::log(plo) + 1.0;
  } else {
    centre = std::log(phi) - 1.0;
  }
  const auto p_at = [&](double x) { return model.p_value(std::exp(x), opts); };
  // Below the plateau p increases with psi, above it p decreases.
  const auto bisect_lower = [&]() {
    double hi = centre;
    double lo = centre;
    double step = 1.0;
    do {
      hi = lo;
      lo = centre - step;
      step *= 2.0;
      if (lo < -detail::kLogPsiLimit) return -kInf;
    } while (p_at(lo) > alpha);
    while (hi - lo > detail::kLogPsiTolerance) {
      const double mid = 0.5 * (lo + hi);
      (p_at(mid) > alpha ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const auto bisect_upper = [&]() {
    double lo = centre;
    double hi = centre;
    double step = 1.0;
    do {
      lo = hi;
      hi = centre + step;
      step *= 2.0;
      if (hi > detail::kLogPsiLimit) return kInf;
    } while (p_at(hi) > alpha);
    while (hi - lo > detail::kLogPsiTolerance) {
      const double mid = 0.5 * (lo + hi);
      (p_at(mid) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  if (model.a_obs() > model.a_min()) iv.lower = std::exp(bisect_lower());
  if (model.a_obs() < model.a_max()) iv.upper = std::exp(bisect_upper());
  return iv;
}

}  // namespace compat
