#include "compat/prior.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "compat/error.hpp"
#include "compat/special.hpp"

namespace compat {

std::string_view to_string(RatioScale s) {
  return s == RatioScale::OddsRatio ? "odds-ratio" : "rate-ratio";
}

RatioScale ratio_scale_from_string(std::string_view s) {
  if (s == "odds-ratio") return RatioScale::OddsRatio;
  if (s == "rate-ratio") return RatioScale::RateRatio;
  throw Error(ErrorKind::ParseError, "unknown ratio scale '" + std::string(s) + "'");
}

PriorData prior_to_data(const IntervalPrior& prior) {
  if (!(prior.lower > 0.0) || !std::isfinite(prior.upper)) {
    throw Error(ErrorKind::InvalidSpec, "prior limits must be positive and finite");
  }
  if (prior.lower == prior.upper) {
    throw Error(ErrorKind::DegeneratePrior, "prior limits coincide");
  }
  if (prior.lower > prior.upper) throw Error(ErrorKind::InvalidSpec, "prior lower limit exceeds upper");
  if (!(prior.level > 0.0 && prior.level < 1.0)) {
    throw Error(ErrorKind::InvalidSpec, "prior level must lie in (0, 1)");
  }
  const double z = special::normal_upper_quantile(0.5 * (1.0 - prior.level));
  const double width = std::log(prior.upper) - std::log(prior.lower);
  PriorData out;
  out.scale = prior.scale;
  out.implied_se = width / (2.0 * z);
  out.cases_per_arm = 2.0 / (out.implied_se * out.implied_se);
  out.total_cases = 2.0 * out.cases_per_arm;
  // Guard against 231.0000000001 from rounding in the quantile.
  out.required_cases_per_arm = static_cast<std::int64_t>(std::ceil(out.cases_per_arm - 1e-9));
  out.required_total_cases = 2 * out.required_cases_per_arm;
  out.center_log = 0.5 * (std::log(prior.upper) + std::log(prior.lower));
  return out;
}

IntervalPrior prior_from_data(const PriorData& data, double level) {
  const double z = special::normal_upper_quantile(0.5 * (1.0 - level));
  const double se = std::sqrt(2.0 / data.cases_per_arm);
  return {std::exp(data.center_log - z * se), std::exp(data.center_log + z * se), level, data.scale};
}

namespace {

// One binomial row of a grouped logistic model.
struct Row {
  double trials;
  double events;
  Eigen::VectorXd x;
  double offset;
};

double softplus(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

double log_likelihood(const std::vector<Row>& rows, const Eigen::VectorXd& theta) {
  double ll = 0.0;
  for (const auto& r : rows) {
    const double eta = r.x.dot(theta) + r.offset;
    ll += r.events * eta - r.trials * softplus(eta);
  }
  return ll;
}

struct IrlsResult {
  Eigen::VectorXd theta;
  Eigen::MatrixXd covariance;
  int iterations = 0;
};

IrlsResult fit_logistic(const std::vector<Row>& rows, Eigen::Index dim) {
  constexpr int kMaxIterations = 100;
  constexpr double kGradientTolerance = 1e-10;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  double ll = log_likelihood(rows, theta);
  double prev_gain = std::numeric_limits<double>::infinity();
  int flat = 0;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& r : rows) {
      const double mu = sigmoid(r.x.dot(theta) + r.offset);
      grad += (r.events - r.trials * mu) * r.x;
      info += r.trials * mu * (1.0 - mu) * r.x * r.x.transpose();
    }
    const auto ldlt = info.ldlt();
    const auto covariance = [&]() -> Eigen::MatrixXd { return ldlt.solve(Eigen::MatrixXd::Identity(dim, dim)); };
    if (grad.lpNorm<Eigen::Infinity>() < kGradientTolerance) return {theta, covariance(), iter - 1};

    const Eigen::VectorXd step = ldlt.solve(grad);
    // Predicted log-likelihood gain of the Newton step. With large
    // pseudo-counts the gradient bottoms out above the tolerance at the
    // rounding floor; the gain then stops shrinking.
    const double gain = 0.5 * grad.dot(step);
    const double size = std::max(1.0, std::abs(ll));
    if (gain < 1e-24 * size) return {theta + step, covariance(), iter};
    flat = (gain > 0.5 * prev_gain && gain < 1e-10 * size) ? flat + 1 : 0;
    if (flat >= 3) return {theta, covariance(), iter - 1};
    prev_gain = gain;

    // Halve only on a decrease beyond rounding noise in the log likelihood.
    const double noise = 1e-13 * size;
    double scale = 1.0;
    Eigen::VectorXd next = theta + step;
    double next_ll = log_likelihood(rows, next);
    for (int halvings = 0; halvings < 50 && next_ll < ll - noise; ++halvings) {
      scale *= 0.5;
      next = theta + scale * step;
      next_ll = log_likelihood(rows, next);
    }
    if (next_ll < ll - noise) break;
    theta = next;
    ll = next_ll;
  }
  throw Error(ErrorKind::NonConvergence, "logistic fit did not converge in 100 iterations");
}

}  // namespace

AugmentedFit augment_and_fit(const Table2x2& t, const std::optional<PriorData>& prior,
                            const AugmentOptions& opts) {
  if (t.cases() == 0 || t.noncases() == 0) {
    throw Error(ErrorKind::SeparatedData,
                "observed table has no cases or no noncases, its intercept has no finite estimate");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto a = static_cast<double>(t.a());
  const auto b = static_cast<double>(t.b());
  const auto c = static_cast<double>(t.c());
  const auto d = static_cast<double>(t.d());

  AugmentedFit fit;
  fit.frequentist_boundary = t.a() == 0 || t.b() == 0 || t.c() == 0 || t.d() == 0;
  if (fit.frequentist_boundary) {
    fit.frequentist_log_or = log_sample_or(t);
    fit.frequentist_se = kInf;
  } else {
    Eigen::Vector2d exposed(1.0, 1.0);
    Eigen::Vector2d unexposed(1.0, 0.0);
    const std::vector<Row> rows{{a + b, a, exposed, 0.0}, {c + d, c, unexposed, 0.0}};
    const auto res = fit_logistic(rows, 2);
    fit.frequentist_log_or = res.theta(1);
    fit.frequentist_se = std::sqrt(res.covariance(1, 1));
    fit.iterations = res.iterations;
  }
  fit.converged = !fit.frequentist_boundary;

  if (!prior) {
    fit.log_or_posterior = fit.frequentist_log_or;
    fit.se_posterior = fit.frequentist_se;
    return fit;
  }

  const double variance = prior->implied_se * prior->implied_se;
  const double floor = 2.0 / kPriorNoncasesPerArm;
  if (!(variance > floor)) {
    throw Error(ErrorKind::DegeneratePrior,
                "prior is too concentrated to encode with the fixed pseudo-noncase count");
  }
  if (!(opts.rescale >= 1.0) || !std::isfinite(opts.rescale)) {
    throw Error(ErrorKind::InvalidSpec, "prior rescale factor must be finite and at least 1");
  }
  // 2/A + 2/M = implied_se^2 so the pseudo-table's Woolf variance matches exactly.
  const double pseudo_cases = 2.0 / (variance - floor);
  // Rescaling by S multiplies both pseudo-counts by S^2 and codes exposure
  // as 1/S. The variance is unchanged while the quartic term of the pseudo
  // log likelihood, the part that is not normal, shrinks by S^2.
  const double s2 = opts.rescale * opts.rescale;
  const double m = kPriorNoncasesPerArm * s2;
  const double cases = pseudo_cases * s2;
  const double coded = 1.0 / opts.rescale;

  // Columns: observed intercept, prior intercept, exposure.
  const auto x = [](double s0, double s1, double e) {
    Eigen::VectorXd v(3);
    v << s0, s1, e;
    return v;
  };
  std::vector<Row> rows;
  if (t.exposed() > 0) rows.push_back({a + b, a, x(1, 0, 1), 0.0});
  if (t.unexposed() > 0) rows.push_back({c + d, c, x(1, 0, 0), 0.0});
  // Balanced pseudo-arms with an offset so that their own log odds ratio
  // estimate is the prior centre.
  rows.push_back({cases + m, cases, x(0, 1, coded), -prior->center_log * coded});
  rows.push_back({cases + m, cases, x(0, 1, 0), 0.0});

  const auto res = fit_logistic(rows, 3);
  fit.prior_used = true;
  fit.prior_center_log = prior->center_log;
  fit.prior_pseudo_cases = pseudo_cases;
  fit.prior_rescale = opts.rescale;
  fit.log_or_posterior = res.theta(2);
  fit.se_posterior = std::sqrt(res.covariance(2, 2));
  fit.iterations = res.iterations;
  fit.converged = true;
  return fit;
}

}  // namespace compat
