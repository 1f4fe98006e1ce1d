#include "compat/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "compat/asymptotic.hpp"
#include "compat/error.hpp"
#include "compat/exact.hpp"
#include "compat/special.hpp"

namespace compat {

void Scenario::validate() const {
  if (n_exposed < 1 || n_unexposed < 1) {
    throw Error(ErrorKind::InvalidSpec, "group sizes must be at least 1");
  }
  if (!(baseline_risk > 0.0 && baseline_risk < 1.0)) {
    throw Error(ErrorKind::InvalidSpec, "baseline risk must lie in (0, 1)");
  }
  if (!(or_pop > 0.0) || !std::isfinite(or_pop)) {
    throw Error(ErrorKind::InvalidSpec, "population odds ratio must be positive and finite");
  }
}

double Scenario::exposed_risk() const {
  const double odds = baseline_risk / (1.0 - baseline_risk) * or_pop;
  return odds / (1.0 + odds);
}

std::string Scenario::describe() const {
  std::ostringstream os;
  os.precision(15);
  if (!label.empty()) os << label << ": ";
  os << "n_exposed=" << n_exposed << " n_unexposed=" << n_unexposed
     << " baseline_risk=" << baseline_risk << " or_pop=" << or_pop;
  return os.str();
}

BinomialSampler::BinomialSampler(Count n, double p) {
  const auto size = static_cast<std::size_t>(n + 1);
  std::vector<double> log_pmf(size);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  double top = -std::numeric_limits<double>::infinity();
  for (Count k = 0; k <= n; ++k) {
    const double v = special::log_choose(n, k) + static_cast<double>(k) * lp +
                     static_cast<double>(n - k) * lq;
    log_pmf[static_cast<std::size_t>(k)] = v;
    top = std::max(top, v);
  }
  cdf_.resize(size);
  double run = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    run += std::exp(log_pmf[k] - top);
    cdf_[k] = run;
  }
  for (double& c : cdf_) c /= run;
  cdf_.back() = 1.0;
}

Count BinomialSampler::draw(double u) const noexcept {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto k = static_cast<Count>(it - cdf_.begin());
  return std::min<Count>(k, static_cast<Count>(cdf_.size()) - 1);
}

namespace {

const Scenario& checked(const Scenario& sc) {
  sc.validate();
  return sc;
}

}  // namespace

TableSampler::TableSampler(const Scenario& sc)
    : n_exposed_(checked(sc).n_exposed),
      n_unexposed_(sc.n_unexposed),
      exposed_(sc.n_exposed, sc.exposed_risk()),
      unexposed_(sc.n_unexposed, sc.baseline_risk) {}

Table2x2 TableSampler::draw(Philox4x32& rng) const {
  const Count a = exposed_.draw(rng.uniform());
  const Count c = unexposed_.draw(rng.uniform());
  return {a, n_exposed_ - a, c, n_unexposed_ - c};
}

std::string_view to_string(TestMethod m) {
  switch (m) {
    case TestMethod::Exact: return "exact";
    case TestMethod::Pearson: return "pearson";
    case TestMethod::Wald: return "wald";
  }
  return "exact";
}

TestMethod test_method_from_string(std::string_view s) {
  if (s == "exact") return TestMethod::Exact;
  if (s == "pearson") return TestMethod::Pearson;
  if (s == "wald") return TestMethod::Wald;
  throw Error(ErrorKind::ParseError, "unknown test method '" + std::string(s) + "'");
}

double null_p_value(const Table2x2& t, TestMethod method) {
  const bool zero_margin =
      t.cases() == 0 || t.noncases() == 0 || t.exposed() == 0 || t.unexposed() == 0;
  if (zero_margin) return 1.0;
  switch (method) {
    case TestMethod::Exact: return ConditionalModel(t).p_value(1.0, {});
    case TestMethod::Pearson: return pearson_chi2(t).p;
    case TestMethod::Wald:
      if (t.a() == 0 || t.b() == 0 || t.c() == 0 || t.d() == 0) return 1.0;
      return wald_p({log_sample_or(t), log_or_se(t), 0.0});
  }
  return 1.0;
}

double binomial_mc_error(double est, std::int64_t n) {
  if (n <= 0) return 0.0;
  return std::sqrt(std::max(0.0, est * (1.0 - est)) / static_cast<double>(n));
}

}  // namespace compat
