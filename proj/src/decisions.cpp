#include "compat/decisions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "compat/error.hpp"
#include "compat/parallel.hpp"
#include "compat/special.hpp"

namespace compat {

std::string_view to_string(Decision d) {
  return d == Decision::Reject ? "reject" : "fail-to-reject";
}

TestDecision alpha_test(double p, double alpha) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidP, "P-value must lie in [0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidAlpha, "alpha must lie in (0, 1)");
  }
  return {p, alpha, p <= alpha ? Decision::Reject : Decision::FailToReject};
}

TestDecision interval_test(const IntervalEstimate& iv, double psi) {
  return {std::nullopt, iv.alpha, iv.contains(psi) ? Decision::FailToReject : Decision::Reject};
}

void PowerSpec::validate() const {
  scenario().validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidSpec, "alpha must lie in [0, 1]");
  if (n_sims < 1) throw Error(ErrorKind::InvalidSpec, "n_sims must be at least 1");
}

Scenario PowerSpec::scenario() const {
  return {n_exposed, n_unexposed, baseline_risk, or_pop, "power"};
}

namespace {

struct NullDraws {
  std::vector<double> p;  // replicate order
  double undefined_fraction = 0.0;
};

// Replicates whose test statistic does not exist carry p = 1 exactly; they
// are counted but never drive a rejection below alpha = 1.
NullDraws simulate_null_p(const PowerSpec& spec) {
  const TableSampler sampler(spec.scenario());
  NullDraws out;
  out.p.resize(static_cast<std::size_t>(spec.n_sims));
  std::vector<char> undefined(out.p.size());
  parallel_for(out.p.size(), [&](std::size_t r) {
    Philox4x32 rng(spec.seed, r);
    const Table2x2 t = sampler.draw(rng);
    const bool zero_margin =
        t.cases() == 0 || t.noncases() == 0 || t.exposed() == 0 || t.unexposed() == 0;
    const bool zero_cell = t.a() == 0 || t.b() == 0 || t.c() == 0 || t.d() == 0;
    undefined[r] = static_cast<char>(zero_margin || (spec.test == TestMethod::Wald && zero_cell));
    out.p[r] = null_p_value(t, spec.test);
  });
  std::int64_t n = 0;
  for (char f : undefined) n += f;
  out.undefined_fraction = static_cast<double>(n) / static_cast<double>(undefined.size());
  return out;
}

SimReport power_report(const PowerSpec& spec, double alpha, const std::vector<double>& p,
                       double undefined_fraction) {
  // alpha = 0 never rejects, even a P-value that underflowed to zero.
  std::int64_t rejections = 0;
  if (alpha > 0.0) {
    for (double v : p) rejections += v <= alpha ? 1 : 0;
  }
  SimReport rep;
  rep.scenario = spec.scenario();
  rep.method = "power/" + std::string(to_string(spec.test));
  rep.n_sims = spec.n_sims;
  rep.seed = spec.seed;
  rep.estimate = static_cast<double>(rejections) / static_cast<double>(spec.n_sims);
  rep.mc_error = binomial_mc_error(rep.estimate, spec.n_sims);
  rep.extras["alpha"] = alpha;
  rep.extras["beta"] = 1.0 - rep.estimate;
  rep.extras["undefined_fraction"] = undefined_fraction;
  return rep;
}

}  // namespace

SimReport power_mc(const PowerSpec& spec) {
  spec.validate();
  const auto draws = simulate_null_p(spec);
  return power_report(spec, spec.alpha, draws.p, draws.undefined_fraction);
}

std::vector<SimReport> power_mc_alphas(const PowerSpec& spec, std::span<const double> alphas) {
  spec.validate();
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorKind::InvalidSpec, "alpha must lie in [0, 1]");
  }
  const auto draws = simulate_null_p(spec);
  std::vector<SimReport> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(power_report(spec, a, draws.p, draws.undefined_fraction));
  return out;
}

std::vector<PowerPoint> power_curve(const PowerSpec& spec, std::span<const double> or_grid) {
  if (or_grid.empty()) throw Error(ErrorKind::InvalidGrid, "odds-ratio grid is empty");
  for (double psi : or_grid) {
    if (!(psi > 0.0) || !std::isfinite(psi)) {
      throw Error(ErrorKind::InvalidGrid, "grid odds ratios must be positive and finite");
    }
  }
  std::vector<PowerPoint> out;
  out.reserve(or_grid.size());
  for (double psi : or_grid) {
    PowerSpec s = spec;
    s.or_pop = psi;
    const SimReport rep = power_mc(s);
    out.push_back({psi, rep.estimate, 1.0 - rep.estimate, rep.mc_error});
  }
  return out;
}

double bonferroni(double alpha, std::int64_t k) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidAlpha, "alpha must lie in (0, 1)");
  if (k < 1) throw Error(ErrorKind::InvalidK, "number of tests must be at least 1");
  return alpha / static_cast<double>(k);
}

SimReport familywise_rate(double alpha, std::int64_t k, const Dependence& dependence) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidSpec, "alpha must lie in (0, 1)");
  if (k < 1) throw Error(ErrorKind::InvalidSpec, "number of tests must be at least 1");

  SimReport rep;
  rep.extras["alpha"] = alpha;
  rep.extras["k"] = static_cast<double>(k);
  if (std::holds_alternative<Independent>(dependence)) {
    rep.method = "familywise/independent";
    rep.estimate = -std::expm1(static_cast<double>(k) * std::log1p(-alpha));
    return rep;
  }
  if (std::holds_alternative<PerfectlyCorrelated>(dependence)) {
    rep.method = "familywise/perfectly-correlated";
    rep.estimate = alpha;
    return rep;
  }

  const auto& sim = std::get<SimulatedDependence>(dependence);
  if (!(sim.rho >= 0.0 && sim.rho <= 1.0)) throw Error(ErrorKind::InvalidSpec, "rho must lie in [0, 1]");
  if (sim.n_sims < 1) throw Error(ErrorKind::InvalidSpec, "n_sims must be at least 1");
  rep.method = "familywise/simulated";
  rep.n_sims = sim.n_sims;
  rep.seed = sim.seed;
  rep.extras["rho"] = sim.rho;

  // Two-sided rejection of a null z statistic: |z| >= critical.
  const double critical = special::normal_upper_quantile(0.5 * alpha);
  const double shared_w = std::sqrt(sim.rho);
  const double own_w = std::sqrt(1.0 - sim.rho);
  std::vector<char> any(static_cast<std::size_t>(sim.n_sims));
  parallel_for(any.size(), [&](std::size_t r) {
    Philox4x32 rng(sim.seed, r);
    const auto normal = [&] { return -special::normal_upper_quantile(rng.uniform()); };
    const double shared = normal();
    bool hit = false;
    for (std::int64_t i = 0; i < k; ++i) {
      const double z = shared_w * shared + own_w * normal();
      hit = hit || std::abs(z) >= critical;
    }
    any[r] = static_cast<char>(hit);
  });
  std::int64_t hits = 0;
  for (char h : any) hits += h;
  rep.estimate = static_cast<double>(hits) / static_cast<double>(sim.n_sims);
  rep.mc_error = binomial_mc_error(rep.estimate, sim.n_sims);
  rep.extras["independent_rate"] = -std::expm1(static_cast<double>(k) * std::log1p(-alpha));
  return rep;
}

}  // namespace compat
