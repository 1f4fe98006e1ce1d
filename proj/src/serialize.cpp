#include "compat/serialize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "compat/error.hpp"

namespace compat {

json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorKind::ParseError, "expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

namespace {

std::string_view to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::Finite: return "finite";
    case MeasureKind::PositiveInfinite: return "infinite";
    case MeasureKind::Undefined: return "undefined";
  }
  return "undefined";
}

MeasureKind measure_kind_from_string(const std::string& s) {
  if (s == "finite") return MeasureKind::Finite;
  if (s == "infinite") return MeasureKind::PositiveInfinite;
  if (s == "undefined") return MeasureKind::Undefined;
  throw Error(ErrorKind::ParseError, "unknown measure kind '" + s + "'");
}

EstimateKind estimate_kind_from_string(const std::string& s) {
  for (auto k : {EstimateKind::Interior, EstimateKind::BoundaryZero, EstimateKind::BoundaryInfinite,
                 EstimateKind::Undefined}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::ParseError, "unknown estimate kind '" + s + "'");
}

Side side_from_string(const std::string& s) {
  for (auto k : {Side::Lower, Side::Upper, Side::TwoSided}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::ParseError, "unknown side '" + s + "'");
}

double num(const json& j, const char* key) { return number_from_json(j.at(key)); }

}  // namespace

void to_json(json& j, const Measure& m) {
  j = json{{"kind", to_string(m.kind)}, {"value", m.value}};
}

void from_json(const json& j, Measure& m) {
  m.kind = measure_kind_from_string(j.at("kind").get<std::string>());
  m.value = j.at("value").get<double>();
}

void to_json(json& j, const AssociationSummary& s) {
  json expected = json::array();
  for (double e : s.expected) expected.push_back(e);
  j = json{{"rd", s.rd},
           {"rr", s.rr},
           {"odds_ratio", s.odds_ratio},
           {"p_exposed", s.p_exposed},
           {"p_unexposed", s.p_unexposed},
           {"odds_exposed", s.odds_exposed},
           {"odds_unexposed", s.odds_unexposed},
           {"expected", expected}};
}

void from_json(const json& j, AssociationSummary& s) {
  j.at("rd").get_to(s.rd);
  j.at("rr").get_to(s.rr);
  j.at("odds_ratio").get_to(s.odds_ratio);
  j.at("p_exposed").get_to(s.p_exposed);
  j.at("p_unexposed").get_to(s.p_unexposed);
  j.at("odds_exposed").get_to(s.odds_exposed);
  j.at("odds_unexposed").get_to(s.odds_unexposed);
  const auto& e = j.at("expected");
  if (!e.is_array() || e.size() != 4) throw Error(ErrorKind::ParseError, "expected needs 4 counts");
  for (std::size_t i = 0; i < 4; ++i) s.expected[i] = e[i].get<double>();
}

void to_json(json& j, const IntervalEstimate& iv) {
  j = json{{"lower", number_to_json(iv.lower)},
           {"upper", number_to_json(iv.upper)},
           {"alpha", iv.alpha},
           {"method", to_string(iv.method)},
           {"scale", "odds-ratio"}};
}

void from_json(const json& j, IntervalEstimate& iv) {
  iv.lower = num(j, "lower");
  iv.upper = num(j, "upper");
  iv.alpha = j.at("alpha").get<double>();
  iv.method = interval_method_from_string(j.at("method").get<std::string>());
}

void to_json(json& j, const ExactPValue& p) {
  j = json{{"p", p.p},
           {"psi", p.psi},
           {"side", to_string(p.side)},
           {"rule", to_string(p.rule)},
           {"mid_p", p.mid_p}};
}

void from_json(const json& j, ExactPValue& p) {
  p.p = j.at("p").get<double>();
  p.psi = j.at("psi").get<double>();
  p.side = side_from_string(j.at("side").get<std::string>());
  p.rule = two_sided_rule_from_string(j.at("rule").get<std::string>());
  p.mid_p = j.at("mid_p").get<bool>();
}

void to_json(json& j, const PointEstimate& e) {
  j = json{{"kind", to_string(e.kind)},
           {"estimate", number_to_json(e.estimate)},
           {"plateau_lower", number_to_json(e.plateau_lower)},
           {"plateau_upper", number_to_json(e.plateau_upper)},
           {"max_p", e.max_p},
           {"cmle", number_to_json(e.cmle)},
           {"discrepancy", e.discrepancy}};
}

void from_json(const json& j, PointEstimate& e) {
  e.kind = estimate_kind_from_string(j.at("kind").get<std::string>());
  e.estimate = num(j, "estimate");
  e.plateau_lower = num(j, "plateau_lower");
  e.plateau_upper = num(j, "plateau_upper");
  e.max_p = j.at("max_p").get<double>();
  e.cmle = num(j, "cmle");
  e.discrepancy = j.at("discrepancy").get<double>();
}

void to_json(json& j, const Chi2Result& r) {
  j = json{{"t", r.t}, {"df", r.df}, {"p", r.p}};
}

void from_json(const json& j, Chi2Result& r) {
  r.t = j.at("t").get<double>();
  r.df = j.at("df").get<int>();
  r.p = j.at("p").get<double>();
}

void to_json(json& j, const CompatibilityPoint& p) {
  j = json{{"psi", p.psi}, {"p", p.p}, {"s", number_to_json(p.s)}};
}

void from_json(const json& j, CompatibilityPoint& p) {
  p.psi = j.at("psi").get<double>();
  p.p = j.at("p").get<double>();
  p.s = num(j, "s");
}

void to_json(json& j, const CompatibilityCurve& c) {
  j = json{{"method", to_string(c.method)},
           {"source", c.source},
           {"alpha_marks", c.alpha_marks},
           {"argmax_psi", c.argmax_psi},
           {"p_max", c.p_max},
           {"points", c.points}};
}

void from_json(const json& j, CompatibilityCurve& c) {
  c.method = curve_method_from_string(j.at("method").get<std::string>());
  c.source = j.at("source").get<std::string>();
  c.alpha_marks = j.value("alpha_marks", std::vector<double>{});
  c.argmax_psi = j.value("argmax_psi", 0.0);
  c.p_max = j.value("p_max", 0.0);
  c.points = j.at("points").get<std::vector<CompatibilityPoint>>();
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    if (!(c.points[i].psi > c.points[i - 1].psi)) {
      throw Error(ErrorKind::ParseError, "curve points must have strictly increasing psi");
    }
  }
}

void to_json(json& j, const TestDecision& d) {
  j = json{{"p", d.p ? json(*d.p) : json(nullptr)},
           {"alpha", d.alpha},
           {"decision", to_string(d.decision)}};
}

void from_json(const json& j, TestDecision& d) {
  const auto& p = j.at("p");
  d.p = p.is_null() ? std::nullopt : std::optional<double>(p.get<double>());
  d.alpha = j.at("alpha").get<double>();
  const auto text = j.at("decision").get<std::string>();
  if (text == "reject") {
    d.decision = Decision::Reject;
  } else if (text == "fail-to-reject") {
    d.decision = Decision::FailToReject;
  } else {
    throw Error(ErrorKind::ParseError, "unknown decision '" + text + "'");
  }
}

void to_json(json& j, const PowerSpec& s) {
  j = json{{"n_exposed", s.n_exposed},   {"n_unexposed", s.n_unexposed},
           {"baseline_risk", s.baseline_risk}, {"or_pop", s.or_pop},
           {"alpha", s.alpha},           {"test", to_string(s.test)},
           {"n_sims", s.n_sims},         {"seed", s.seed}};
}

void from_json(const json& j, PowerSpec& s) {
  s.n_exposed = j.at("n_exposed").get<Count>();
  s.n_unexposed = j.at("n_unexposed").get<Count>();
  s.baseline_risk = j.at("baseline_risk").get<double>();
  s.or_pop = j.at("or_pop").get<double>();
  s.alpha = j.at("alpha").get<double>();
  s.test = test_method_from_string(j.at("test").get<std::string>());
  s.n_sims = j.at("n_sims").get<std::int64_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const PowerPoint& p) {
  j = json{{"or_pop", p.or_pop}, {"power", p.power}, {"beta", p.beta}, {"mc_error", p.mc_error}};
}

void from_json(const json& j, PowerPoint& p) {
  p.or_pop = j.at("or_pop").get<double>();
  p.power = j.at("power").get<double>();
  p.beta = j.at("beta").get<double>();
  p.mc_error = j.at("mc_error").get<double>();
}

void to_json(json& j, const IntervalPrior& p) {
  j = json{{"lower", p.lower}, {"upper", p.upper}, {"level", p.level}, {"scale", to_string(p.scale)}};
}

void from_json(const json& j, IntervalPrior& p) {
  p.lower = j.at("lower").get<double>();
  p.upper = j.at("upper").get<double>();
  p.level = j.at("level").get<double>();
  p.scale = ratio_scale_from_string(j.value("scale", std::string("odds-ratio")));
}

void to_json(json& j, const PriorData& p) {
  j = json{{"cases_per_arm", p.cases_per_arm},
           {"total_cases", p.total_cases},
           {"required_cases_per_arm", p.required_cases_per_arm},
           {"required_total_cases", p.required_total_cases},
           {"implied_se", p.implied_se},
           {"center_log", p.center_log},
           {"scale", to_string(p.scale)}};
}

void from_json(const json& j, PriorData& p) {
  p.cases_per_arm = j.at("cases_per_arm").get<double>();
  p.total_cases = j.at("total_cases").get<double>();
  p.required_cases_per_arm = j.at("required_cases_per_arm").get<std::int64_t>();
  p.required_total_cases = j.at("required_total_cases").get<std::int64_t>();
  p.implied_se = j.at("implied_se").get<double>();
  p.center_log = j.at("center_log").get<double>();
  p.scale = ratio_scale_from_string(j.at("scale").get<std::string>());
}

void to_json(json& j, const AugmentedFit& f) {
  j = json{{"log_or_posterior", number_to_json(f.log_or_posterior)},
           {"se_posterior", number_to_json(f.se_posterior)},
           {"frequentist_log_or", number_to_json(f.frequentist_log_or)},
           {"frequentist_se", number_to_json(f.frequentist_se)},
           {"frequentist_boundary", f.frequentist_boundary},
           {"prior_used", f.prior_used},
           {"prior_center_log", f.prior_center_log},
           {"prior_pseudo_cases", f.prior_pseudo_cases},
           {"prior_rescale", f.prior_rescale},
           {"converged", f.converged},
           {"iterations", f.iterations}};
}

void from_json(const json& j, AugmentedFit& f) {
  f.log_or_posterior = num(j, "log_or_posterior");
  f.se_posterior = num(j, "se_posterior");
  f.frequentist_log_or = num(j, "frequentist_log_or");
  f.frequentist_se = num(j, "frequentist_se");
  f.frequentist_boundary = j.at("frequentist_boundary").get<bool>();
  f.prior_used = j.at("prior_used").get<bool>();
  f.prior_center_log = j.at("prior_center_log").get<double>();
  f.prior_pseudo_cases = j.at("prior_pseudo_cases").get<double>();
  f.prior_rescale = j.at("prior_rescale").get<double>();
  f.converged = j.at("converged").get<bool>();
  f.iterations = j.at("iterations").get<int>();
}

void to_json(json& j, const Scenario& s) {
  j = json{{"n_exposed", s.n_exposed},
           {"n_unexposed", s.n_unexposed},
           {"baseline_risk", s.baseline_risk},
           {"or_pop", s.or_pop},
           {"label", s.label}};
}

void from_json(const json& j, Scenario& s) {
  s.n_exposed = j.at("n_exposed").get<Count>();
  s.n_unexposed = j.at("n_unexposed").get<Count>();
  s.baseline_risk = j.at("baseline_risk").get<double>();
  s.or_pop = j.at("or_pop").get<double>();
  s.label = j.value("label", std::string{});
}

void to_json(json& j, const SimReport& r) {
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = number_to_json(v);
  j = json{{"scenario", r.scenario ? json(*r.scenario) : json(nullptr)},
           {"method", r.method},
           {"n_sims", r.n_sims},
           {"seed", r.seed},
           {"estimate", number_to_json(r.estimate)},
           {"mc_error", number_to_json(r.mc_error)},
           {"extras", extras}};
}

void from_json(const json& j, SimReport& r) {
  const auto& sc = j.at("scenario");
  r.scenario = sc.is_null() ? std::nullopt : std::optional<Scenario>(sc.get<Scenario>());
  r.method = j.at("method").get<std::string>();
  r.n_sims = j.at("n_sims").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.estimate = num(j, "estimate");
  r.mc_error = num(j, "mc_error");
  r.extras.clear();
  for (const auto& [k, v] : j.at("extras").items()) r.extras[k] = number_from_json(v);
}

std::vector<Scenario> scenarios_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    if (!j.is_array()) throw Error(ErrorKind::ParseError, "scenario file must hold a JSON array");
    auto out = j.get<std::vector<Scenario>>();
    for (const auto& s : out) s.validate();
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid scenario JSON: ") + e.what());
  }
}

}  // namespace compat

compat::Table2x2 nlohmann::adl_serializer<compat::Table2x2>::from_json(const nlohmann::json& j) {
  using compat::Count;
  return {j.at("a").get<Count>(), j.at("b").get<Count>(), j.at("c").get<Count>(),
          j.at("d").get<Count>()};
}

void nlohmann::adl_serializer<compat::Table2x2>::to_json(nlohmann::json& j,
                                                         const compat::Table2x2& t) {
  j = nlohmann::json{{"a", t.a()}, {"b", t.b()}, {"c", t.c()}, {"d", t.d()}};
}
