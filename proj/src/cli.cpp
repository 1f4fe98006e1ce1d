#include "compat/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compat/asymptotic.hpp"
#include "compat/compatibility.hpp"
#include "compat/decisions.hpp"
#include "compat/error.hpp"
#include "compat/exact.hpp"
#include "compat/prior.hpp"
#include "compat/serialize.hpp"
#include "compat/simulate.hpp"
#include "compat/table.hpp"

namespace compat::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Text, Json, Csv };

struct Common {
  std::string format = "text";
  int precision = -1;
  std::string out_path;
};

struct Display {
  int p_digits = 3;
  int or_digits = 2;
  int s_digits = 1;
  int rd_digits = 3;
  int count_digits = 1;
  int rate_digits = 4;

  explicit Display(int precision) {
    if (precision >= 0) {
      p_digits = or_digits = s_digits = rd_digits = count_digits = rate_digits = precision;
    }
  }
};

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "undefined";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Halves round away from zero, so 1/16 shows as 0.063 at three digits.
  const double scale = std::pow(10.0, digits);
  const double r = std::abs(v) < 1e15 / scale ? std::round(v * scale) / scale : v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, r == 0.0 ? 0.0 : r);
  return buf;
}

std::string full(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string measure_text(const Measure& m, int digits) {
  switch (m.kind) {
    case MeasureKind::Finite: return fixed(m.value, digits);
    case MeasureKind::PositiveInfinite: return "inf";
    case MeasureKind::Undefined: break;
  }
  return "undefined";
}

Format parse_format(const std::string& s) {
  if (s == "text") return Format::Text;
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw UsageError("--format must be text, json or csv");
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + " expects comma-separated numbers, got '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + " is empty");
  return out;
}

// Table input. The printed orientation lists the outcome rows first and the
// unexposed column before the exposed one: (Y=1,X=0), (Y=1,X=1), (Y=0,X=0),
// (Y=0,X=1).
Table2x2 read_table(const std::string& text, const std::string& layout) {
  Table2x2 raw = [&] {
    try {
      return parse_table(text);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError) throw UsageError(e.what());
      throw;
    }
  }();
  if (layout == "canonical") return raw;
  if (layout == "printed") return {raw.b(), raw.d(), raw.a(), raw.c()};
  throw UsageError("--layout must be canonical or printed");
}

constexpr const char* kLayoutHelp =
    "Cell order of --table. canonical: exposed-case,exposed-noncase,unexposed-case,"
    "unexposed-noncase. printed: case-unexposed,case-exposed,noncase-unexposed,noncase-exposed "
    "(outcome rows with the unexposed column first)";

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char ch : f) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    } else {
      out += f;
    }
  }
  return out + "\n";
}

void require_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw UsageError("stochastic subcommands require --seed");
}

std::string decision_text(const TestDecision& d) {
  return std::string(to_string(d.decision)) + " at level alpha=" + full(d.alpha);
}

std::string interval_text(const IntervalEstimate& iv, const Display& disp) {
  return full(iv.alpha) + "-level compatibility interval (" + std::string(to_string(iv.method)) +
         "): (" + fixed(iv.lower, disp.or_digits) + ", " + fixed(iv.upper, disp.or_digits) + ")";
}

std::vector<std::string> sim_header(const SimReport& r) {
  std::vector<std::string> h{"label",  "n_exposed", "n_unexposed", "baseline_risk", "or_pop",
                             "method", "n_sims",    "seed",        "estimate",      "mc_error"};
  for (const auto& [k, v] : r.extras) h.push_back(k);
  return h;
}

std::vector<std::string> sim_fields(const SimReport& r) {
  std::vector<std::string> f;
  if (r.scenario) {
    f = {r.scenario->label, std::to_string(r.scenario->n_exposed),
         std::to_string(r.scenario->n_unexposed), full(r.scenario->baseline_risk),
         full(r.scenario->or_pop)};
  } else {
    f = {"", "", "", "", ""};
  }
  f.push_back(r.method);
  f.push_back(std::to_string(r.n_sims));
  f.push_back(std::to_string(r.seed));
  f.push_back(full(r.estimate));
  f.push_back(full(r.mc_error));
  for (const auto& [k, v] : r.extras) f.push_back(full(v));
  return f;
}

std::string sim_text(const SimReport& r, const Display& disp) {
  std::ostringstream os;
  if (r.scenario) os << "scenario: " << r.scenario->describe() << "\n";
  os << "method: " << r.method << "\n";
  if (r.n_sims > 0) os << "replicates: " << r.n_sims << " (seed " << r.seed << ")\n";
  os << "estimate: " << fixed(r.estimate, disp.rate_digits);
  if (r.n_sims > 0) os << " (MC error " << fixed(r.mc_error, disp.rate_digits) << ")";
  os << "\n";
  for (const auto& [k, v] : r.extras) os << "  " << k << ": " << fixed(v, disp.rate_digits) << "\n";
  return os.str();
}

void emit_reports(const std::vector<SimReport>& reports, Format fmt, const Display& disp,
                  std::ostream& out) {
  switch (fmt) {
    case Format::Json:
      for (const auto& r : reports) out << json(r).dump() << "\n";
      return;
    case Format::Csv:
      if (!reports.empty()) out << csv_row(sim_header(reports.front()));
      for (const auto& r : reports) out << csv_row(sim_fields(r));
      return;
    case Format::Text:
      for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) out << "\n";
        out << sim_text(reports[i], disp);
      }
      return;
  }
}

struct ScenarioInput {
  std::string inline_spec;
  std::string file;
  std::string label;
};

std::vector<Scenario> read_scenarios(const ScenarioInput& in) {
  if (in.inline_spec.empty() == in.file.empty()) {
    throw UsageError("give exactly one of --scenario n_exposed,n_unexposed,baseline_risk,or_pop "
                     "and --scenarios FILE");
  }
  if (!in.file.empty()) {
    std::ifstream f(in.file);
    if (!f) throw UsageError("cannot read scenario file '" + in.file + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return scenarios_from_json(ss.str());
  }
  const auto v = parse_list(in.inline_spec, "--scenario");
  if (v.size() != 4) throw UsageError("--scenario expects n_exposed,n_unexposed,baseline_risk,or_pop");
  Scenario sc{static_cast<Count>(v[0]), static_cast<Count>(v[1]), v[2], v[3], in.label};
  if (static_cast<double>(sc.n_exposed) != v[0] || static_cast<double>(sc.n_unexposed) != v[1]) {
    throw UsageError("--scenario group sizes must be integers");
  }
  sc.validate();
  return {sc};
}

void add_scenario_options(CLI::App* cmd, ScenarioInput& in) {
  cmd->add_option("--scenario", in.inline_spec,
                  "n_exposed,n_unexposed,baseline_risk,or_pop (baseline risk is among the unexposed)");
  cmd->add_option("--scenarios", in.file, "JSON array of scenario objects");
  cmd->add_option("--label", in.label, "Label for an inline scenario");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compatibility (P-value function) analysis of 2x2 tables", "compat"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common common;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--format", common.format, "text, json or csv")->capture_default_str();
    cmd->add_option("--precision", common.precision, "Display digits (overrides the defaults)");
    cmd->add_option("--out", common.out_path, "Write the output to this file");
  };

  std::string table_text;
  std::string layout = "canonical";
  const auto add_table = [&](CLI::App* cmd) {
    cmd->add_option("--table", table_text, "Counts a,b,c,d")->required();
    cmd->add_option("--layout", layout, kLayoutHelp)->capture_default_str();
  };

  std::string rule = "twice-smaller-tail";
  bool mid_p = false;
  const auto add_exact = [&](CLI::App* cmd) {
    cmd->add_option("--rule", rule, "Two-sided rule: twice-smaller-tail or minimum-likelihood")
        ->capture_default_str();
    cmd->add_flag("--mid-p", mid_p, "Count half of the observed point probability");
  };

  std::string text_buffer;
  std::function<void()> action;
  std::optional<std::uint64_t> seed;
  double alpha = 0.05;
  std::optional<double> alpha_opt;
  std::string method = "exact";

  // describe ----------------------------------------------------------------
  auto* describe = app.add_subcommand("describe", "Proportions, RD, RR, OR and expected counts");
  add_common(describe);
  add_table(describe);

  // test --------------------------------------------------------------------
  auto* test = app.add_subcommand("test", "P-value, S-value and coin-toss equivalent for OR = psi");
  add_common(test);
  add_table(test);
  add_exact(test);
  double psi = 1.0;
  test->add_option("--or", psi, "Hypothesized odds ratio")->capture_default_str();
  test->add_option("--method", method, "exact, pearson or wald")->capture_default_str();
  test->add_option("--alpha", alpha_opt, "Also report the decision at this level");

  // compat-curve ------------------------------------------------------------
  auto* curve_cmd = app.add_subcommand("compat-curve", "P-value function over a grid of odds ratios");
  add_common(curve_cmd);
  add_table(curve_cmd);
  add_exact(curve_cmd);
  std::string curve_methods = "exact";
  std::optional<double> psi_min;
  std::optional<double> psi_max;
  int ppd = 200;
  std::string alpha_marks = "0.05";
  SvgOptions svg;
  std::string curve_format;
  curve_cmd->add_option("--method", curve_methods, "exact, wald, pearson; svg accepts a list")
      ->capture_default_str();
  curve_cmd->add_option("--psi-min", psi_min, "Smallest odds ratio (default estimate/64)");
  curve_cmd->add_option("--psi-max", psi_max, "Largest odds ratio (default estimate*64)");
  curve_cmd->add_option("--points-per-decade", ppd, "Log-uniform grid density")->capture_default_str();
  curve_cmd->add_option("--alpha-marks", alpha_marks, "Levels to annotate")->capture_default_str();
  curve_cmd->add_option("--curve-format", curve_format, "csv, json or svg (overrides --format)");
  curve_cmd->add_option("--width", svg.width, "SVG width")->capture_default_str();
  curve_cmd->add_option("--height", svg.height, "SVG height")->capture_default_str();

  // interval ----------------------------------------------------------------
  auto* interval = app.add_subcommand("interval", "Compatibility interval by test inversion");
  add_common(interval);
  add_table(interval);
  add_exact(interval);
  std::string construction = "two-sided";
  interval->add_option("--alpha", alpha, "Level")->capture_default_str();
  interval->add_option("--method", method, "exact, wald, pearson or all")->capture_default_str();
  interval->add_option("--construction", construction,
                       "two-sided (invert the two-sided P) or paired-tails (alpha/2 per tail)")
      ->capture_default_str();

  // svalue ------------------------------------------------------------------
  auto* svalue = app.add_subcommand("svalue", "S-value and coin-toss equivalent of a P-value");
  add_common(svalue);
  double p_in = 0.05;
  svalue->add_option("--p", p_in, "P-value")->required();

  // power / power-curve -----------------------------------------------------
  PowerSpec pspec;
  std::string test_name = "exact";
  const auto add_power = [&](CLI::App* cmd) {
    add_common(cmd);
    cmd->add_option("--n-exposed", pspec.n_exposed, "Exposed group size")->required();
    cmd->add_option("--n-unexposed", pspec.n_unexposed, "Unexposed group size")->required();
    cmd->add_option("--baseline", pspec.baseline_risk, "Risk among the unexposed")->required();
    cmd->add_option("--alpha", pspec.alpha, "Level in [0, 1]")->capture_default_str();
    cmd->add_option("--test", test_name, "exact, pearson or wald")->capture_default_str();
    cmd->add_option("--sims", pspec.n_sims, "Replicates")->capture_default_str();
    cmd->add_option("--seed", seed, "RNG seed (required)");
  };
  auto* power = app.add_subcommand("power", "Monte Carlo rejection rate of the OR = 1 test");
  add_power(power);
  power->add_option("--or", pspec.or_pop, "Population odds ratio")->required();
  auto* power_curve_cmd = app.add_subcommand("power-curve", "Power over a grid of odds ratios");
  add_power(power_curve_cmd);
  std::string or_grid;
  power_curve_cmd->add_option("--or-grid", or_grid, "Comma-separated odds ratios")->required();

  // bonferroni / familywise ---------------------------------------------------
  auto* bonf = app.add_subcommand("bonferroni", "Per-test cutoff alpha/k");
  add_common(bonf);
  std::int64_t k = 1;
  bonf->add_option("--alpha", alpha, "Familywise level")->capture_default_str();
  bonf->add_option("--k", k, "Number of tests")->required();

  auto* fwe = app.add_subcommand("familywise", "Chance of at least one rejection among k null tests");
  add_common(fwe);
  std::string dependence = "independent";
  double rho = 0.0;
  std::int64_t fwe_sims = kDefaultSims;
  fwe->add_option("--alpha", alpha, "Per-test level")->capture_default_str();
  fwe->add_option("--k", k, "Number of tests")->required();
  fwe->add_option("--dependence", dependence, "independent, perfectly-correlated or simulated")
      ->capture_default_str();
  fwe->add_option("--rho", rho, "Pairwise correlation for simulated dependence")->capture_default_str();
  fwe->add_option("--sims", fwe_sims, "Replicates for simulated dependence")->capture_default_str();
  fwe->add_option("--seed", seed, "RNG seed (required for simulated dependence)");

  // prior-data / bayes-fit ----------------------------------------------------
  IntervalPrior prior;
  std::string scale = "odds-ratio";
  auto* prior_cmd = app.add_subcommand("prior-data", "Express an interval prior as prior data");
  add_common(prior_cmd);
  prior_cmd->add_option("--lower", prior.lower, "Lower prior limit")->required();
  prior_cmd->add_option("--upper", prior.upper, "Upper prior limit")->required();
  prior_cmd->add_option("--level", prior.level, "Prior probability inside the limits")
      ->capture_default_str();
  prior_cmd->add_option("--scale", scale, "odds-ratio or rate-ratio")->capture_default_str();

  auto* bayes = app.add_subcommand("bayes-fit", "Frequentist fit, then prior-data-augmented fit");
  add_common(bayes);
  add_table(bayes);
  std::optional<double> prior_lower;
  std::optional<double> prior_upper;
  bayes->add_option("--lower", prior_lower, "Lower prior limit (omit both for no prior)");
  bayes->add_option("--upper", prior_upper, "Upper prior limit");
  bayes->add_option("--level", prior.level, "Prior probability inside the limits")
      ->capture_default_str();
  AugmentOptions augment;
  bayes->add_option("--prior-rescale", augment.rescale,
                    "Pseudo-data rescaling factor (1 = plain prior records)")
      ->capture_default_str();

  // simulations ---------------------------------------------------------------
  ScenarioInput scenario_in;
  std::int64_t n_sims = kDefaultSims;
  const auto add_sim = [&](CLI::App* cmd) {
    add_common(cmd);
    add_scenario_options(cmd, scenario_in);
    cmd->add_option("--sims", n_sims, "Replicates")->capture_default_str();
    cmd->add_option("--seed", seed, "RNG seed (required)");
  };
  auto* coverage = app.add_subcommand("coverage-sim", "Coverage rate of exact or Wald intervals");
  add_sim(coverage);
  coverage->add_option("--alpha", alpha, "Level")->capture_default_str();
  coverage->add_option("--method", method, "exact, wald or both (paired draws)")
      ->capture_default_str();
  auto* sparse = app.add_subcommand("sparse-sim", "Bias of the sample log odds ratio");
  add_sim(sparse);
  auto* filter = app.add_subcommand("filter-sim", "Estimate inflation among results with p <= alpha");
  add_sim(filter);
  filter->add_option("--alpha", alpha, "Filter level")->capture_default_str();
  filter->add_option("--test", test_name, "exact, pearson or wald")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string sub;
    for (auto* s : app.get_subcommands()) sub = s->get_name();
    err << "error: " << e.what() << "\n"
        << "hint: run 'compat " << (sub.empty() ? "" : sub + " ") << "--help'\n";
    return 2;
  }
  // --help on a subcommand is handled by CLI11 through CallForHelp above.

  std::ostringstream buffer;
  try {
    const Format fmt = parse_format(common.format);
    const Display disp(common.precision);
    const ExactOptions exact_opts{two_sided_rule_from_string(rule), mid_p};

    if (describe->parsed()) {
      const Table2x2 t = read_table(table_text, layout);
      const auto s = summarize(t);
      if (fmt == Format::Json) {
        buffer << json{{"table", t}, {"summary", s}}.dump(2) << "\n";
      } else if (fmt == Format::Csv) {
        buffer << csv_row({"a", "b", "c", "d", "rd", "rr", "or", "expected_a", "expected_b",
                           "expected_c", "expected_d"});
        buffer << csv_row({std::to_string(t.a()), std::to_string(t.b()), std::to_string(t.c()),
                           std::to_string(t.d()), full(s.rd.as_double()), full(s.rr.as_double()),
                           full(s.odds_ratio.as_double()), full(s.expected[0]), full(s.expected[1]),
                           full(s.expected[2]), full(s.expected[3])});
      } else {
        char row[160];
        buffer << "2x2 table (a,b,c,d = " << t.to_string() << ")\n";
        std::snprintf(row, sizeof row, "%-12s %10s %10s %10s\n", "", "case", "noncase", "total");
        buffer << row;
        std::snprintf(row, sizeof row, "%-12s %10lld %10lld %10lld\n", "exposed",
                      static_cast<long long>(t.a()), static_cast<long long>(t.b()),
                      static_cast<long long>(t.exposed()));
        buffer << row;
        std::snprintf(row, sizeof row, "%-12s %10lld %10lld %10lld\n", "unexposed",
                      static_cast<long long>(t.c()), static_cast<long long>(t.d()),
                      static_cast<long long>(t.unexposed()));
        buffer << row;
        std::snprintf(row, sizeof row, "%-12s %10lld %10lld %10lld\n", "total",
                      static_cast<long long>(t.cases()), static_cast<long long>(t.noncases()),
                      static_cast<long long>(t.total()));
        buffer << row;
        buffer << "proportion with outcome: exposed " << t.a() << "/" << t.exposed() << " = "
               << measure_text(s.p_exposed, disp.rd_digits) << ", unexposed " << t.c() << "/"
               << t.unexposed() << " = " << measure_text(s.p_unexposed, disp.rd_digits) << "\n";
        buffer << "RD=" << measure_text(s.rd, disp.rd_digits) << "\n";
        buffer << "RR=" << measure_text(s.rr, disp.or_digits) << "\n";
        buffer << "OR=" << measure_text(s.odds_ratio, disp.or_digits) << "\n";
        buffer << "expected under independence: exposed " << fixed(s.expected[0], disp.count_digits)
               << "/" << fixed(s.expected[1], disp.count_digits) << ", unexposed "
               << fixed(s.expected[2], disp.count_digits) << "/"
               << fixed(s.expected[3], disp.count_digits) << " (case/noncase)\n";
      }
    } else if (test->parsed()) {
      const Table2x2 t = read_table(table_text, layout);
      double p = 0.0;
      json detail;
      std::string label;
      if (method == "exact") {
        const auto r = exact_p(t, psi, exact_opts);
        p = r.p;
        detail = r;
        label = "exact (" + std::string(to_string(exact_opts.rule)) + (mid_p ? ", mid-p" : "") + ")";
      } else if (method == "pearson") {
        const auto r = pearson_chi2_at(t, psi);
        p = r.p;
        detail = r;
        label = "pearson chi-square";
      } else if (method == "wald") {
        const WaldInput in{log_sample_or(t), log_or_se(t), std::log(psi)};
        p = wald_p(in);
        detail = json{{"b", in.b}, {"se", in.se}, {"c", in.c}, {"z", std::abs(in.b - in.c) / in.se}};
        label = "wald";
      } else {
        throw UsageError("--method must be exact, pearson or wald");
      }
      const double s = s_value(p);
      std::optional<TestDecision> decision;
      if (alpha_opt) decision = alpha_test(p, *alpha_opt);
      if (fmt == Format::Json) {
        json j{{"table", t},     {"psi", psi},       {"method", method},
               {"p", p},         {"s", number_to_json(s)}, {"detail", detail}};
        if (p > 0.0) j["coin_tosses"] = coin_toss_equivalent(p);
        if (decision) j["decision"] = *decision;
        buffer << j.dump(2) << "\n";
      } else if (fmt == Format::Csv) {
        buffer << csv_row({"psi", "method", "p", "s", "coin_tosses", "decision"});
        buffer << csv_row({full(psi), method, full(p), full(s),
                           p > 0.0 ? std::to_string(coin_toss_equivalent(p)) : "",
                           decision ? std::string(to_string(decision->decision)) : ""});
      } else {
        buffer << "hypothesis OR=" << full(psi) << ", method " << label << "\n";
        buffer << "p=" << fixed(p, disp.p_digits) << "\n";
        buffer << "s=" << fixed(s, disp.s_digits) << " bits\n";
        if (p > 0.0) {
          const auto br = coin_toss_bracket(p);
          buffer << "coin-toss n=" << coin_toss_equivalent(p) << " (1/2^" << br.upper << " = "
                 << fixed(std::exp2(-br.upper), disp.p_digits) << ", 1/2^" << br.lower << " = "
                 << fixed(std::exp2(-br.lower), disp.p_digits) << ")\n";
        }
        if (decision) buffer << "decision: " << decision_text(*decision) << "\n";
      }
    } else if (curve_cmd->parsed()) {
      const Table2x2 t = read_table(table_text, layout);
      Grid grid = default_grid(t);
      if (psi_min) grid.psi_min = *psi_min;
      if (psi_max) grid.psi_max = *psi_max;
      grid.points_per_decade = ppd;
      const auto marks = parse_list(alpha_marks, "--alpha-marks");
      std::vector<CompatibilityCurve> curves;
      std::stringstream ms(curve_methods);
      std::string m;
      while (std::getline(ms, m, ',')) {
        CurveMethod cm{};
        try {
          cm = curve_method_from_string(m);
        } catch (const Error&) {
          throw UsageError("--method entries must be exact, wald or pearson");
        }
        curves.push_back(compatibility_curve(t, grid, cm, marks, exact_opts));
      }
      if (curves.empty()) throw UsageError("--method is empty");
      std::string cf = curve_format.empty() ? (fmt == Format::Text ? "text" : common.format)
                                            : curve_format;
      if (cf == "svg") {
        buffer << render_svg(curves, svg);
      } else if (cf == "csv" || cf == "json") {
        if (curves.size() != 1) throw UsageError("csv and json curves take a single --method");
        buffer << render_curve(curves.front(), curve_format_from_string(cf));
      } else if (cf == "text") {
        for (const auto& c : curves) {
          buffer << "P-value function (" << to_string(c.method) << ") for " << c.source << ": "
                 << c.points.size() << " points over [" << full(c.points.front().psi) << ", "
                 << full(c.points.back().psi) << "]\n";
          buffer << "  maximum p=" << fixed(c.p_max, disp.p_digits) << " at OR="
                 << fixed(c.argmax_psi, disp.or_digits) << "\n";
          for (double a : c.alpha_marks) {
            const auto x = curve_crossings(c, a);
            buffer << "  p=" << full(a) << " crossings: "
                   << (x.lower ? fixed(*x.lower, disp.or_digits) : "none") << ", "
                   << (x.upper ? fixed(*x.upper, disp.or_digits) : "none") << "\n";
          }
        }
      } else {
        throw UsageError("--curve-format must be csv, json or svg");
      }
    } else if (interval->parsed()) {
      const Table2x2 t = read_table(table_text, layout);
      LimitConstruction lc{};
      if (construction == "two-sided") {
        lc = LimitConstruction::TwoSidedInversion;
      } else if (construction == "paired-tails") {
        lc = LimitConstruction::PairedTails;
      } else {
        throw UsageError("--construction must be two-sided or paired-tails");
      }
      std::vector<IntervalEstimate> ivs;
      const bool all = method == "all";
      if (method == "exact" || all) ivs.push_back(exact_limits(t, alpha, exact_opts, lc));
      if (method == "pearson" || all) ivs.push_back(pearson_limits(t, alpha));
      if (method == "wald" || all) {
        if (all && (t.a() == 0 || t.b() == 0 || t.c() == 0 || t.d() == 0)) {
          // Omitted: no Wald interval with a zero cell.
        } else {
          ivs.push_back(wald_limits(log_sample_or(t), log_or_se(t), alpha));
        }
      }
      if (ivs.empty()) throw UsageError("--method must be exact, wald, pearson or all");
      std::optional<PointEstimate> est;
      if (method == "exact" || all) est = cmle_or(t, exact_opts);
      if (fmt == Format::Json) {
        json j{{"table", t}, {"intervals", ivs}};
        if (est) j["point_estimate"] = *est;
        buffer << j.dump(2) << "\n";
      } else if (fmt == Format::Csv) {
        buffer << csv_row({"method", "alpha", "lower", "upper"});
        for (const auto& iv : ivs) {
          buffer << csv_row({std::string(to_string(iv.method)), full(iv.alpha), full(iv.lower),
                             full(iv.upper)});
        }
      } else {
        for (const auto& iv : ivs) buffer << interval_text(iv, disp) << "\n";
        if (est) {
          buffer << "exact point estimate: ";
          if (est->kind == EstimateKind::Interior) {
            buffer << fixed(est->estimate, disp.or_digits) << " (midpoint of the p="
                   << fixed(est->max_p, disp.p_digits) << " plateau "
                   << fixed(est->plateau_lower, disp.or_digits) << " to "
                   << fixed(est->plateau_upper, disp.or_digits) << "); conditional MLE "
                   << fixed(est->cmle, disp.or_digits) << "\n";
          } else {
            buffer << to_string(est->kind) << "\n";
          }
        }
      }
    } else if (svalue->parsed()) {
      const double s = s_value(p_in);
      const int n = coin_toss_equivalent(p_in);
      const auto br = coin_toss_bracket(p_in);
      if (fmt == Format::Json) {
        buffer << json{{"p", p_in}, {"s", s}, {"coin_tosses", n},
                       {"bracket", {br.lower, br.upper}}}.dump(2)
               << "\n";
      } else if (fmt == Format::Csv) {
        buffer << csv_row({"p", "s", "coin_tosses"});
        buffer << csv_row({full(p_in), full(s), std::to_string(n)});
      } else {
        buffer << "p=" << full(p_in) << "\n";
        buffer << "s=" << fixed(s, disp.s_digits) << " bits\n";
        buffer << "coin-toss n=" << n << " (1/2^" << br.upper << " = "
               << fixed(std::exp2(-br.upper), disp.p_digits) << ", 1/2^" << br.lower << " = "
               << fixed(std::exp2(-br.lower), disp.p_digits) << ")\n";
      }
    } else if (power->parsed() || power_curve_cmd->parsed()) {
      require_seed(seed);
      pspec.seed = *seed;
      pspec.test = test_method_from_string(test_name);
      if (power->parsed()) {
        emit_reports({power_mc(pspec)}, fmt, disp, buffer);
      } else {
        const auto grid = parse_list(or_grid, "--or-grid");
        const auto pts = compat::power_curve(pspec, grid);
        if (fmt == Format::Json) {
          buffer << json{{"spec", pspec}, {"points", pts}}.dump(2) << "\n";
        } else if (fmt == Format::Csv) {
          buffer << csv_row({"or_pop", "power", "beta", "mc_error"});
          for (const auto& pt : pts) {
            buffer << csv_row({full(pt.or_pop), full(pt.power), full(pt.beta), full(pt.mc_error)});
          }
        } else {
          buffer << "power of the " << test_name << " test of OR=1 at alpha=" << full(pspec.alpha)
                 << " (" << pspec.n_sims << " replicates, seed " << pspec.seed << ")\n";
          for (const auto& pt : pts) {
            buffer << "  OR=" << fixed(pt.or_pop, disp.or_digits) << "  power="
                   << fixed(pt.power, disp.rate_digits) << "  beta=" << fixed(pt.beta, disp.rate_digits)
                   << "  (MC error " << fixed(pt.mc_error, disp.rate_digits) << ")\n";
          }
        }
      }
    } else if (bonf->parsed()) {
      const double cut = bonferroni(alpha, k);
      if (fmt == Format::Json) {
        buffer << json{{"alpha", alpha}, {"k", k}, {"per_test_alpha", cut}}.dump(2) << "\n";
      } else if (fmt == Format::Csv) {
        buffer << csv_row({"alpha", "k", "per_test_alpha"});
        buffer << csv_row({full(alpha), std::to_string(k), full(cut)});
      } else {
        buffer << "per-test cutoff alpha/k = " << full(alpha) << "/" << k << " = " << full(cut)
               << "\n";
      }
    } else if (fwe->parsed()) {
      Dependence dep;
      if (dependence == "independent") {
        dep = Independent{};
      } else if (dependence == "perfectly-correlated") {
        dep = PerfectlyCorrelated{};
      } else if (dependence == "simulated") {
        require_seed(seed);
        dep = SimulatedDependence{rho, fwe_sims, *seed};
      } else {
        throw UsageError("--dependence must be independent, perfectly-correlated or simulated");
      }
      emit_reports({familywise_rate(alpha, k, dep)}, fmt, disp, buffer);
    } else if (prior_cmd->parsed()) {
      prior.scale = ratio_scale_from_string(scale);
      const auto pd = prior_to_data(prior);
      if (fmt == Format::Json) {
        buffer << json{{"prior", prior}, {"prior_data", pd}}.dump(2) << "\n";
      } else if (fmt == Format::Csv) {
        buffer << csv_row({"lower", "upper", "level", "implied_se", "cases_per_arm",
                           "required_cases_per_arm", "required_total_cases"});
        buffer << csv_row({full(prior.lower), full(prior.upper), full(prior.level),
                           full(pd.implied_se), full(pd.cases_per_arm),
                           std::to_string(pd.required_cases_per_arm),
                           std::to_string(pd.required_total_cases)});
      } else {
        buffer << "prior: " << full(prior.level) << " probability that the " << to_string(pd.scale)
               << " lies in (" << full(prior.lower) << ", " << full(prior.upper) << ")\n";
        buffer << "log-ratio prior: mean " << fixed(pd.center_log, 4) << ", SD "
               << fixed(pd.implied_se, 4) << "\n";
        buffer << "equivalent balanced trial: " << fixed(pd.cases_per_arm, 2)
               << " cases per arm; at least " << pd.required_cases_per_arm << " cases per arm ("
               << pd.required_total_cases << " total) give limits this narrow\n";
      }
    } else if (bayes->parsed()) {
      const Table2x2 t = read_table(table_text, layout);
      std::optional<PriorData> pd;
      if (prior_lower.has_value() != prior_upper.has_value()) {
        throw UsageError("--lower and --upper go together");
      }
      if (prior_lower) {
        prior.lower = *prior_lower;
        prior.upper = *prior_upper;
        pd = prior_to_data(prior);
      }
      const auto fit = augment_and_fit(t, pd, augment);
      if (fmt == Format::Json) {
        buffer << json(fit).dump(2) << "\n";
      } else if (fmt == Format::Csv) {
        buffer << csv_row({"frequentist_log_or", "frequentist_se", "log_or_posterior",
                           "se_posterior", "prior_center_log", "iterations"});
        buffer << csv_row({full(fit.frequentist_log_or), full(fit.frequentist_se),
                           full(fit.log_or_posterior), full(fit.se_posterior),
                           full(fit.prior_center_log), std::to_string(fit.iterations)});
      } else {
        buffer << "frequentist: log OR " << fixed(fit.frequentist_log_or, 4) << " (SE "
               << fixed(fit.frequentist_se, 4) << "), OR "
               << fixed(std::exp(fit.frequentist_log_or), disp.or_digits)
               << (fit.frequentist_boundary ? " [zero cell: estimate on the boundary]" : "") << "\n";
        if (fit.prior_used) {
          buffer << "prior centred at log ratio " << fixed(fit.prior_center_log, 4)
                 << " (midpoint of the log limits), " << fixed(fit.prior_pseudo_cases, 2)
                 << " pseudo-cases per arm, records rescaled by " << full(fit.prior_rescale)
                 << "\n";
          buffer << "posterior (prior-data augmented): log OR " << fixed(fit.log_or_posterior, 4)
                 << " (SD " << fixed(fit.se_posterior, 4) << "), OR "
                 << fixed(std::exp(fit.log_or_posterior), disp.or_digits) << ", " << fit.iterations
                 << " iterations\n";
        } else {
          buffer << "no prior given; posterior equals the frequentist fit\n";
        }
      }
    } else if (coverage->parsed() || sparse->parsed() || filter->parsed()) {
      require_seed(seed);
      const auto scenarios = read_scenarios(scenario_in);
      std::vector<SimReport> reports;
      for (const auto& sc : scenarios) {
        if (coverage->parsed()) {
          if (method == "both") {
            reports.push_back(coverage_sim(sc, CoverageMethod::Exact, alpha, n_sims, *seed));
            reports.push_back(coverage_sim(sc, CoverageMethod::Wald, alpha, n_sims, *seed));
          } else if (method == "exact" || method == "wald") {
            reports.push_back(coverage_sim(sc, coverage_method_from_string(method), alpha, n_sims, *seed));
          } else {
            throw UsageError("--method must be exact, wald or both");
          }
        } else if (sparse->parsed()) {
          reports.push_back(sparse_bias_sim(sc, n_sims, *seed));
        } else {
          reports.push_back(
              significance_filter_sim(sc, alpha, n_sims, *seed, test_method_from_string(test_name)));
        }
      }
      emit_reports(reports, fmt, disp, buffer);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n"
        << "hint: run 'compat <subcommand> --help'\n";
    return 2;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::UnsupportedFormat) {
      err << "error: " << e.what() << "\n"
          << "hint: run 'compat <subcommand> --help'\n";
      return 2;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (!common.out_path.empty()) {
    std::ofstream f(common.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << common.out_path << "'\n";
      return 1;
    }
    f << buffer.str();
  } else {
    out << buffer.str();
  }
  return 0;
}

}  // namespace compat::cli
