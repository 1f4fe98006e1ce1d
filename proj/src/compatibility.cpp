#include "compat/compatibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "compat/asymptotic.hpp"
#include "compat/error.hpp"
#include "compat/parallel.hpp"
#include "compat/serialize.hpp"

namespace compat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidP, "P-value must lie in [0, 1]");
}

std::string fmt15(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string fmt_short(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

double s_value(double p) {
  check_p(p);
  if (p == 0.0) return kInf;
  return -std::log2(p);
}

int coin_toss_equivalent(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidP, "P-value must lie in (0, 1]");
  // Nearest integer to s; exact half-integers go to the smaller count.
  return static_cast<int>(std::ceil(s_value(p) - 0.5));
}

CoinTossBracket coin_toss_bracket(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidP, "P-value must lie in (0, 1]");
  const double s = s_value(p);
  return {static_cast<int>(std::floor(s)), static_cast<int>(std::ceil(s))};
}

std::string_view to_string(CurveMethod m) {
  switch (m) {
    case CurveMethod::Exact: return "exact";
    case CurveMethod::Wald: return "wald";
    case CurveMethod::Pearson: return "pearson";
  }
  return "exact";
}

CurveMethod curve_method_from_string(std::string_view s) {
  if (s == "exact") return CurveMethod::Exact;
  if (s == "wald") return CurveMethod::Wald;
  if (s == "pearson") return CurveMethod::Pearson;
  throw Error(ErrorKind::ParseError, "unknown curve method '" + std::string(s) + "'");
}

Grid default_grid(const Table2x2& t) {
  const double l = log_sample_or(t);
  const double centre = std::isfinite(l) ? std::exp(l) : 1.0;
  return {centre / 64.0, centre * 64.0, 200};
}

std::vector<double> grid_values(const Grid& grid) {
  if (!(grid.psi_min > 0.0) || !(grid.psi_max > grid.psi_min) || !std::isfinite(grid.psi_max) ||
      grid.points_per_decade < 1) {
    throw Error(ErrorKind::InvalidGrid, "grid needs 0 < psi_min < psi_max and points_per_decade >= 1");
  }
  const double lo = std::log10(grid.psi_min);
  const double hi = std::log10(grid.psi_max);
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) * grid.points_per_decade - 1e-9));
  std::vector<double> out(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(steps);
    out[i] = std::pow(10.0, lo + frac * (hi - lo));
  }
  out.front() = grid.psi_min;
  out.back() = grid.psi_max;
  return out;
}

double method_p_value(const Table2x2& t, double psi, CurveMethod method, const ExactOptions& opts) {
  switch (method) {
    case CurveMethod::Exact: return exact_p(t, psi, opts).p;
    case CurveMethod::Wald: return wald_p({log_sample_or(t), log_or_se(t), std::log(psi)});
    case CurveMethod::Pearson: return pearson_chi2_at(t, psi).p;
  }
  return 1.0;
}

CompatibilityCurve compatibility_curve(const Table2x2& t, const Grid& grid, CurveMethod method,
                                       std::vector<double> alpha_marks, const ExactOptions& opts) {
  const auto psis = grid_values(grid);
  CompatibilityCurve curve;
  curve.method = method;
  curve.source = "table " + t.to_string();
  curve.alpha_marks = std::move(alpha_marks);
  curve.points.resize(psis.size());

  // Validate method preconditions once, before fanning out.
  if (method == CurveMethod::Wald) (void)log_or_se(t);
  if (method == CurveMethod::Pearson) (void)pearson_chi2(t);

  const ConditionalModel model(t);
  parallel_for(psis.size(), [&](std::size_t i) {
    const double psi = psis[i];
    const double p = method == CurveMethod::Exact ? model.p_value(psi, opts)
                                                  : method_p_value(t, psi, method, opts);
    curve.points[i] = {psi, p, s_value(std::clamp(p, 0.0, 1.0))};
  });

  double best = -1.0;
  for (const auto& pt : curve.points) best = std::max(best, pt.p);
  std::size_t first = curve.points.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (curve.points[i].p >= best * (1.0 - 1e-12)) {
      first = std::min(first, i);
      last = i;
    }
  }
  curve.p_max = best;
  curve.argmax_psi = std::sqrt(curve.points[first].psi * curve.points[last].psi);
  return curve;
}

CurveCrossings curve_crossings(const CompatibilityCurve& c, double alpha) {
  if (c.points.empty()) throw Error(ErrorKind::EmptyCurve, "curve has no points");
  const auto& pts = c.points;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].p > pts[peak].p) peak = i;
  }
  const auto interpolate = [&](std::size_t i, std::size_t j) {
    const double xi = std::log(pts[i].psi);
    const double xj = std::log(pts[j].psi);
    const double w = (alpha - pts[i].p) / (pts[j].p - pts[i].p);
    return std::exp(xi + w * (xj - xi));
  };
  CurveCrossings out;
  for (std::size_t i = peak; i > 0; --i) {
    if (pts[i - 1].p <= alpha && pts[i].p > alpha) {
      out.lower = interpolate(i - 1, i);
      break;
    }
  }
  for (std::size_t i = peak; i + 1 < pts.size(); ++i) {
    if (pts[i].p > alpha && pts[i + 1].p <= alpha) {
      out.upper = interpolate(i, i + 1);
      break;
    }
  }
  return out;
}

CurveFormat curve_format_from_string(std::string_view s) {
  if (s == "csv") return CurveFormat::Csv;
  if (s == "json") return CurveFormat::Json;
  if (s == "svg") return CurveFormat::Svg;
  throw Error(ErrorKind::UnsupportedFormat, "unknown curve format '" + std::string(s) + "'");
}

std::string render_curve(const CompatibilityCurve& c, CurveFormat format, const SvgOptions& svg) {
  if (c.points.empty()) throw Error(ErrorKind::EmptyCurve, "curve has no points");
  switch (format) {
    case CurveFormat::Csv: {
      std::string out = "psi,p,s\n";
      for (const auto& pt : c.points) {
        out += fmt15(pt.psi) + "," + fmt15(pt.p) + "," + fmt15(pt.s) + "\n";
      }
      return out;
    }
    case CurveFormat::Json: return json(c).dump(2) + "\n";
    case CurveFormat::Svg: return render_svg(std::span(&c, 1), svg);
  }
  throw Error(ErrorKind::UnsupportedFormat, "unsupported curve format");
}

std::string render_svg(std::span<const CompatibilityCurve> series, const SvgOptions& opts) {
  if (series.empty()) throw Error(ErrorKind::EmptyCurve, "no curves to draw");
  for (const auto& c : series) {
    if (c.points.empty()) throw Error(ErrorKind::EmptyCurve, "curve has no points");
  }
  double x_min = kInf;
  double x_max = -kInf;
  for (const auto& c : series) {
    x_min = std::min(x_min, std::log10(c.points.front().psi));
    x_max = std::max(x_max, std::log10(c.points.back().psi));
  }
  if (x_max <= x_min) x_max = x_min + 1.0;

  const double left = 70.0;
  const double right = 70.0;
  const double top = 40.0;
  const double bottom = 50.0;
  const double w = opts.width;
  const double h = opts.height;
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;
  const auto sx = [&](double psi) { return left + (std::log10(psi) - x_min) / (x_max - x_min) * plot_w; };
  const auto sy = [&](double p) { return top + (1.0 - p) * plot_h; };

  static constexpr const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opts.width
     << "\" height=\"" << opts.height << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height
     << "\">\n"
     << "<title>P-value function: " << series.front().source << "</title>\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << opts.width << "\" height=\"" << opts.height
     << "\" fill=\"white\"/>\n";

  // Frame and axes.
  os << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" "
        "font-size=\"11\">\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
     << "\" y2=\"" << top + plot_h << "\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
     << top + plot_h << "\"/>\n";
  os << "<line x1=\"" << left + plot_w << "\" y1=\"" << top << "\" x2=\"" << left + plot_w
     << "\" y2=\"" << top + plot_h << "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double p = 0.25 * i;
    os << "<line x1=\"" << left - 4 << "\" y1=\"" << sy(p) << "\" x2=\"" << left << "\" y2=\""
       << sy(p) << "\"/>\n"
       << "<text x=\"" << left - 8 << "\" y=\"" << sy(p) + 4
       << "\" text-anchor=\"end\" stroke=\"none\">" << fmt_short(p, 2) << "</text>\n";
  }
  // S-value axis: s = -log2(p) placed at its p position.
  for (double s : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
    const double p = std::exp2(-s);
    os << "<line x1=\"" << left + plot_w << "\" y1=\"" << sy(p) << "\" x2=\"" << left + plot_w + 4
       << "\" y2=\"" << sy(p) << "\"/>\n"
       << "<text x=\"" << left + plot_w + 8 << "\" y=\"" << sy(p) + 4 << "\" stroke=\"none\">"
       << fmt_short(s, 2) << "</text>\n";
  }
  for (int e = static_cast<int>(std::floor(x_min)); e <= static_cast<int>(std::ceil(x_max)); ++e) {
    for (double m : {1.0, 2.0, 5.0}) {
      const double psi = m * std::pow(10.0, e);
      const double lx = std::log10(psi);
      if (lx < x_min - 1e-12 || lx > x_max + 1e-12) continue;
      os << "<line x1=\"" << sx(psi) << "\" y1=\"" << top + plot_h << "\" x2=\"" << sx(psi)
         << "\" y2=\"" << top + plot_h + 4 << "\"/>\n"
         << "<text x=\"" << sx(psi) << "\" y=\"" << top + plot_h + 16
         << "\" text-anchor=\"middle\" stroke=\"none\">" << fmt_short(psi, 3) << "</text>\n";
    }
  }
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << h - 10
     << "\" text-anchor=\"middle\" stroke=\"none\">odds ratio (log scale)</text>\n"
     << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" stroke=\"none\" "
     << "transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">P-value</text>\n"
     << "<text x=\"" << w - 14 << "\" y=\"" << top + plot_h / 2
     << "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(90 " << w - 14 << ' '
     << top + plot_h / 2 << ")\">S-value (bits)</text>\n";
  os << "</g>\n";

  // Alpha-level rules.
  std::vector<double> marks;
  for (const auto& c : series) {
    for (double a : c.alpha_marks) {
      if (std::find(marks.begin(), marks.end(), a) == marks.end()) marks.push_back(a);
    }
  }
  for (double a : marks) {
    os << "<line class=\"alpha-rule\" data-alpha=\"" << fmt15(a) << "\" x1=\"" << left
       << "\" y1=\"" << sy(a) << "\" x2=\"" << left + plot_w << "\" y2=\"" << sy(a)
       << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n"
       << "<text x=\"" << left + 4 << "\" y=\"" << sy(a) - 3
       << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"gray\">alpha = " << fmt15(a)
       << "</text>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& c = series[k];
    const char* colour = kColours[k % std::size(kColours)];
    os << "<path class=\"series\" data-method=\"" << to_string(c.method) << "\" fill=\"none\" stroke=\""
       << colour << "\" stroke-width=\"1.5\" d=\"";
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      os << (i == 0 ? 'M' : 'L') << fmt_short(sx(c.points[i].psi), 6) << ','
         << fmt_short(sy(c.points[i].p), 6);
    }
    os << "\"/>\n";
    os << "<text x=\"" << left + plot_w - 6 << "\" y=\"" << top + 14 + 14 * static_cast<double>(k)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colour
       << "\">" << to_string(c.method) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

CompatibilityCurve curve_from_json(const std::string& text) {
  try {
    return json::parse(text).get<CompatibilityCurve>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid curve JSON: ") + e.what());
  }
}

CompatibilityCurve curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "psi,p,s") {
    throw Error(ErrorKind::ParseError, "curve CSV must start with header psi,p,s");
  }
  CompatibilityCurve c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) {
      if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
        field = field.substr(1, field.size() - 2);
      }
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0') {
        throw Error(ErrorKind::ParseError, "bad number '" + field + "' in curve CSV");
      }
      fields.push_back(v);
    }
    if (fields.size() != 3) throw Error(ErrorKind::ParseError, "curve CSV rows need 3 fields");
    c.points.push_back({fields[0], fields[1], fields[2]});
  }
  return c;
}

}  // namespace compat
