#pragma once

// P-value (compatibility) functions, S-values, and curve rendering.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compat/exact.hpp"
#include "compat/table.hpp"

namespace compat {

// -log2(p) in bits; +inf for p == 0. Throws InvalidP outside [0, 1].
double s_value(double p);

// Number of fair-coin heads-in-a-row whose probability is closest to p on the
// log scale: the nearest integer to s_value(p), half-integers rounded down.
// Throws InvalidP unless 0 < p <= 1.
int coin_toss_equivalent(double p);

// Toss counts floor(s) and ceil(s), so (1/2)^upper <= p <= (1/2)^lower.
struct CoinTossBracket {
  int lower = 0;
  int upper = 0;
};
CoinTossBracket coin_toss_bracket(double p);

enum class CurveMethod { Exact, Wald, Pearson };

std::string_view to_string(CurveMethod m);
CurveMethod curve_method_from_string(std::string_view s);

struct CompatibilityPoint {
  double psi = 1.0;
  double p = 1.0;
  double s = 0.0;

  friend bool operator==(const CompatibilityPoint&, const CompatibilityPoint&) = default;
};

struct CompatibilityCurve {
  std::vector<CompatibilityPoint> points;
  CurveMethod method = CurveMethod::Exact;
  std::string source;
  std::vector<double> alpha_marks;
  // Log-midpoint of the run of grid points attaining the largest p.
  double argmax_psi = 0.0;
  double p_max = 0.0;

  friend bool operator==(const CompatibilityCurve&, const CompatibilityCurve&) = default;
};

struct Grid {
  double psi_min = 0.1;
  double psi_max = 10.0;
  int points_per_decade = 200;
};

// [estimate / 64, estimate * 64] at 200 points per decade, centred on the
// sample odds ratio (or 1 when that is 0 or infinite).
Grid default_grid(const Table2x2& t);

// Log-uniform grid values including both ends. Throws InvalidGrid.
std::vector<double> grid_values(const Grid& grid);

// P-value of one hypothesis under a curve method. Wald needs four nonzero
// cells and Pearson four nonzero margins.
double method_p_value(const Table2x2& t, double psi, CurveMethod method,
                      const ExactOptions& opts = {});

CompatibilityCurve compatibility_curve(const Table2x2& t, const Grid& grid, CurveMethod method,
                                       std::vector<double> alpha_marks = {0.05},
                                       const ExactOptions& opts = {});

// Log-linear interpolated crossings of p = alpha on each side of the maximum.
// A side without a crossing inside the grid is empty.
struct CurveCrossings {
  std::optional<double> lower;
  std::optional<double> upper;
};
CurveCrossings curve_crossings(const CompatibilityCurve& c, double alpha);

enum class CurveFormat { Csv, Json, Svg };

CurveFormat curve_format_from_string(std::string_view s);

struct SvgOptions {
  int width = 720;
  int height = 440;
};

// csv: header psi,p,s then one row per point, 15 significant digits.
// json: {"method", "source", "alpha_marks", "argmax_psi", "p_max", "points"}.
// svg: one curve per series on a log-psi axis with an S-value axis on the right.
std::string render_curve(const CompatibilityCurve& c, CurveFormat format,
                         const SvgOptions& svg = {});
std::string render_svg(std::span<const CompatibilityCurve> series, const SvgOptions& svg = {});

CompatibilityCurve curve_from_json(const std::string& text);
// Points only; the other fields keep their defaults. Throws ParseError.
CompatibilityCurve curve_from_csv(const std::string& text);

}  // namespace compat
