#pragma once

// Experiment driver: run law checks on single triangles, sweep shrinking
// triangle families, fit residual decay exponents, and emit CSV/JSON reports.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "geotrig/error.hpp"
#include "geotrig/laws.hpp"
#include "geotrig/surface.hpp"
#include "geotrig/triangle.hpp"

namespace geotrig::harness {

using json = nlohmann::json;

/// Invalid or inconsistent run configuration (exit code 1).
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

enum class Experiment { triangle, verify, sweep, slope };
enum class Family { directions, equilateral };
enum class Format { csv, json };

struct ScaleSchedule {
  double t0 = 0.2;
  double ratio = 0.5;
  int count = 8;

  std::vector<double> scales() const {
    std::vector<double> out;
    out.reserve(count);
    double t = t0;
    for (int i = 0; i < count; ++i, t *= ratio) out.push_back(t);
    return out;
  }
};

struct RunConfig {
  SurfaceSpec surface;
  json surface_echo;  // the surface block as given
  Experiment experiment = Experiment::triangle;
  std::optional<std::array<Point, 3>> vertices;
  Family family = Family::directions;
  Point apex{};
  ChartVector dir1{1.0, 0.0};
  ChartVector dir2{0.0, 1.0};
  double L1 = 1.0, L2 = 1.0;
  ScaleSchedule scales;
  std::vector<laws::Law> laws;
  std::string out;
  Format format = Format::csv;
  bool format_given = false;  // single-triangle reports default to JSON
  SolverOptions options;
  int threads = 0;  // 0: hardware concurrency
};

// ---------------------------------------------------------------------------
// Config parsing

inline std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::triangle: return "triangle";
    case Experiment::verify: return "verify";
    case Experiment::sweep: return "sweep";
    case Experiment::slope: return "slope";
  }
  return "?";
}

struct NamedSurface {
  std::string_view name;
  std::string_view description;
};

inline constexpr std::array<NamedSurface, 8> kNamedSurfaces{{
    {"plane", "Euclidean plane, identity chart"},
    {"sphere", "unit sphere (K = 1), longitude/latitude chart"},
    {"sphere_K:<K>", "sphere of curvature K > 0, longitude/latitude chart"},
    {"hyperbolic", "hyperbolic plane (K = -1), Poincare upper half-plane"},
    {"hyperbolic_K:<K>", "hyperbolic plane of curvature K < 0, upper half-plane"},
    {"torus", "torus R = 2, r = 1"},
    {"ellipsoid", "ellipsoid with semi-axes 1.2, 1, 0.8"},
    {"paraboloid", "Monge patch z = (u^2 + v^2)/2 on [-1, 1]^2"},
}};

inline double parse_double(std::string_view s, std::string_view what) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last) throw ConfigError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  return x;
}

inline std::vector<double> parse_list(std::string_view s, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? s.size() : comma;
    out.push_back(parse_double(s.substr(start, end - start), what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline SurfaceSpec named_surface(std::string_view name) {
  SurfaceSpec s;
  if (name == "plane") {
    s.kind = SurfaceKind::plane;
  } else if (name == "sphere") {
    s.kind = SurfaceKind::sphere_K;
    s.curvature = 1.0;
  } else if (name.starts_with("sphere_K:")) {
    s.kind = SurfaceKind::sphere_K;
    s.curvature = parse_double(name.substr(9), "sphere curvature");
  } else if (name == "hyperbolic") {
    s.kind = SurfaceKind::hyperbolic_K;
    s.curvature = -1.0;
  } else if (name.starts_with("hyperbolic_K:")) {
    s.kind = SurfaceKind::hyperbolic_K;
    s.curvature = parse_double(name.substr(13), "hyperbolic curvature");
  } else if (name == "torus") {
    s.kind = SurfaceKind::torus;
  } else if (name == "ellipsoid") {
    s.kind = SurfaceKind::ellipsoid;
    s.a = 1.2;
    s.b = 1.0;
    s.c = 0.8;
  } else if (name == "paraboloid") {
    s.kind = SurfaceKind::monge;
    s.height = "(u*u + v*v)/2";
  } else {
    throw ConfigError("unknown surface '" + std::string(name) + "'");
  }
  return s;
}

inline SurfaceSpec surface_from_json(const json& j) {
  if (j.is_string()) return named_surface(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("surface must be a name or an object");
  const auto kind = surface_kind_from_string(j.value("kind", std::string{}));
  if (!kind) throw ConfigError("surface.kind missing or unknown");
  SurfaceSpec s;
  s.kind = *kind;
  try {
    if (j.contains("K")) s.curvature = j.at("K").get<double>();
    s.a = j.value("a", s.a);
    s.b = j.value("b", s.b);
    s.c = j.value("c", s.c);
    s.major_radius = j.value("R", s.major_radius);
    s.minor_radius = j.value("r", s.minor_radius);
    s.height = j.value("f", std::string{});
    s.x = j.value("x", std::string{});
    s.y = j.value("y", std::string{});
    s.z = j.value("z", std::string{});
    s.pole_margin = j.value("pole_margin", s.pole_margin);
    s.validation_grid = j.value("validation_grid", s.validation_grid);
    if (j.contains("domain")) {
      const auto d = j.at("domain").get<std::vector<double>>();
      if (d.size() != 4) throw ConfigError("surface.domain must be [u_min, u_max, v_min, v_max]");
      s.domain = Domain{d[0], d[1], d[2], d[3]};
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("surface: ") + e.what());
  }
  return s;
}

inline Point point_from_json(const json& j, std::string_view what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError(std::string(what) + " must have two components");
  return {v[0], v[1]};
}

/// Parses a RunConfig from its JSON document form.
inline RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("surface")) throw ConfigError("config needs a surface");
    cfg.surface_echo = j.at("surface");
    cfg.surface = surface_from_json(cfg.surface_echo);

    const std::string exp = j.value("experiment", std::string("triangle"));
    if (exp == "triangle") cfg.experiment = Experiment::triangle;
    else if (exp == "verify") cfg.experiment = Experiment::verify;
    else if (exp == "sweep") cfg.experiment = Experiment::sweep;
    else if (exp == "slope") cfg.experiment = Experiment::slope;
    else throw ConfigError("unknown experiment '" + exp + "'");

    if (j.contains("vertices")) {
      const auto& v = j.at("vertices");
      std::vector<double> flat;
      if (!v.empty() && v.front().is_array())
        for (const auto& p : v) {
          const Point q = point_from_json(p, "vertex");
          flat.push_back(q.u);
          flat.push_back(q.v);
        }
      else
        flat = v.get<std::vector<double>>();
      if (flat.size() != 6) throw ConfigError("vertices must list three (u, v) points");
      cfg.vertices = std::array<Point, 3>{Point{flat[0], flat[1]}, Point{flat[2], flat[3]}, Point{flat[4], flat[5]}};
    }
    if (j.contains("apex")) cfg.apex = point_from_json(j.at("apex"), "apex");
    if (j.contains("dir1")) {
      const Point p = point_from_json(j.at("dir1"), "dir1");
      cfg.dir1 = {p.u, p.v};
    }
    if (j.contains("dir2")) {
      const Point p = point_from_json(j.at("dir2"), "dir2");
      cfg.dir2 = {p.u, p.v};
    }
    if (j.contains("lengths")) {
      const Point p = point_from_json(j.at("lengths"), "lengths");
      cfg.L1 = p.u;
      cfg.L2 = p.v;
    }
    const std::string family = j.value("family", std::string("directions"));
    if (family == "directions") cfg.family = Family::directions;
    else if (family == "equilateral") cfg.family = Family::equilateral;
    else throw ConfigError("unknown family '" + family + "'");

    if (j.contains("scales")) {
      const auto& s = j.at("scales");
      if (s.is_array()) {
        const auto v = s.get<std::vector<double>>();
        if (v.size() != 3) throw ConfigError("scales must be [t0, ratio, count]");
        cfg.scales = {v[0], v[1], static_cast<int>(v[2])};
      } else {
        cfg.scales.t0 = s.value("t0", cfg.scales.t0);
        cfg.scales.ratio = s.value("ratio", cfg.scales.ratio);
        cfg.scales.count = s.value("count", cfg.scales.count);
      }
    }
    if (j.contains("laws")) {
      for (const auto& name : j.at("laws")) {
        const auto law = laws::law_from_string(name.get<std::string>());
        if (!law) throw ConfigError("unknown law '" + name.get<std::string>() + "'");
        cfg.laws.push_back(*law);
      }
    } else {
      cfg.laws.assign(laws::kAllLaws.begin(), laws::kAllLaws.end());
    }
    cfg.out = j.value("out", std::string{});
    cfg.format_given = j.contains("format");
    const std::string fmt = j.value("format", std::string("csv"));
    if (fmt == "csv") cfg.format = Format::csv;
    else if (fmt == "json") cfg.format = Format::json;
    else throw ConfigError("unknown format '" + fmt + "'");
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      cfg.options.integrator.rtol = t.value("integrator", cfg.options.integrator.rtol);
      cfg.options.integrator.atol = t.value("integrator_abs", cfg.options.integrator.atol);
      cfg.options.bvp_tol = t.value("bvp", cfg.options.bvp_tol);
      cfg.options.guard_factor = t.value("guard_factor", cfg.options.guard_factor);
      cfg.options.intervals = t.value("intervals", cfg.options.intervals);
      cfg.options.max_iterations = t.value("max_iterations", cfg.options.max_iterations);
    }
    cfg.threads = j.value("threads", 0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

/// Checks cross-field invariants that need the built surface.
inline void validate(const RunConfig& cfg, const SurfaceModel& m) {
  const bool family_run = cfg.experiment == Experiment::sweep || cfg.experiment == Experiment::slope;
  if (!family_run && !cfg.vertices) throw ConfigError("triangle experiments need vertices");
  if (cfg.laws.empty()) throw ConfigError("no laws selected");
  if (!(cfg.options.integrator.rtol > 0.0) || !(cfg.options.integrator.atol > 0.0) || !(cfg.options.bvp_tol > 0.0))
    throw ConfigError("tolerances must be positive");
  if (!family_run) return;
  const auto& s = cfg.scales;
  if (!(s.t0 > 0.0)) throw ConfigError("scales.t0 must be positive");
  if (!(s.ratio > 0.0 && s.ratio < 1.0)) throw ConfigError("scales.ratio must be in (0, 1)");
  if (s.count < 1) throw ConfigError("scales.count must be positive");
  if (cfg.experiment == Experiment::slope && s.count < 4) throw ConfigError("slope fits need scales.count >= 4");
  const double reach = cfg.family == Family::equilateral ? s.t0 : s.t0 * std::max(cfg.L1, cfg.L2);
  if (reach > m.diameter_guard(cfg.options.guard_factor))
    throw ConfigError("scale schedule exceeds the diameter guard " + std::to_string(m.diameter_guard(cfg.options.guard_factor)));
}

// ---------------------------------------------------------------------------
// Single triangle

struct LawOutcome {
  laws::Law law;
  std::vector<laws::LawResidual> residuals;
  std::string error;  // non-empty when the law could not be evaluated
};

struct TriangleReport {
  GeodesicTriangle triangle;
  std::vector<LawOutcome> outcomes;
  std::optional<double> f_hat;
  double curvature = 0.0;  // K used by single-curvature laws

  bool all_evaluated() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.error.empty(); });
  }
};

inline std::vector<LawOutcome> evaluate_laws(const std::vector<laws::Law>& selection, const GeodesicTriangle& t) {
  std::vector<LawOutcome> out;
  for (laws::Law law : selection) {
    LawOutcome o{law, {}, {}};
    try {
      o.residuals = laws::evaluate(law, t);
    } catch (const Error& e) {
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

inline TriangleReport run_triangle(const RunConfig& cfg, const SurfaceModel& m) {
  if (!cfg.vertices) throw ConfigError("run_triangle needs vertices");
  const auto& v = *cfg.vertices;
  TriangleReport r{build_triangle(m, v[0], v[1], v[2], cfg.options), {}, std::nullopt, 0.0};
  r.curvature = laws::triangle_curvature(r.triangle);
  r.outcomes = evaluate_laws(cfg.laws, r.triangle);
  if (std::abs(r.triangle.excess) >= 1e-12) r.f_hat = laws::f_estimate(r.triangle);
  return r;
}

// ---------------------------------------------------------------------------
// Sweeps

inline constexpr std::array<std::string_view, 10> kBaseColumns{
    "t", "AB", "BC", "AC", "alpha", "beta", "gamma", "excess", "area", "curv_integral"};

struct SweepRow {
  double t = 0.0;
  std::optional<GeodesicTriangle> triangle;
  std::vector<std::optional<double>> residuals;  // one per residual column
  std::vector<double> budgets;                   // matching error budgets (NaN when absent)
  std::optional<double> f_hat;
  double excess_budget = 0.0;
  std::vector<std::string> errors;

  bool failed() const { return !errors.empty(); }
};

struct Fit {
  std::string column;
  double exponent = 0.0;
  double log_coefficient = 0.0;  // intercept of log|value| against log t
  double r_squared = 0.0;
  int rows_used = 0;
  int sign = 0;
  std::string error;  // non-empty when the fit was refused
};

struct SweepSummary {
  std::optional<double> f_hat_smallest, f_hat_previous;
  std::optional<double> f_hat_relative_change;
  int curvature_sign = 0;
  std::string sign_relation;  // "opposite", "same" or "undetermined"
};

struct SweepResult {
  json config;
  std::vector<std::string> residual_columns;
  std::vector<SweepRow> rows;
  std::vector<Fit> fits;
  SweepSummary summary;

  std::size_t failed_rows() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.failed(); }));
  }
};

inline std::vector<std::string> residual_columns(const std::vector<laws::Law>& selection) {
  std::vector<std::string> cols;
  for (laws::Law law : selection)
    for (auto& label : laws::residual_labels(law)) cols.push_back(label);
  return cols;
}

inline SweepRow compute_row(const RunConfig& cfg, const SurfaceModel& m, const std::vector<std::string>& columns,
                            double t) {
  SweepRow row;
  row.t = t;
  row.residuals.assign(columns.size(), std::nullopt);
  row.budgets.assign(columns.size(), std::numeric_limits<double>::quiet_NaN());
  try {
    row.triangle = cfg.family == Family::equilateral
                       ? equilateral_member(m, cfg.apex, cfg.dir1, t, cfg.options)
                       : family_member(m, cfg.apex, cfg.dir1, cfg.dir2, cfg.L1, cfg.L2, t, cfg.options);
  } catch (const Error& e) {
    row.errors.push_back(std::string("triangle: ") + e.what());
    return row;
  }
  const GeodesicTriangle& tri = *row.triangle;
  row.excess_budget = laws::excess_budget(tri);
  for (const auto& outcome : evaluate_laws(cfg.laws, tri)) {
    if (!outcome.error.empty()) {
      row.errors.push_back(std::string(laws::to_string(outcome.law)) + ": " + outcome.error);
      continue;
    }
    for (const auto& r : outcome.residuals) {
      const auto it = std::find(columns.begin(), columns.end(), r.label);
      const auto idx = static_cast<std::size_t>(it - columns.begin());
      row.residuals[idx] = r.residual;
      row.budgets[idx] = r.error_budget;
    }
  }
  if (std::abs(tri.excess) >= 1e-12) row.f_hat = laws::f_estimate(tri);
  return row;
}

/// Least-squares power law |value| ≈ exp(c) t^p on log-log axes.
/// Refuses fewer than four points and values that change sign.
inline Fit fit_power_law(const std::vector<double>& t, const std::vector<double>& value, std::string column = {}) {
  Fit fit;
  fit.column = std::move(column);
  if (t.size() != value.size()) throw InputError("fit_power_law: size mismatch");
  if (t.size() < 4) throw NumericalError("fit refused: fewer than 4 rows above the noise floor");
  int sign = 0;
  for (double v : value) {
    const int s = v > 0 ? 1 : v < 0 ? -1 : 0;
    if (s == 0) throw NumericalError("fit refused: zero value");
    if (sign != 0 && s != sign) throw NumericalError("fit refused: sign change indicates cancellation");
    sign = s;
  }
  const std::size_t n = t.size();
  double sx = 0, sy = 0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(t[i]);
    y[i] = std::log(std::abs(value[i]));
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("fit refused: scales are not distinct");
  fit.exponent = sxy / sxx;
  fit.log_coefficient = my - fit.exponent * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.log_coefficient + fit.exponent * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.rows_used = static_cast<int>(n);
  fit.sign = sign;
  return fit;
}

/// Fits one column over the smaller half of the scales, skipping rows whose
/// |value| is within 100x of their error budget.
inline Fit fit_slope(const SweepResult& result, const std::string& column) {
  std::vector<const SweepRow*> ordered;
  for (const auto& r : result.rows) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](const SweepRow* a, const SweepRow* b) { return a->t > b->t; });
  const std::size_t half_start = ordered.size() / 2;

  std::optional<std::size_t> col;
  if (column != "excess") {
    const auto it = std::find(result.residual_columns.begin(), result.residual_columns.end(), column);
    if (it == result.residual_columns.end()) throw InputError("fit_slope: unknown column '" + column + "'");
    col = static_cast<std::size_t>(it - result.residual_columns.begin());
  }
  std::vector<double> ts, vs;
  for (std::size_t i = half_start; i < ordered.size(); ++i) {
    const SweepRow& r = *ordered[i];
    if (!r.triangle) continue;
    double value = 0.0, budget = 0.0;
    if (col) {
      if (!r.residuals[*col]) continue;
      value = *r.residuals[*col];
      budget = r.budgets[*col];
    } else {
      value = r.triangle->excess;
      budget = r.excess_budget;
    }
    if (!(std::abs(value) > 100.0 * budget)) continue;
    ts.push_back(r.t);
    vs.push_back(value);
  }
  return fit_power_law(ts, vs, column);
}

inline json config_echo(const RunConfig& cfg) {
  json j;
  j["surface"] = cfg.surface_echo.is_null() ? json(std::string(to_string(cfg.surface.kind))) : cfg.surface_echo;
  j["experiment"] = std::string(to_string(cfg.experiment));
  j["family"] = cfg.family == Family::equilateral ? "equilateral" : "directions";
  j["apex"] = {cfg.apex.u, cfg.apex.v};
  j["dir1"] = {cfg.dir1.du, cfg.dir1.dv};
  j["dir2"] = {cfg.dir2.du, cfg.dir2.dv};
  j["lengths"] = {cfg.L1, cfg.L2};
  j["scales"] = {{"t0", cfg.scales.t0}, {"ratio", cfg.scales.ratio}, {"count", cfg.scales.count}};
  json names = json::array();
  for (auto law : cfg.laws) names.push_back(std::string(laws::to_string(law)));
  j["laws"] = names;
  j["tolerances"] = {{"integrator", cfg.options.integrator.rtol},
                     {"integrator_abs", cfg.options.integrator.atol},
                     {"bvp", cfg.options.bvp_tol},
                     {"guard_factor", cfg.options.guard_factor},
                     {"intervals", cfg.options.intervals}};
  return j;
}

/// Builds the scale family, evaluates every selected law per row and fits each residual column.
/// Rows run concurrently; results and `on_row` callbacks follow the schedule order.
inline SweepResult run_sweep(const RunConfig& cfg, const SurfaceModel& m,
                             const std::function<void(const SweepRow&)>& on_row = {}) {
  SweepResult result;
  result.config = config_echo(cfg);
  result.residual_columns = residual_columns(cfg.laws);
  const std::vector<double> scales = cfg.scales.scales();
  result.rows.resize(scales.size());

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      std::min<unsigned>(cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw, std::max<std::size_t>(scales.size(), 1));
  std::vector<std::atomic<bool>> done(scales.size());
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < scales.size(); i += workers) {
          result.rows[i] = compute_row(cfg, m, result.residual_columns, scales[i]);
          done[i].store(true, std::memory_order_release);
          done[i].notify_all();
        }
      });
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
      done[i].wait(false, std::memory_order_acquire);
      if (on_row) on_row(result.rows[i]);
    }
  }

  std::vector<std::string> fit_columns{"excess"};
  fit_columns.insert(fit_columns.end(), result.residual_columns.begin(), result.residual_columns.end());
  for (const auto& c : fit_columns) {
    try {
      result.fits.push_back(fit_slope(result, c));
    } catch (const Error& e) {
      Fit f;
      f.column = c;
      f.error = e.what();
      result.fits.push_back(f);
    }
  }

  SweepSummary& s = result.summary;
  std::vector<const SweepRow*> with_f;
  for (const auto& r : result.rows)
    if (r.f_hat) with_f.push_back(&r);
  std::sort(with_f.begin(), with_f.end(), [](const SweepRow* a, const SweepRow* b) { return a->t > b->t; });
  if (!with_f.empty()) {
    s.f_hat_smallest = *with_f.back()->f_hat;
    const double K = laws::triangle_curvature(*with_f.back()->triangle);
    s.curvature_sign = K > 0 ? 1 : K < 0 ? -1 : 0;
    const int f_sign = *s.f_hat_smallest > 0 ? 1 : *s.f_hat_smallest < 0 ? -1 : 0;
    s.sign_relation = s.curvature_sign == 0 || f_sign == 0 ? "undetermined"
                      : f_sign == s.curvature_sign         ? "same"
                                                           : "opposite";
  }
  if (with_f.size() >= 2) {
    s.f_hat_previous = *with_f[with_f.size() - 2]->f_hat;
    s.f_hat_relative_change = std::abs(*s.f_hat_smallest - *s.f_hat_previous) / std::abs(*s.f_hat_smallest);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Emission

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline std::vector<std::string> csv_columns(const std::vector<std::string>& residual_columns) {
  std::vector<std::string> cols(kBaseColumns.begin(), kBaseColumns.end());
  cols.insert(cols.end(), residual_columns.begin(), residual_columns.end());
  cols.push_back("f_hat");
  return cols;
}

inline std::string csv_header(const std::vector<std::string>& residual_columns) {
  std::string line;
  for (const auto& c : csv_columns(residual_columns)) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

inline std::string csv_line(const SweepRow& row) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> cells{row.t};
  if (row.triangle) {
    const auto& t = *row.triangle;
    cells.insert(cells.end(), {t.AB, t.BC, t.AC, t.alpha, t.beta, t.gamma, t.excess, t.area, t.curvature_integral});
  } else {
    cells.insert(cells.end(), 9, nan);
  }
  for (const auto& r : row.residuals) cells.push_back(r.value_or(nan));
  cells.push_back(row.f_hat.value_or(nan));
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += format_double(cells[i]);
  }
  return line + '\n';
}

inline std::string to_csv(const SweepResult& result) {
  std::string out = csv_header(result.residual_columns);
  for (const auto& row : result.rows) out += csv_line(row);
  return out;
}

inline json optional_json(const std::optional<double>& x) {
  return x && std::isfinite(*x) ? json(*x) : json(nullptr);
}

inline json finite_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const SweepResult& result) {
  json j;
  j["config"] = result.config;
  j["columns"] = csv_columns(result.residual_columns);
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r;
    r["t"] = row.t;
    if (row.triangle) {
      const auto& t = *row.triangle;
      r["AB"] = t.AB;
      r["BC"] = t.BC;
      r["AC"] = t.AC;
      r["alpha"] = t.alpha;
      r["beta"] = t.beta;
      r["gamma"] = t.gamma;
      r["excess"] = t.excess;
      r["area"] = t.area;
      r["curv_integral"] = t.curvature_integral;
    }
    for (std::size_t i = 0; i < result.residual_columns.size(); ++i) {
      r[result.residual_columns[i]] = optional_json(row.residuals[i]);
      r["budget_" + result.residual_columns[i]] = finite_json(row.budgets[i]);
    }
    r["f_hat"] = optional_json(row.f_hat);
    if (row.failed()) r["errors"] = row.errors;
    rows.push_back(r);
  }
  j["rows"] = rows;
  json fits = json::object();
  for (const auto& f : result.fits) {
    if (!f.error.empty()) {
      fits[f.column] = {{"error", f.error}};
    } else {
      fits[f.column] = {{"exponent", f.exponent},
                        {"log_coefficient", f.log_coefficient},
                        {"r_squared", f.r_squared},
                        {"rows_used", f.rows_used},
                        {"sign", f.sign}};
    }
  }
  j["fits"] = fits;
  const auto& s = result.summary;
  j["summary"] = {{"f_hat_smallest", optional_json(s.f_hat_smallest)},
                  {"f_hat_previous", optional_json(s.f_hat_previous)},
                  {"f_hat_relative_change", optional_json(s.f_hat_relative_change)},
                  {"curvature_sign", s.curvature_sign},
                  {"f_hat_sign_vs_K", s.sign_relation}};
  return j;
}

inline json to_json(const TriangleReport& report) {
  const auto& t = report.triangle;
  json j;
  j["vertices"] = {{t.A.u, t.A.v}, {t.B.u, t.B.v}, {t.C.u, t.C.v}};
  j["AB"] = t.AB;
  j["BC"] = t.BC;
  j["AC"] = t.AC;
  j["alpha"] = t.alpha;
  j["beta"] = t.beta;
  j["gamma"] = t.gamma;
  j["excess"] = t.excess;
  j["area"] = t.area;
  j["curv_integral"] = t.curvature_integral;
  j["curvature"] = report.curvature;
  j["f_hat"] = report.f_hat ? json(*report.f_hat) : json(nullptr);
  json shooting = json::array();
  for (const auto& r : t.reports)
    shooting.push_back({{"iterations", r.iterations}, {"miss", r.miss}, {"length", r.length}});
  j["shooting"] = shooting;
  json lawj = json::array();
  for (const auto& o : report.outcomes) {
    if (!o.error.empty()) {
      lawj.push_back({{"law", std::string(laws::to_string(o.law))}, {"error", o.error}});
      continue;
    }
    for (const auto& r : o.residuals) {
      json inputs = json::object();
      for (const auto& [k, v] : r.inputs) inputs[k] = finite_json(v);
      lawj.push_back({{"law", r.label},
                      {"predicted", finite_json(r.predicted)},
                      {"measured", finite_json(r.measured)},
                      {"residual", finite_json(r.residual)},
                      {"error_budget", finite_json(r.error_budget)},
                      {"within_numerics", r.within_numerics()},
                      {"inputs", inputs}});
    }
  }
  j["laws"] = lawj;
  return j;
}

/// One-row CSV of a single triangle (t reported as nan).
inline std::string to_csv(const TriangleReport& report, const std::vector<laws::Law>& selection) {
  SweepRow row;
  row.t = std::numeric_limits<double>::quiet_NaN();
  row.triangle = report.triangle;
  const auto cols = residual_columns(selection);
  row.residuals.assign(cols.size(), std::nullopt);
  for (const auto& o : report.outcomes)
    for (const auto& r : o.residuals) {
      const auto it = std::find(cols.begin(), cols.end(), r.label);
      row.residuals[static_cast<std::size_t>(it - cols.begin())] = r.residual;
    }
  row.f_hat = report.f_hat;
  return csv_header(cols) + csv_line(row);
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error("write to '" + path + "' failed");
}

/// Writes a sweep result as CSV or as one JSON document.
inline void emit(const SweepResult& result, Format format, const std::string& path) {
  write_file(path, format == Format::csv ? to_csv(result) : to_json(result).dump(2) + "\n");
}

}  // namespace geotrig::harness
