#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "geotrig/error.hpp"
#include "geotrig/expr.hpp"
#include "geotrig/jet.hpp"

namespace geotrig {

/// A point in chart coordinates.
struct Point {
  double u = 0.0;
  double v = 0.0;
};

/// A tangent vector in chart components (du, dv).
struct ChartVector {
  double du = 0.0;
  double dv = 0.0;
};

inline Point operator+(Point p, ChartVector w) { return {p.u + w.du, p.v + w.dv}; }
inline ChartVector operator-(Point a, Point b) { return {a.u - b.u, a.v - b.v}; }
inline ChartVector operator*(double s, ChartVector w) { return {s * w.du, s * w.dv}; }
inline double chart_norm(ChartVector w) { return std::hypot(w.du, w.dv); }
inline double chart_distance(Point a, Point b) { return chart_norm(a - b); }

struct Domain {
  double u_min = -1.0;
  double u_max = 1.0;
  double v_min = -1.0;
  double v_max = 1.0;

  bool contains(Point p) const { return p.u > u_min && p.u < u_max && p.v > v_min && p.v < v_max; }
};

enum class SurfaceKind { plane, sphere_K, hyperbolic_K, ellipsoid, torus, monge, parametric3 };

inline std::string_view to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::plane: return "plane";
    case SurfaceKind::sphere_K: return "sphere_K";
    case SurfaceKind::hyperbolic_K: return "hyperbolic_K";
    case SurfaceKind::ellipsoid: return "ellipsoid";
    case SurfaceKind::torus: return "torus";
    case SurfaceKind::monge: return "monge";
    case SurfaceKind::parametric3: return "parametric3";
  }
  return "?";
}

inline std::optional<SurfaceKind> surface_kind_from_string(std::string_view s) {
  for (auto k : {SurfaceKind::plane, SurfaceKind::sphere_K, SurfaceKind::hyperbolic_K, SurfaceKind::ellipsoid,
                 SurfaceKind::torus, SurfaceKind::monge, SurfaceKind::parametric3})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Declarative description of a surface, as read from a config file.
struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::plane;
  double curvature = 1.0;  // sphere_K (> 0), hyperbolic_K (< 0)
  double a = 1.0, b = 1.0, c = 1.0;  // ellipsoid semi-axes
  double major_radius = 2.0, minor_radius = 1.0;  // torus
  std::string height;  // monge: z = f(u, v)
  std::string x, y, z;  // parametric3
  std::optional<Domain> domain;
  double pole_margin = 1e-3;
  int validation_grid = 33;
};

/// Christoffel symbols of the second kind; `v_uu` is the v-component of the
/// connection applied to (∂u, ∂u), and so on.
struct Christoffel {
  double u_uu = 0.0, u_uv = 0.0, u_vv = 0.0;
  double v_uu = 0.0, v_uv = 0.0, v_vv = 0.0;
};

/// First fundamental form and everything derived from it at one chart point.
struct MetricData {
  double E = 0.0, F = 0.0, G = 0.0;
  double E_u = 0.0, E_v = 0.0, F_u = 0.0, F_v = 0.0, G_u = 0.0, G_v = 0.0;
  // The only second-derivative combination the Brioschi formula needs:
  // -E_vv/2 + F_uv - G_uu/2.
  double curvature_term = 0.0;
  Christoffel christoffel;
  double K = 0.0;

  double det() const { return E * G - F * F; }
};

/// Christoffel symbols from the metric and its first partials.
inline Christoffel christoffel_from_metric(const MetricData& m) {
  const double d2 = 2.0 * m.det();
  Christoffel c;
  c.u_uu = (m.G * m.E_u - 2.0 * m.F * m.F_u + m.F * m.E_v) / d2;
  c.v_uu = (2.0 * m.E * m.F_u - m.E * m.E_v - m.F * m.E_u) / d2;
  c.u_uv = (m.G * m.E_v - m.F * m.G_u) / d2;
  c.v_uv = (m.E * m.G_u - m.F * m.E_v) / d2;
  c.u_vv = (2.0 * m.G * m.F_v - m.G * m.G_u - m.F * m.G_v) / d2;
  c.v_vv = (m.E * m.G_v - 2.0 * m.F * m.F_v + m.F * m.G_u) / d2;
  return c;
}

/// Gaussian curvature from E, F, G and their partials (Brioschi).
inline double brioschi_curvature(const MetricData& m) {
  auto det3 = [](double a11, double a12, double a13, double a21, double a22, double a23, double a31, double a32,
                 double a33) {
    return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) + a13 * (a21 * a32 - a22 * a31);
  };
  const double first = det3(m.curvature_term, 0.5 * m.E_u, m.F_u - 0.5 * m.E_v,  //
                            m.F_v - 0.5 * m.G_u, m.E, m.F,                        //
                            0.5 * m.G_v, m.F, m.G);
  const double second = det3(0.0, 0.5 * m.E_v, 0.5 * m.G_u,  //
                             0.5 * m.E_v, m.E, m.F,          //
                             0.5 * m.G_u, m.F, m.G);
  const double d = m.det();
  return (first - second) / (d * d);
}

using Vec3Jet = std::array<Jet2, 3>;

/// Metric data of an embedded patch X(u, v) from second-order jets of its coordinates.
/// Third derivatives of X cancel in the Brioschi combination, leaving X_uu·X_vv - |X_uv|^2.
inline MetricData metric_from_embedding(const Vec3Jet& X) {
  auto dot = [](auto f, auto g, const Vec3Jet& x) {
    double s = 0.0;
    for (const auto& c : x) s += f(c) * g(c);
    return s;
  };
  auto Xu = [](const Jet2& j) { return j.d_u; };
  auto Xv = [](const Jet2& j) { return j.d_v; };
  auto Xuu = [](const Jet2& j) { return j.d_uu; };
  auto Xuv = [](const Jet2& j) { return j.d_uv; };
  auto Xvv = [](const Jet2& j) { return j.d_vv; };

  MetricData m;
  m.E = dot(Xu, Xu, X);
  m.F = dot(Xu, Xv, X);
  m.G = dot(Xv, Xv, X);
  m.E_u = 2.0 * dot(Xu, Xuu, X);
  m.E_v = 2.0 * dot(Xu, Xuv, X);
  m.F_u = dot(Xuu, Xv, X) + dot(Xu, Xuv, X);
  m.F_v = dot(Xuv, Xv, X) + dot(Xu, Xvv, X);
  m.G_u = 2.0 * dot(Xv, Xuv, X);
  m.G_v = 2.0 * dot(Xv, Xvv, X);
  m.curvature_term = dot(Xuu, Xvv, X) - dot(Xuv, Xuv, X);
  m.christoffel = christoffel_from_metric(m);
  m.K = brioschi_curvature(m);
  return m;
}

/// An immutable C² regular surface given by one chart. Copies share state.
class SurfaceModel {
 public:
  const SurfaceSpec& spec() const { return state_->spec; }
  SurfaceKind kind() const { return state_->spec.kind; }
  const Domain& domain() const { return state_->domain; }
  bool is_constant_curvature() const {
    const auto k = kind();
    return k == SurfaceKind::plane || k == SurfaceKind::sphere_K || k == SurfaceKind::hyperbolic_K;
  }
  /// Configured K for constant-curvature kinds (0 for the plane).
  double constant_curvature() const {
    switch (kind()) {
      case SurfaceKind::plane: return 0.0;
      case SurfaceKind::sphere_K:
      case SurfaceKind::hyperbolic_K: return state_->spec.curvature;
      default: throw InputError("surface has no constant curvature");
    }
  }
  /// Largest |K| observed on the validation grid (exact for constant-curvature kinds).
  double max_abs_curvature() const { return state_->max_abs_k; }

  /// Largest admissible triangle diameter: factor / sqrt(max|K|), infinite when flat.
  double diameter_guard(double factor) const {
    const double k = max_abs_curvature();
    return k > 0.0 ? factor / std::sqrt(k) : std::numeric_limits<double>::infinity();
  }

  /// Embedding coordinates, when the surface has one (all kinds except hyperbolic_K).
  const std::optional<std::array<expr::Expr, 3>>& embedding() const { return state_->embedding; }

  MetricData metric_at(Point p) const {
    if (!domain().contains(p))
      throw OutOfDomain("point (" + std::to_string(p.u) + ", " + std::to_string(p.v) +
                        ") outside chart domain");
    MetricData m = closed_form_or_embedded(p);
    if (!(m.E > 0.0) || !(m.G > 0.0) || !(m.det() > 0.0))
      throw NumericalError("degenerate metric at (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ")");
    return m;
  }

  /// Closed form for the built-in kinds with one; Brioschi otherwise.
  double gaussian_curvature_at(Point p) const { return metric_at(p).K; }

  /// Metric data computed only from the embedding (no closed forms). Throws when there is no embedding.
  MetricData embedded_metric_at(Point p) const {
    if (!embedding()) throw InputError("surface has no embedding");
    const auto& X = *embedding();
    return metric_from_embedding({X[0].jet(p.u, p.v), X[1].jet(p.u, p.v), X[2].jet(p.u, p.v)});
  }

  friend SurfaceModel make_surface(const SurfaceSpec& spec);

 private:
  struct State {
    SurfaceSpec spec;
    Domain domain;
    std::optional<std::array<expr::Expr, 3>> embedding;
    double max_abs_k = 0.0;
  };
  std::shared_ptr<const State> state_;

  MetricData closed_form_or_embedded(Point p) const {
    const auto& s = state_->spec;
    MetricData m;
    switch (s.kind) {
      case SurfaceKind::plane:
        m.E = 1.0;
        m.G = 1.0;
        return m;
      case SurfaceKind::sphere_K: {
        const double r2 = 1.0 / s.curvature;
        const double cv = std::cos(p.v), sv = std::sin(p.v);
        m.E = r2 * cv * cv;
        m.G = r2;
        m.E_v = -2.0 * r2 * cv * sv;
        m.curvature_term = r2 * (cv * cv - sv * sv);
        m.christoffel.u_uv = -sv / cv;
        m.christoffel.v_uu = sv * cv;
        m.K = s.curvature;
        return m;
      }
      case SurfaceKind::hyperbolic_K: {
        const double a = -s.curvature;
        const double v = p.v;
        m.E = 1.0 / (a * v * v);
        m.G = m.E;
        m.E_v = -2.0 / (a * v * v * v);
        m.G_v = m.E_v;
        m.curvature_term = -3.0 / (a * v * v * v * v);
        m.christoffel.u_uv = -1.0 / v;
        m.christoffel.v_uu = 1.0 / v;
        m.christoffel.v_vv = -1.0 / v;
        m.K = s.curvature;
        return m;
      }
      case SurfaceKind::torus: {
        const double R = s.major_radius, r = s.minor_radius;
        const double cv = std::cos(p.v), sv = std::sin(p.v);
        const double rho = R + r * cv;
        m.E = rho * rho;
        m.G = r * r;
        m.E_v = -2.0 * r * sv * rho;
        m.curvature_term = r * cv * rho - r * r * sv * sv;
        m.christoffel.u_uv = -r * sv / rho;
        m.christoffel.v_uu = rho * sv / r;
        m.K = cv / (r * rho);
        return m;
      }
      case SurfaceKind::ellipsoid: {
        m = embedded_metric_at(p);
        const double x = s.a * std::cos(p.v) * std::cos(p.u);
        const double y = s.b * std::cos(p.v) * std::sin(p.u);
        const double z = s.c * std::sin(p.v);
        const double a2 = s.a * s.a, b2 = s.b * s.b, c2 = s.c * s.c;
        const double q = x * x / (a2 * a2) + y * y / (b2 * b2) + z * z / (c2 * c2);
        m.K = 1.0 / (a2 * b2 * c2 * q * q);
        return m;
      }
      case SurfaceKind::monge:
      case SurfaceKind::parametric3: return embedded_metric_at(p);
    }
    return m;
  }
};

namespace detail {

inline std::string num(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, ptr);
  return x < 0 ? "(" + s + ")" : s;
}

inline std::array<expr::Expr, 3> parse3(const std::string& x, const std::string& y, const std::string& z) {
  return {expr::parse(x), expr::parse(y), expr::parse(z)};
}

}  // namespace detail

/// Builds and validates a surface. Throws InputError on bad parameters or
/// expressions, NumericalError when the metric degenerates on the validation grid.
inline SurfaceModel make_surface(const SurfaceSpec& spec) {
  using std::numbers::pi;
  auto state = std::make_shared<SurfaceModel::State>();
  state->spec = spec;
  const double half_pi = pi / 2 - spec.pole_margin;

  Domain dom;
  switch (spec.kind) {
    case SurfaceKind::plane:
      dom = {-1e6, 1e6, -1e6, 1e6};
      state->embedding = detail::parse3("u", "v", "0");
      break;
    case SurfaceKind::sphere_K: {
      if (!(spec.curvature > 0.0)) throw InputError("sphere_K requires K > 0");
      if (!(spec.pole_margin > 0.0 && spec.pole_margin < pi / 2)) throw InputError("pole_margin must be in (0, pi/2)");
      dom = {-2 * pi, 2 * pi, -half_pi, half_pi};
      const std::string R = detail::num(1.0 / std::sqrt(spec.curvature));
      state->embedding = detail::parse3(R + "*cos(v)*cos(u)", R + "*cos(v)*sin(u)", R + "*sin(v)");
      break;
    }
    case SurfaceKind::hyperbolic_K:
      if (!(spec.curvature < 0.0)) throw InputError("hyperbolic_K requires K < 0");
      dom = {-1e3, 1e3, 1e-6, 1e3};
      break;
    case SurfaceKind::ellipsoid: {
      if (!(spec.a > 0 && spec.b > 0 && spec.c > 0)) throw InputError("ellipsoid semi-axes must be positive");
      if (!(spec.pole_margin > 0.0 && spec.pole_margin < pi / 2)) throw InputError("pole_margin must be in (0, pi/2)");
      dom = {-2 * pi, 2 * pi, -half_pi, half_pi};
      state->embedding = detail::parse3(detail::num(spec.a) + "*cos(v)*cos(u)", detail::num(spec.b) + "*cos(v)*sin(u)",
                                        detail::num(spec.c) + "*sin(v)");
      break;
    }
    case SurfaceKind::torus: {
      const double R = spec.major_radius, r = spec.minor_radius;
      if (!(r > 0.0 && R > r)) throw InputError("torus requires R > r > 0");
      dom = {-2 * pi, 2 * pi, -2 * pi, 2 * pi};
      const std::string rho = "(" + detail::num(R) + "+" + detail::num(r) + "*cos(v))";
      state->embedding = detail::parse3(rho + "*cos(u)", rho + "*sin(u)", detail::num(r) + "*sin(v)");
      break;
    }
    case SurfaceKind::monge:
      if (spec.height.empty()) throw InputError("monge surface requires a height expression");
      state->embedding = {expr::parse("u"), expr::parse("v"), expr::parse(spec.height)};
      break;
    case SurfaceKind::parametric3:
      if (spec.x.empty() || spec.y.empty() || spec.z.empty())
        throw InputError("parametric3 surface requires x, y and z expressions");
      state->embedding = detail::parse3(spec.x, spec.y, spec.z);
      break;
  }
  if (spec.domain) dom = *spec.domain;
  if (!(dom.u_min < dom.u_max && dom.v_min < dom.v_max)) throw InputError("chart domain is degenerate");
  if (spec.kind == SurfaceKind::hyperbolic_K && !(dom.v_min >= 0.0))
    throw InputError("half-plane chart requires v_min >= 0");
  state->domain = dom;

  SurfaceModel model;
  model.state_ = state;

  // Constant-curvature kinds know max|K| exactly; the rest are sampled.
  const bool constant = model.is_constant_curvature();
  double max_k = constant ? std::abs(model.constant_curvature()) : 0.0;
  const int n = std::max(spec.validation_grid, 2);
  if (spec.kind != SurfaceKind::plane) {
    // Built-in domains span huge boxes; validate over a bounded window of them.
    const double u0 = std::max(dom.u_min, -10.0), u1 = std::min(dom.u_max, 10.0);
    const double v0 = spec.kind == SurfaceKind::hyperbolic_K ? std::max(dom.v_min, 1e-2) : std::max(dom.v_min, -10.0);
    const double v1 = std::min(dom.v_max, 10.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Point p{u0 + (i + 0.5) / n * (u1 - u0), v0 + (j + 0.5) / n * (v1 - v0)};
        const MetricData m = model.metric_at(p);
        if (!(m.det() > 1e-14 * m.E * m.G))
          throw NumericalError("metric nearly degenerate at (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ")");
        if (!constant) max_k = std::max(max_k, std::abs(m.K));
      }
    }
  }
  state->max_abs_k = max_k;
  return model;
}

/// Metric inner product of two chart vectors at p.
inline double inner(const MetricData& m, ChartVector a, ChartVector b) {
  return m.E * (a.du * b.du) + m.F * (a.du * b.dv + b.du * a.dv) + m.G * (a.dv * b.dv);
}

inline double metric_norm(const MetricData& m, ChartVector a) { return std::sqrt(inner(m, a, a)); }

/// Angle in [0, pi] between two nonzero tangent vectors at p.
/// Evaluated as atan2(|w1 ^ w2|, <w1, w2>), equivalent to the clamped arccos of
/// the normalised inner product but accurate near 0 and pi.
inline double tangent_angle(const SurfaceModel& m, Point p, ChartVector w1, ChartVector w2) {
  if ((w1.du == 0.0 && w1.dv == 0.0) || (w2.du == 0.0 && w2.dv == 0.0))
    throw InputError("tangent_angle: zero vector");
  const MetricData g = m.metric_at(p);
  const double dot = inner(g, w1, w2);
  const double cross = std::sqrt(g.det()) * std::abs(w1.du * w2.dv - w2.du * w1.dv);
  return std::atan2(cross, dot);
}

}  // namespace geotrig
