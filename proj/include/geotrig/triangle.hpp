#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "geotrig/error.hpp"
#include "geotrig/geodesic.hpp"
#include "geotrig/surface.hpp"

namespace geotrig {

enum class Vertex { A, B, C };

struct RegionIntegrals {
  double area = 0.0;
  double curvature_integral = 0.0;
  double abs_curvature_integral = 0.0;  // ∬|K| dS, the scale for relative checks
  int refinement_level = 0;
};

/// Geodesic triangle ABC with measured sides, angles, excess and region integrals.
/// Sides run A→B, B→C and A→C.
struct GeodesicTriangle {
  SurfaceModel surface;
  Point A, B, C;
  GeodesicPath ab, bc, ac;
  std::array<ShootingReport, 3> reports;  // ab, bc, ac
  double AB = 0.0, BC = 0.0, AC = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double excess = 0.0;
  double area = 0.0;
  double curvature_integral = 0.0;
  double abs_curvature_integral = 0.0;
  SolverOptions options;
};

namespace detail {

inline double cross(ChartVector a, ChartVector b) { return a.du * b.dv - a.dv * b.du; }

/// One boundary piece: cubic Hermite arc between two consecutive path samples.
struct HermiteArc {
  Point p0, p1;
  ChartVector t0, t1;  // d/ds
  double h = 0.0;      // arc-length span

  Point at(double x) const {
    const double x2 = x * x, x3 = x2 * x;
    const double h00 = 2 * x3 - 3 * x2 + 1, h10 = x3 - 2 * x2 + x, h01 = -2 * x3 + 3 * x2, h11 = x3 - x2;
    return {h00 * p0.u + h10 * h * t0.du + h01 * p1.u + h11 * h * t1.du,
            h00 * p0.v + h10 * h * t0.dv + h01 * p1.v + h11 * h * t1.dv};
  }
  ChartVector derivative(double x) const {  // d/dx
    const double x2 = x * x;
    const double d00 = 6 * x2 - 6 * x, d10 = 3 * x2 - 4 * x + 1, d01 = -6 * x2 + 6 * x, d11 = 3 * x2 - 2 * x;
    return {d00 * p0.u + d10 * h * t0.du + d01 * p1.u + d11 * h * t1.du,
            d00 * p0.v + d10 * h * t0.dv + d01 * p1.v + d11 * h * t1.dv};
  }
};

// 7-point Gauss–Legendre nodes and weights on [0, 1].
inline constexpr std::array<double, 7> kGaussNodes{
    0.02544604382862074, 0.12923440720030277, 0.29707742431130141, 0.5,
    0.70292257568869859, 0.87076559279969723, 0.97455395617137926};
inline constexpr std::array<double, 7> kGaussWeights{
    0.06474248308443485, 0.13985269574463833, 0.19091502525255947, 0.20897959183673469,
    0.19091502525255947, 0.13985269574463833, 0.06474248308443485};

// Proper crossing of segments ab and cd. Endpoints closer than `tol` to the other
// segment's line count as touching, not crossing, so collinear runs and tiny gaps
// at side junctions are not flagged.
inline bool segments_cross(Point a, Point b, Point c, Point d, double tol = 0.0) {
  const double lab = chart_distance(a, b), lcd = chart_distance(c, d);
  if (lab == 0.0 || lcd == 0.0) return false;
  const double o1 = cross(b - a, c - a) / lab, o2 = cross(b - a, d - a) / lab;
  const double o3 = cross(d - c, a - c) / lcd, o4 = cross(d - c, b - c) / lcd;
  auto clear = [tol](double o) { return std::abs(o) > tol; };
  return clear(o1) && clear(o2) && clear(o3) && clear(o4) && ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

}  // namespace detail

/// Area and ∬K dS over the chart region bounded by a closed chain of geodesic paths.
///
/// Each boundary arc is a cubic Hermite interpolant of its samples; the region
/// is fanned from the polygon centroid into curved sub-triangles, each
/// integrated with a tensor 7-point Gauss rule. The rule is refined by
/// splitting every sub-triangle 2x2 until two levels agree to 1e-10.
inline RegionIntegrals integrate_region(const SurfaceModel& m, std::span<const GeodesicPath> loop) {
  std::vector<detail::HermiteArc> arcs;
  std::vector<Point> polygon;
  for (const auto& path : loop) {
    for (std::size_t k = 0; k + 1 < path.samples.size(); ++k) {
      const auto& a = path.samples[k];
      const auto& b = path.samples[k + 1];
      arcs.push_back({a.point(), b.point(), a.velocity(), b.velocity(), b.s - a.s});
      polygon.push_back(a.point());
    }
  }
  if (arcs.size() < 3) throw InputError("integrate_region: boundary too short");
  {
    const Point first = loop.front().start();
    const Point last = loop.back().finish();
    if (chart_distance(first, last) > 1e-9 * (1.0 + chart_norm({first.u, first.v})))
      throw InputError("integrate_region: boundary is not closed");
  }

  const std::size_t n = polygon.size();
  double signed_area = 0.0;
  Point centroid{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % n];
    signed_area += 0.5 * (p.u * q.v - q.u * p.v);
    centroid.u += p.u / n;
    centroid.v += p.v / n;
  }
  const double orientation = signed_area >= 0.0 ? 1.0 : -1.0;
  double extent = 0.0;
  for (const Point& p : polygon) extent = std::max(extent, chart_distance(p, centroid));
  const double touch = 1e-9 * extent;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (detail::segments_cross(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n], touch))
        throw NumericalError("integrate_region: boundary polygon self-intersects");
    }
  }

  auto integrate = [&](int level) {
    const int pieces = 1 << level;
    const double width = 1.0 / pieces;
    RegionIntegrals out;
    for (const auto& arc : arcs) {
      for (int ix = 0; ix < pieces; ++ix) {
        for (std::size_t gx = 0; gx < detail::kGaussNodes.size(); ++gx) {
          const double x = (ix + detail::kGaussNodes[gx]) * width;
          const Point h = arc.at(x);
          const ChartVector radial = h - centroid;
          const double jac_x = detail::cross(radial, arc.derivative(x));
          for (int it = 0; it < pieces; ++it) {
            for (std::size_t gt = 0; gt < detail::kGaussNodes.size(); ++gt) {
              const double tau = (it + detail::kGaussNodes[gt]) * width;
              const Point p = centroid + tau * radial;
              const MetricData g = m.metric_at(p);
              const double w = detail::kGaussWeights[gx] * detail::kGaussWeights[gt] * width * width * tau * jac_x;
              const double dens = std::sqrt(g.det());
              out.area += w * dens;
              out.curvature_integral += w * g.K * dens;
              out.abs_curvature_integral += w * std::abs(g.K) * dens;
            }
          }
        }
      }
    }
    out.area *= orientation;
    out.curvature_integral *= orientation;
    out.abs_curvature_integral = std::abs(out.abs_curvature_integral);
    out.refinement_level = level;
    return out;
  };

  RegionIntegrals prev = integrate(0);
  for (int level = 1; level <= 4; ++level) {
    const RegionIntegrals next = integrate(level);
    const bool area_ok = std::abs(next.area - prev.area) <= 1e-10 * std::abs(next.area);
    const bool curv_ok = std::abs(next.curvature_integral - prev.curvature_integral) <=
                         1e-10 * next.abs_curvature_integral + 1e-300;
    if (area_ok && curv_ok) return next;
    prev = next;
  }
  throw NumericalError("integrate_region: quadrature refinement did not converge");
}

namespace detail {

inline bool lex_less(Point a, Point b) { return a.u < b.u || (a.u == b.u && a.v < b.v); }

/// Connects in a canonical orientation so relabelled triangles reuse identical sides.
inline ConnectResult canonical_connect(const SurfaceModel& m, Point p, Point q, const SolverOptions& opts) {
  if (lex_less(p, q)) return connect(m, p, q, opts);
  ConnectResult r = connect(m, q, p, opts);
  r.path = reversed(r.path);
  r.report.direction = endpoint_tangent(r.path, PathEnd::start);
  return r;
}

}  // namespace detail

/// Solves the three sides, measures angles from side tangents, and integrates the enclosed region.
inline GeodesicTriangle build_triangle(const SurfaceModel& m, Point A, Point B, Point C,
                                       const SolverOptions& opts = {}) {
  auto same = [](Point p, Point q) { return p.u == q.u && p.v == q.v; };
  if (same(A, B) || same(B, C) || same(A, C)) throw InputError("build_triangle: vertices must be pairwise distinct");

  GeodesicTriangle t;
  t.surface = m;
  t.options = opts;
  t.A = A;
  t.B = B;
  t.C = C;
  auto ab = detail::canonical_connect(m, A, B, opts);
  auto bc = detail::canonical_connect(m, B, C, opts);
  auto ac = detail::canonical_connect(m, A, C, opts);
  t.ab = std::move(ab.path);
  t.bc = std::move(bc.path);
  t.ac = std::move(ac.path);
  t.reports = {ab.report, bc.report, ac.report};
  t.AB = t.ab.length;
  t.BC = t.bc.length;
  t.AC = t.ac.length;

  using enum PathEnd;
  using enum TangentSense;
  t.alpha = tangent_angle(m, A, endpoint_tangent(t.ab, start), endpoint_tangent(t.ac, start));
  t.beta = tangent_angle(m, B, endpoint_tangent(t.ab, finish, into_path), endpoint_tangent(t.bc, start));
  t.gamma = tangent_angle(m, C, endpoint_tangent(t.bc, finish, into_path), endpoint_tangent(t.ac, finish, into_path));
  if (std::min({t.alpha, t.beta, t.gamma}) < 1e-6)
    throw NumericalError("build_triangle: degenerate (collinear) configuration");
  t.excess = t.alpha + t.beta + t.gamma - std::numbers::pi;

  const std::array<GeodesicPath, 3> loop{t.ab, t.bc, reversed(t.ac)};
  const RegionIntegrals region = integrate_region(m, loop);
  t.area = region.area;
  t.curvature_integral = region.curvature_integral;
  t.abs_curvature_integral = region.abs_curvature_integral;
  return t;
}

/// Angle excess against the Gauss–Bonnet integral ∬K dS.
struct ExcessCheck {
  double excess = 0.0;
  double curvature_integral = 0.0;
  double residual = 0.0;  // excess - curvature_integral
};

inline ExcessCheck excess_check(const GeodesicTriangle& t) {
  return {t.excess, t.curvature_integral, t.excess - t.curvature_integral};
}

namespace detail {

/// Point at arc length s along the geodesic that starts like `side`.
inline Point point_along(const GeodesicPath& side, double s, const SolverOptions& opts) {
  if (s <= 0.0) return side.start();
  if (s >= side.length) return side.finish();
  return shoot(side.surface, side.start(), endpoint_tangent(side, PathEnd::start), s, opts).finish();
}

}  // namespace detail

/// Geodesic distance from a vertex to the opposite side.
inline double height_from_vertex(const GeodesicTriangle& t, Vertex vertex) {
  const SolverOptions& opts = t.options;
  const Point apex = vertex == Vertex::A ? t.A : vertex == Vertex::B ? t.B : t.C;
  const GeodesicPath& side = vertex == Vertex::A ? t.bc : vertex == Vertex::B ? t.ac : t.ab;
  const double L = side.length;

  // Local distances stay inside the guard; the foot is never farther than the longer adjacent side.
  auto distance = [&](double s) { return connect(t.surface, apex, detail::point_along(side, s, opts), opts).path.length; };

  const int stride = std::max<int>(1, static_cast<int>(side.samples.size() - 1) / 16);
  std::vector<double> grid;
  for (std::size_t k = 0; k < side.samples.size(); k += stride) grid.push_back(side.samples[k].s);
  if (grid.back() != L) grid.push_back(L);

  std::vector<double> d(grid.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    d[k] = distance(grid[k]);
    if (d[k] < d[best]) best = k;
  }
  double lo = grid[best == 0 ? 0 : best - 1];
  double hi = grid[std::min(best + 1, grid.size() - 1)];

  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = distance(x1), f2 = distance(x2);
  while (hi - lo > 1e-9 * L) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = distance(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = distance(x2);
    }
  }
  return std::min({f1, f2, d[best]});
}

/// Unit direction at p making metric angle `angle` with w, counter-clockwise in the chart frame.
inline ChartVector rotate_direction(const SurfaceModel& m, Point p, ChartVector w, double angle) {
  const MetricData g = m.metric_at(p);
  const auto [e1, e2] = detail::orthonormal_frame(g);
  const double a = inner(g, w, e1), b = inner(g, w, e2);
  const double n = std::hypot(a, b);
  const double c = std::cos(angle), s = std::sin(angle);
  const double x = (c * a - s * b) / n, y = (s * a + c * b) / n;
  return {x * e1.du + y * e2.du, x * e1.dv + y * e2.dv};
}

/// One member of the directional family at scale t.
inline GeodesicTriangle family_member(const SurfaceModel& m, Point apex, ChartVector dir1, ChartVector dir2, double L1,
                                      double L2, double t, const SolverOptions& opts = {}) {
  if (!(t > 0.0) || !(L1 > 0.0) || !(L2 > 0.0)) throw InputError("scale_family: scales and lengths must be positive");
  if (std::abs(detail::cross(dir1, dir2)) <= 1e-12 * chart_norm(dir1) * chart_norm(dir2))
    throw InputError("scale_family: directions are not independent");
  const double guard = m.diameter_guard(opts.guard_factor);
  if (t * std::max(L1, L2) > guard) throw InputError("scale_family: scale exceeds the diameter guard");
  const Point A = shoot(m, apex, dir1, t * L1, opts).finish();
  const Point C = shoot(m, apex, dir2, t * L2, opts).finish();
  return build_triangle(m, A, apex, C, opts);
}

/// Similar-triangle family around an apex, which becomes vertex B:
/// A = exp_apex(t L1 dir1), C = exp_apex(t L2 dir2). The angle at B is fixed by dir1, dir2.
inline std::vector<GeodesicTriangle> scale_family(const SurfaceModel& m, Point apex, ChartVector dir1, ChartVector dir2,
                                                  double L1, double L2, std::span<const double> scales,
                                                  const SolverOptions& opts = {}) {
  std::vector<GeodesicTriangle> out;
  out.reserve(scales.size());
  for (double t : scales) out.push_back(family_member(m, apex, dir1, dir2, L1, L2, t, opts));
  return out;
}

/// Equilateral triangle of side t with vertex B at the apex and side BA along dir1.
/// The angle at B is solved so that the third side also has length t.
inline GeodesicTriangle equilateral_member(const SurfaceModel& m, Point apex, ChartVector dir1, double t,
                                           const SolverOptions& opts = {}) {
  if (!(t > 0.0)) throw InputError("equilateral family: scale must be positive");
  if (t > m.diameter_guard(opts.guard_factor)) throw InputError("equilateral family: scale exceeds the diameter guard");
  const Point A = shoot(m, apex, dir1, t, opts).finish();
  auto third_side = [&](double angle) {
    const Point C = shoot(m, apex, rotate_direction(m, apex, dir1, angle), t, opts).finish();
    return connect(m, A, C, opts).path.length - t;
  };
  double x0 = std::numbers::pi / 3, x1 = x0 * (1.0 + 1e-3);
  double f0 = third_side(x0), f1 = third_side(x1);
  for (int it = 0; it < 60 && f1 != 0.0 && std::abs(x1 - x0) > 1e-15 * x1; ++it) {
    if (f1 == f0) break;
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = third_side(x1);
  }
  if (!(std::abs(f1) <= 1e-9 * t)) throw NumericalError("equilateral family: apex angle solve failed");
  const Point C = shoot(m, apex, rotate_direction(m, apex, dir1, x1), t, opts).finish();
  return build_triangle(m, A, apex, C, opts);
}

}  // namespace geotrig
