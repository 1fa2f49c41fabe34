#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "geotrig/error.hpp"
#include "geotrig/ode.hpp"
#include "geotrig/surface.hpp"

namespace geotrig {

/// Numerical knobs shared by the geodesic, triangle and law layers.
struct SolverOptions {
  ode::Tolerances integrator{};  // rtol 1e-10, atol 1e-12
  int intervals = 128;           // output grid per geodesic (>= 64)
  double bvp_tol = 1e-10;        // endpoint miss relative to the chord length
  int max_iterations = 50;
  double fd_step = 1e-7;         // forward-difference step on (angle, relative length)
  double guard_factor = 2.0;     // diameter guard = guard_factor / sqrt(max|K|)
};

struct PathSample {
  double u = 0.0, v = 0.0;
  double du = 0.0, dv = 0.0;  // d/ds of the chart coordinates
  double s = 0.0;

  Point point() const { return {u, v}; }
  ChartVector velocity() const { return {du, dv}; }
};

/// A unit-speed geodesic sampled on a uniform arc-length grid.
struct GeodesicPath {
  std::vector<PathSample> samples;
  double length = 0.0;
  SurfaceModel surface;

  Point start() const { return samples.front().point(); }
  Point finish() const { return samples.back().point(); }
};

struct ShootingReport {
  bool converged = false;
  int iterations = 0;
  double miss = 0.0;        // final endpoint miss in chart distance
  double tolerance = 0.0;   // miss threshold used
  ChartVector direction{};  // unit initial direction found
  double length = 0.0;
};

struct ConnectResult {
  GeodesicPath path;
  ShootingReport report;
};

namespace detail {

struct GeodesicRhs {
  const SurfaceModel* surface;
  std::array<double, 4> operator()(double, const std::array<double, 4>& y) const {
    const MetricData m = surface->metric_at({y[0], y[1]});
    const Christoffel& c = m.christoffel;
    const double du = y[2], dv = y[3];
    return {du, dv, -(c.u_uu * du * du + 2.0 * c.u_uv * du * dv + c.u_vv * dv * dv),
            -(c.v_uu * du * du + 2.0 * c.v_uv * du * dv + c.v_vv * dv * dv)};
  }
};

/// Orthonormal frame at p: e1 along ∂u, e2 its metric-orthogonal complement.
inline std::pair<ChartVector, ChartVector> orthonormal_frame(const MetricData& m) {
  const double sE = std::sqrt(m.E);
  const ChartVector e1{1.0 / sE, 0.0};
  const double n = std::sqrt(m.E * m.det());
  const ChartVector e2{-m.F / n, m.E / n};
  return {e1, e2};
}

}  // namespace detail

/// Integrates the geodesic from p with initial direction w (rescaled to unit speed) for the given length.
inline GeodesicPath shoot(const SurfaceModel& m, Point p, ChartVector w, double length,
                          const SolverOptions& opts = {}) {
  if (w.du == 0.0 && w.dv == 0.0) throw InputError("shoot: zero direction");
  if (!(length > 0.0) || !std::isfinite(length)) throw InputError("shoot: length must be positive");
  const MetricData g = m.metric_at(p);
  const double speed = metric_norm(g, w);
  const ChartVector t{w.du / speed, w.dv / speed};

  const int n = std::max(opts.intervals, 64);
  GeodesicPath path;
  path.surface = m;
  path.length = length;
  path.samples.reserve(static_cast<std::size_t>(n) + 1);

  using Solver = ode::DormandPrince<4, detail::GeodesicRhs>;
  Solver solver(detail::GeodesicRhs{&m}, 0.0, {p.u, p.v, t.du, t.dv}, length / n, opts.integrator);
  path.samples.push_back({p.u, p.v, t.du, t.dv, 0.0});
  for (int k = 1; k <= n; ++k) {
    const double s = k == n ? length : length * k / n;
    try {
      solver.advance_to(s);
    } catch (const OutOfDomain&) {
      throw NumericalError("geodesic left the chart domain near s = " + std::to_string(solver.position()));
    }
    const auto& y = solver.state();
    path.samples.push_back({y[0], y[1], y[2], y[3], s});
  }
  return path;
}

/// Joins p to q by a geodesic using Newton shooting on (initial angle, length).
inline ConnectResult connect(const SurfaceModel& m, Point p, Point q, const SolverOptions& opts = {}) {
  const double chord = chart_distance(p, q);
  if (!(chord > 0.0)) throw InputError("connect: endpoints coincide");
  if (!m.domain().contains(p) || !m.domain().contains(q)) throw InputError("connect: endpoint outside chart domain");

  const MetricData gp = m.metric_at(p);
  const auto [e1, e2] = detail::orthonormal_frame(gp);
  const ChartVector d = q - p;
  const MetricData gmid = m.metric_at({0.5 * (p.u + q.u), 0.5 * (p.v + q.v)});
  double length = metric_norm(gmid, d);
  const double guard = m.diameter_guard(opts.guard_factor);
  if (length > guard)
    throw InputError("connect: points " + std::to_string(length) + " apart exceed the diameter guard " +
                     std::to_string(guard));
  double theta = std::atan2(inner(gp, d, e2), inner(gp, d, e1));

  auto direction = [&, e1 = e1, e2 = e2](double th) {
    return ChartVector{std::cos(th) * e1.du + std::sin(th) * e2.du, std::cos(th) * e1.dv + std::sin(th) * e2.dv};
  };
  auto endpoint = [&](double th, double len) { return shoot(m, p, direction(th), len, opts).finish(); };

  ShootingReport report;
  report.tolerance = opts.bvp_tol * chord;

  Point end = endpoint(theta, length);
  ChartVector r = end - q;
  double miss = chart_norm(r);
  int polish = 0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (miss <= report.tolerance) {
      report.converged = true;
      // Keep iterating while Newton still pays off, down to integrator noise.
      if (++polish > 3 || miss == 0.0) break;
    }
    const double dth = opts.fd_step;
    const double dlen = opts.fd_step * length;
    const ChartVector j_th = (1.0 / dth) * (endpoint(theta + dth, length) - end);
    const ChartVector j_len = (1.0 / dlen) * (endpoint(theta, length + dlen) - end);
    const double det = j_th.du * j_len.dv - j_len.du * j_th.dv;
    if (!(std::abs(det) > 0.0)) throw NumericalError("connect: singular shooting Jacobian");
    double step_th = -(r.du * j_len.dv - j_len.du * r.dv) / det;
    double step_len = -(j_th.du * r.dv - r.du * j_th.dv) / det;

    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      const double th_try = theta + step_th;
      const double len_try = length + step_len;
      if (len_try > 0.0) {
        try {
          const Point e = endpoint(th_try, len_try);
          const ChartVector r_try = e - q;
          const double miss_try = chart_norm(r_try);
          if (miss_try < miss) {
            theta = th_try;
            length = len_try;
            end = e;
            r = r_try;
            miss = miss_try;
            improved = true;
            break;
          }
        } catch (const NumericalError&) {
          // trial left the domain; shorten the step
        }
      }
      step_th *= 0.5;
      step_len *= 0.5;
      if (report.converged) break;  // polishing never line-searches
    }
    if (!improved) {
      if (report.converged) break;
      throw NumericalError("connect: shooting stalled with endpoint miss " + std::to_string(miss));
    }
  }
  if (!report.converged && miss <= report.tolerance) report.converged = true;
  if (!report.converged)
    throw NumericalError("connect: no convergence after " + std::to_string(opts.max_iterations) +
                         " iterations, endpoint miss " + std::to_string(miss));

  ConnectResult result;
  result.path = shoot(m, p, direction(theta), length, opts);
  result.report.converged = true;
  result.report.iterations = it;
  result.report.tolerance = report.tolerance;
  result.report.miss = chart_distance(result.path.finish(), q);
  result.report.direction = direction(theta);
  result.report.length = length;
  return result;
}

enum class PathEnd { start, finish };

/// Which way the returned tangent points at `finish`: along the direction of travel, or back into the path.
enum class TangentSense { along_path, into_path };

/// Unit tangent at an endpoint. At `start` both senses agree.
inline ChartVector endpoint_tangent(const GeodesicPath& path, PathEnd end,
                                    TangentSense sense = TangentSense::along_path) {
  if (path.samples.size() < 2) throw InputError("endpoint_tangent: empty path");
  if (end == PathEnd::start) return path.samples.front().velocity();
  const ChartVector t = path.samples.back().velocity();
  return sense == TangentSense::into_path ? ChartVector{-t.du, -t.dv} : t;
}

/// The same geodesic traversed from finish to start.
inline GeodesicPath reversed(const GeodesicPath& path) {
  GeodesicPath r;
  r.surface = path.surface;
  r.length = path.length;
  r.samples.reserve(path.samples.size());
  for (auto it = path.samples.rbegin(); it != path.samples.rend(); ++it)
    r.samples.push_back({it->u, it->v, -it->du, -it->dv, path.length - it->s});
  r.samples.front().s = 0.0;
  r.samples.back().s = path.length;
  return r;
}

}  // namespace geotrig
