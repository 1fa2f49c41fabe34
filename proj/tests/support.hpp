#pragma once

// Independent closed-form oracles and fixtures shared by the test binaries.

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "geotrig/laws.hpp"

namespace geotrig::testing {

using std::numbers::pi;

inline SurfaceModel plane() {
  SurfaceSpec s;
  s.kind = SurfaceKind::plane;
  return make_surface(s);
}

inline SurfaceModel sphere(double K = 1.0) {
  SurfaceSpec s;
  s.kind = SurfaceKind::sphere_K;
  s.curvature = K;
  return make_surface(s);
}

inline SurfaceModel half_plane(double K = -1.0) {
  SurfaceSpec s;
  s.kind = SurfaceKind::hyperbolic_K;
  s.curvature = K;
  return make_surface(s);
}

inline SurfaceModel torus(double R = 2.0, double r = 1.0) {
  SurfaceSpec s;
  s.kind = SurfaceKind::torus;
  s.major_radius = R;
  s.minor_radius = r;
  return make_surface(s);
}

inline SurfaceModel paraboloid() {
  SurfaceSpec s;
  s.kind = SurfaceKind::monge;
  s.height = "(u*u + v*v)/2";
  return make_surface(s);
}

inline SurfaceModel ellipsoid() {
  SurfaceSpec s;
  s.kind = SurfaceKind::ellipsoid;
  s.a = 1.2;
  s.b = 1.0;
  s.c = 0.8;
  return make_surface(s);
}

inline std::array<double, 3> sphere_point(Point p) {
  return {std::cos(p.v) * std::cos(p.u), std::cos(p.v) * std::sin(p.u), std::sin(p.v)};
}

// Great-circle distance on the sphere of curvature K; atan2 form stays accurate for short arcs.
inline double sphere_distance(Point p, Point q, double K = 1.0) {
  const auto x = sphere_point(p), y = sphere_point(q);
  const double dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  const double cx = x[1] * y[2] - x[2] * y[1], cy = x[2] * y[0] - x[0] * y[2], cz = x[0] * y[1] - x[1] * y[0];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot) / std::sqrt(K);
}

// Upper half-plane distance for curvature K < 0.
inline double half_plane_distance(Point p, Point q, double K = -1.0) {
  const double du = q.u - p.u, dv = q.v - p.v;
  const double x = (du * du + dv * dv) / (2.0 * p.v * q.v);
  // acosh(1 + x) written via log1p for small x
  return std::log1p(x + std::sqrt(x * (x + 2.0))) / std::sqrt(-K);
}

// Angle at the vertex between sides b and c opposite side a, on a surface of constant K.
inline double constant_k_angle(double K, double a, double b, double c) {
  if (K > 0) {
    const double k = std::sqrt(K);
    return std::acos((std::cos(k * a) - std::cos(k * b) * std::cos(k * c)) / (std::sin(k * b) * std::sin(k * c)));
  }
  if (K < 0) {
    const double k = std::sqrt(-K);
    return std::acos((std::cosh(k * b) * std::cosh(k * c) - std::cosh(k * a)) / (std::sinh(k * b) * std::sinh(k * c)));
  }
  return std::acos((b * b + c * c - a * a) / (2 * b * c));
}

// Octant of the unit sphere, posed away from the chart poles: the three vertices are the
// images of the coordinate axes under a rotation taking (1,1,1)/sqrt(3) to the equator.
inline std::array<Point, 3> octant_vertices() {
  const double lat_low = std::asin(-std::sqrt(2.0 / 3.0));
  const double lat_high = std::asin(1.0 / std::sqrt(6.0));
  const double lon = std::atan2(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(3.0));
  return {Point{0.0, lat_low}, Point{lon, lat_high}, Point{-lon, lat_high}};
}

inline SolverOptions tight_options() {
  SolverOptions o;
  o.integrator.rtol = 1e-13;
  o.integrator.atol = 1e-15;
  o.bvp_tol = 1e-13;
  return o;
}

inline SolverOptions wide_guard(double factor = 4.0) {
  SolverOptions o;
  o.guard_factor = factor;
  return o;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace geotrig::testing
