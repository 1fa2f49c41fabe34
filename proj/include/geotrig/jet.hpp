#pragma once

#include <cmath>

namespace geotrig {

/// Second-order forward-mode jet in two variables (u, v).
///
/// Carries a value together with its gradient and Hessian. The Hessian is
/// stored as three numbers, so the mixed partial is symmetric by construction.
struct Jet2 {
  double value = 0.0;
  double d_u = 0.0;
  double d_v = 0.0;
  double d_uu = 0.0;
  double d_uv = 0.0;
  double d_vv = 0.0;

  static constexpr Jet2 constant(double c) noexcept { return Jet2{c, 0, 0, 0, 0, 0}; }
  static constexpr Jet2 variable_u(double u) noexcept { return Jet2{u, 1, 0, 0, 0, 0}; }
  static constexpr Jet2 variable_v(double v) noexcept { return Jet2{v, 0, 1, 0, 0, 0}; }

  constexpr bool is_constant() const noexcept {
    return d_u == 0 && d_v == 0 && d_uu == 0 && d_uv == 0 && d_vv == 0;
  }
  bool is_finite() const noexcept {
    return std::isfinite(value) && std::isfinite(d_u) && std::isfinite(d_v) &&
           std::isfinite(d_uu) && std::isfinite(d_uv) && std::isfinite(d_vv);
  }
};

/// Applies a scalar function given its value and first two derivatives at x.value.
constexpr Jet2 chain(const Jet2& x, double f0, double f1, double f2) noexcept {
  return Jet2{f0,
              f1 * x.d_u,
              f1 * x.d_v,
              f2 * x.d_u * x.d_u + f1 * x.d_uu,
              f2 * x.d_u * x.d_v + f1 * x.d_uv,
              f2 * x.d_v * x.d_v + f1 * x.d_vv};
}

constexpr Jet2 operator+(const Jet2& a, const Jet2& b) noexcept {
  return Jet2{a.value + b.value, a.d_u + b.d_u,   a.d_v + b.d_v,
              a.d_uu + b.d_uu,   a.d_uv + b.d_uv, a.d_vv + b.d_vv};
}

constexpr Jet2 operator-(const Jet2& a, const Jet2& b) noexcept {
  return Jet2{a.value - b.value, a.d_u - b.d_u,   a.d_v - b.d_v,
              a.d_uu - b.d_uu,   a.d_uv - b.d_uv, a.d_vv - b.d_vv};
}

constexpr Jet2 operator-(const Jet2& a) noexcept {
  return Jet2{-a.value, -a.d_u, -a.d_v, -a.d_uu, -a.d_uv, -a.d_vv};
}

constexpr Jet2 operator*(const Jet2& a, const Jet2& b) noexcept {
  return Jet2{a.value * b.value,
              a.d_u * b.value + a.value * b.d_u,
              a.d_v * b.value + a.value * b.d_v,
              a.d_uu * b.value + 2.0 * a.d_u * b.d_u + a.value * b.d_uu,
              a.d_uv * b.value + a.d_u * b.d_v + a.d_v * b.d_u + a.value * b.d_uv,
              a.d_vv * b.value + 2.0 * a.d_v * b.d_v + a.value * b.d_vv};
}

constexpr Jet2 operator*(double s, const Jet2& a) noexcept {
  return Jet2{s * a.value, s * a.d_u, s * a.d_v, s * a.d_uu, s * a.d_uv, s * a.d_vv};
}

// Callers check for a zero divisor; see expr.hpp.
inline Jet2 reciprocal(const Jet2& x) noexcept {
  const double r = 1.0 / x.value;
  return chain(x, r, -r * r, 2.0 * r * r * r);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) noexcept { return a * reciprocal(b); }

namespace jet {

inline Jet2 sin(const Jet2& x) noexcept {
  const double s = std::sin(x.value), c = std::cos(x.value);
  return chain(x, s, c, -s);
}
inline Jet2 cos(const Jet2& x) noexcept {
  const double s = std::sin(x.value), c = std::cos(x.value);
  return chain(x, c, -s, -c);
}
inline Jet2 tan(const Jet2& x) noexcept {
  const double t = std::tan(x.value);
  const double sec2 = 1.0 + t * t;
  return chain(x, t, sec2, 2.0 * t * sec2);
}
inline Jet2 sinh(const Jet2& x) noexcept {
  const double s = std::sinh(x.value), c = std::cosh(x.value);
  return chain(x, s, c, s);
}
inline Jet2 cosh(const Jet2& x) noexcept {
  const double s = std::sinh(x.value), c = std::cosh(x.value);
  return chain(x, c, s, c);
}
inline Jet2 tanh(const Jet2& x) noexcept {
  const double t = std::tanh(x.value);
  const double sech2 = 1.0 - t * t;
  return chain(x, t, sech2, -2.0 * t * sech2);
}
inline Jet2 exp(const Jet2& x) noexcept {
  const double e = std::exp(x.value);
  return chain(x, e, e, e);
}
inline Jet2 log(const Jet2& x) noexcept {
  const double r = 1.0 / x.value;
  return chain(x, std::log(x.value), r, -r * r);
}
inline Jet2 sqrt(const Jet2& x) noexcept {
  const double s = std::sqrt(x.value);
  return chain(x, s, 0.5 / s, -0.25 / (s * x.value));
}
inline Jet2 asin(const Jet2& x) noexcept {
  const double q = 1.0 - x.value * x.value;
  const double d1 = 1.0 / std::sqrt(q);
  return chain(x, std::asin(x.value), d1, x.value * d1 / q);
}
inline Jet2 acos(const Jet2& x) noexcept {
  const double q = 1.0 - x.value * x.value;
  const double d1 = 1.0 / std::sqrt(q);
  return chain(x, std::acos(x.value), -d1, -x.value * d1 / q);
}
inline Jet2 atan(const Jet2& x) noexcept {
  const double q = 1.0 / (1.0 + x.value * x.value);
  return chain(x, std::atan(x.value), q, -2.0 * x.value * q * q);
}

/// x^c for a constant exponent; valid for negative x when c is an integer.
inline Jet2 pow(const Jet2& x, double c) noexcept {
  if (c == 0.0) return Jet2::constant(1.0);
  if (c == 1.0) return x;
  if (c == 2.0) return x * x;
  const double f0 = std::pow(x.value, c);
  const double f1 = c * std::pow(x.value, c - 1.0);
  const double f2 = c == 1.0 ? 0.0 : c * (c - 1.0) * std::pow(x.value, c - 2.0);
  return chain(x, f0, f1, f2);
}

/// General x^y through exp(y log x); requires x > 0.
inline Jet2 pow(const Jet2& x, const Jet2& y) noexcept { return exp(y * log(x)); }

}  // namespace jet
}  // namespace geotrig
