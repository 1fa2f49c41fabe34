#pragma once

// Trigonometric laws for geodesic triangles and the residuals that measure
// how far a numerically built triangle departs from each of them.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "geotrig/error.hpp"
#include "geotrig/triangle.hpp"

namespace geotrig::laws {

enum class Law {
  euclid_cos,
  unified_cos,
  unified_sine,
  gauss_bonnet,
  toponogov_sine,
  darboux_h,
  darboux_S,
  darboux_angle,
  general_cos,
  general_pythagoras,
};

inline constexpr std::array<Law, 10> kAllLaws{Law::euclid_cos,     Law::unified_cos, Law::unified_sine,
                                              Law::gauss_bonnet,   Law::toponogov_sine, Law::darboux_h,
                                              Law::darboux_S,      Law::darboux_angle,  Law::general_cos,
                                              Law::general_pythagoras};

inline std::string_view to_string(Law law) {
  switch (law) {
    case Law::euclid_cos: return "euclid_cos";
    case Law::unified_cos: return "unified_cos";
    case Law::unified_sine: return "unified_sine";
    case Law::gauss_bonnet: return "gauss_bonnet";
    case Law::toponogov_sine: return "toponogov_sine";
    case Law::darboux_h: return "darboux_h";
    case Law::darboux_S: return "darboux_S";
    case Law::darboux_angle: return "darboux_angle";
    case Law::general_cos: return "general_cos";
    case Law::general_pythagoras: return "general_pythagoras";
  }
  return "?";
}

inline std::optional<Law> law_from_string(std::string_view s) {
  for (Law law : kAllLaws)
    if (to_string(law) == s) return law;
  return std::nullopt;
}

/// Residual columns a law contributes, in report order.
inline std::vector<std::string> residual_labels(Law law) {
  if (law == Law::toponogov_sine) return {"toponogov_sine_AB", "toponogov_sine_BC"};
  return {std::string(to_string(law))};
}

/// A measured-versus-predicted comparison. `residual` is always `measured - predicted`.
struct LawResidual {
  Law law = Law::euclid_cos;
  std::string label;
  double predicted = 0.0;
  double measured = 0.0;
  double residual = 0.0;
  std::map<std::string, double> inputs;
  double error_budget = 0.0;

  bool within_numerics() const { return std::abs(residual) <= error_budget; }
};

inline LawResidual make_residual(Law law, std::string label, double predicted, double measured, double budget,
                                 std::map<std::string, double> inputs = {}) {
  return {law, std::move(label), predicted, measured, measured - predicted, std::move(inputs), budget};
}

// ---------------------------------------------------------------------------
// Closed-form laws

/// Planar law of cosines: the squared side opposite the angle.
inline double euclid_cos(double AB, double BC, double beta) {
  return AB * AB + BC * BC - 2.0 * AB * BC * std::cos(beta);
}

/// Third side of a triangle with sides a, b enclosing `angle` on the plane of constant curvature K.
///
/// K > 0 uses the spherical law with kappa = sqrt(K); K < 0 uses kappa = i sqrt(-K), where
/// cos(i x) = cosh x turns the same law into the hyperbolic one. Both are evaluated in
/// half-angle form, sin^2(kc/2) = sin^2(k(a-b)/2) + sin(ka) sin(kb) sin^2(angle/2), which
/// stays accurate as K -> 0 and reduces to the planar law at K = 0.
inline double unified_cos(double K, double a, double b, double angle) {
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("unified_cos: sides must be positive");
  if (!(angle > 0.0 && angle < std::numbers::pi)) throw InputError("unified_cos: angle must be in (0, pi)");
  const double hav_angle = std::pow(std::sin(0.5 * angle), 2);
  if (K == 0.0) return std::sqrt(std::pow(a - b, 2) + 4.0 * a * b * hav_angle);
  if (K > 0.0) {
    const double k = std::sqrt(K);
    if (!(k * a < std::numbers::pi) || !(k * b < std::numbers::pi))
      throw InputError("unified_cos: sides must be shorter than pi / sqrt(K)");
    double hav = std::pow(std::sin(0.5 * k * (a - b)), 2) + std::sin(k * a) * std::sin(k * b) * hav_angle;
    if (hav > 1.0 + 1e-12 || hav < -1e-12) throw NumericalError("unified_cos: inconsistent inputs");
    hav = std::clamp(hav, 0.0, 1.0);
    return 2.0 * std::asin(std::sqrt(hav)) / k;
  }
  const double k = std::sqrt(-K);
  const double sh2 = std::pow(std::sinh(0.5 * k * (a - b)), 2) + std::sinh(k * a) * std::sinh(k * b) * hav_angle;
  return 2.0 * std::asinh(std::sqrt(std::max(sh2, 0.0))) / k;
}

/// Leading terms of the Toponogov sine theorem: AB ≈ sin(γ)δ/sin(α+γ), BC ≈ sin(α)δ/sin(α+γ).
inline std::pair<double, double> toponogov_predict(double delta, double alpha, double gamma) {
  using std::numbers::pi;
  if (!(alpha > 0.0 && alpha < pi && gamma > 0.0 && gamma < pi))
    throw InputError("toponogov_predict: angles must be in (0, pi)");
  const double sum = alpha + gamma;
  if (sum < 1e-6 || std::abs(sum - pi) < 1e-6 || sum > pi || std::sin(sum) < 1e-6)
    throw NumericalError("toponogov_predict: singular predictor (alpha + gamma at 0 or pi)");
  const double s = std::sin(sum);
  return {std::sin(gamma) * delta / s, std::sin(alpha) * delta / s};
}

enum class CoefficientVariant { thm1, literal };

/// Trigonometric coefficients m, w and c attached to the generalized cosine law.
struct ProofCoefficients {
  double m = 0.0;          // 1 + sin(α+γ)
  double w_thm1 = 0.0;     // sin(α+γ) m / (1 + cos(α+γ))
  double w_literal = 0.0;  // sin(α+γ) m / m(π/2-α, π/2-γ) = sin(α+γ)
  double c = 0.0;          // m² + w² + 2(cos α m + sin α w), with the selected w
  CoefficientVariant variant = CoefficientVariant::thm1;
};

inline ProofCoefficients proof_coefficients(double alpha, double gamma,
                                            CoefficientVariant variant = CoefficientVariant::thm1) {
  using std::numbers::pi;
  if (!(alpha > 0.0 && alpha < pi && gamma > 0.0 && gamma < pi))
    throw InputError("proof_coefficients: angles must be in (0, pi)");
  auto m_of = [](double a, double g) { return 1.0 + std::sin(a + g); };
  ProofCoefficients pc;
  pc.variant = variant;
  const double s = std::sin(alpha + gamma);
  pc.m = m_of(alpha, gamma);
  pc.w_literal = s * pc.m / m_of(pi / 2 - alpha, pi / 2 - gamma);
  const double denom = 1.0 + std::cos(alpha + gamma);
  if (denom >= 1e-9)
    pc.w_thm1 = s * pc.m / denom;
  else if (variant == CoefficientVariant::thm1)
    throw NumericalError("proof_coefficients: thm1 variant singular at alpha + gamma = pi");
  else
    pc.w_thm1 = std::numeric_limits<double>::quiet_NaN();
  const double w = variant == CoefficientVariant::thm1 ? pc.w_thm1 : pc.w_literal;
  pc.c = pc.m * pc.m + w * w + 2.0 * (std::cos(alpha) * pc.m + std::sin(alpha) * w);
  return pc;
}

// ---------------------------------------------------------------------------
// Numerical error budgets
//
// Each side carries an error bound of rtol·L + atol + endpoint miss; angles
// inherit that bound divided by the shorter adjacent side. Budgets are those
// bounds pushed through each law's first-order sensitivities, times 10.

namespace detail {

inline constexpr double kSafety = 10.0;

struct SideErrors {
  double ab, bc, ac;
  double angle;  // bound on each measured angle
};

inline SideErrors side_errors(const GeodesicTriangle& t) {
  const auto& tol = t.options.integrator;
  auto e = [&](double L, const ShootingReport& r) { return tol.rtol * L + tol.atol + r.miss + 1e-15 * L; };
  SideErrors s{e(t.AB, t.reports[0]), e(t.BC, t.reports[1]), e(t.AC, t.reports[2]), 0.0};
  const double shortest = std::min({t.AB, t.BC, t.AC});
  s.angle = std::max({s.ab, s.bc, s.ac}) / shortest + 1e-15;
  return s;
}

/// Budget for AC² - (expression in AB, BC and one angle with coefficient ~AB·BC).
inline double squared_side_budget(const GeodesicTriangle& t) {
  const SideErrors e = side_errors(t);
  return kSafety * (2.0 * t.AC * e.ac + 2.0 * (t.AB + t.BC) * (e.ab + e.bc) + 2.0 * t.AB * t.BC * e.angle);
}

}  // namespace detail

/// Error budget on the measured angle sum minus π.
inline double excess_budget(const GeodesicTriangle& t) {
  return detail::kSafety * 3.0 * detail::side_errors(t).angle;
}

/// Curvature used by the laws that assume one K: the configured constant when the
/// surface has one, otherwise K at the chart centroid of the three vertices.
inline double triangle_curvature(const GeodesicTriangle& t) {
  if (t.surface.is_constant_curvature()) return t.surface.constant_curvature();
  return t.surface.gaussian_curvature_at({(t.A.u + t.B.u + t.C.u) / 3.0, (t.A.v + t.B.v + t.C.v) / 3.0});
}

// ---------------------------------------------------------------------------
// Residual evaluators

inline LawResidual euclid_cos_residual(const GeodesicTriangle& t) {
  return make_residual(Law::euclid_cos, "euclid_cos", euclid_cos(t.AB, t.BC, t.beta), t.AC * t.AC,
                       detail::squared_side_budget(t), {{"AB", t.AB}, {"BC", t.BC}, {"beta", t.beta}});
}

inline LawResidual unified_cos_residual(const GeodesicTriangle& t, double K) {
  const auto e = detail::side_errors(t);
  const double budget = detail::kSafety * (e.ac + e.ab + e.bc + std::min(t.AB, t.BC) * e.angle);
  return make_residual(Law::unified_cos, "unified_cos", unified_cos(K, t.AB, t.BC, t.beta), t.AC, budget,
                       {{"K", K}, {"AB", t.AB}, {"BC", t.BC}, {"beta", t.beta}});
}

/// Spread of side-over-sine ratios; zero for a triangle satisfying the sine law of curvature K.
inline LawResidual unified_sine_check(double K, const GeodesicTriangle& t) {
  auto side_fn = [K](double L) {
    if (K > 0.0) return std::sin(std::sqrt(K) * L) / std::sqrt(K);
    if (K < 0.0) return std::sinh(std::sqrt(-K) * L) / std::sqrt(-K);
    return L;
  };
  for (double a : {t.alpha, t.beta, t.gamma})
    if (std::sin(a) < 1e-9) throw NumericalError("unified_sine: degenerate angle");
  const double r_a = side_fn(t.BC) / std::sin(t.alpha);
  const double r_b = side_fn(t.AC) / std::sin(t.beta);
  const double r_c = side_fn(t.AB) / std::sin(t.gamma);
  const double lo = std::min({r_a, r_b, r_c}), hi = std::max({r_a, r_b, r_c});
  const auto e = detail::side_errors(t);
  double budget = 0.0;
  for (auto [L, eL, ang] : {std::tuple{t.BC, e.bc, t.alpha}, std::tuple{t.AC, e.ac, t.beta}, std::tuple{t.AB, e.ab, t.gamma}})
    budget = std::max(budget, hi * (eL / L + e.angle * std::abs(1.0 / std::tan(ang))));
  budget *= 2.0 * detail::kSafety;
  return make_residual(Law::unified_sine, "unified_sine", lo, hi, budget,
                       {{"K", K}, {"ratio_alpha", r_a}, {"ratio_beta", r_b}, {"ratio_gamma", r_c}});
}

/// Angle excess minus ∬K dS.
inline LawResidual gauss_bonnet_residual(const GeodesicTriangle& t) {
  const ExcessCheck ec = excess_check(t);
  const auto e = detail::side_errors(t);
  const double budget = detail::kSafety * (3.0 * e.angle + 1e-10 * (t.abs_curvature_integral + std::abs(t.area)));
  return make_residual(Law::gauss_bonnet, "gauss_bonnet", ec.curvature_integral, ec.excess, budget,
                       {{"excess", ec.excess}, {"curvature_integral", ec.curvature_integral}, {"area", t.area}});
}

/// AB and BC against the Toponogov leading terms, with δ = AC.
inline std::pair<LawResidual, LawResidual> toponogov_residuals(const GeodesicTriangle& t) {
  const auto [ab_pred, bc_pred] = toponogov_predict(t.AC, t.alpha, t.gamma);
  const double sum = t.alpha + t.gamma;
  const double shape = (1.0 + std::sin(sum)) / (1.0 + std::cos(sum));
  const auto e = detail::side_errors(t);
  const double s = std::sin(sum);
  // d/dα and d/dγ of sin(γ)δ/sin(α+γ) are bounded by δ(1 + |cot(α+γ)|)/sin(α+γ).
  const double angle_term = t.AC * (1.0 + std::abs(std::cos(sum) / s)) / s * 2.0 * e.angle;
  const std::map<std::string, double> in{{"delta", t.AC}, {"alpha", t.alpha}, {"gamma", t.gamma}, {"shape_factor", shape}};
  return {make_residual(Law::toponogov_sine, "toponogov_sine_AB", ab_pred, t.AB,
                        detail::kSafety * (e.ab + e.ac / s + angle_term), in),
          make_residual(Law::toponogov_sine, "toponogov_sine_BC", bc_pred, t.BC,
                        detail::kSafety * (e.bc + e.ac / s + angle_term), in)};
}

/// AC² - (AB² + BC² - 2 AB BC cos β); the quantity the generalized cosine theorem equates to f·ε².
inline LawResidual cosine_residual(const GeodesicTriangle& t) {
  const double excess2 = t.excess * t.excess;
  std::map<std::string, double> in{{"excess", t.excess}, {"excess_squared", excess2}};
  LawResidual r = make_residual(Law::general_cos, "general_cos", euclid_cos(t.AB, t.BC, t.beta), t.AC * t.AC,
                                detail::squared_side_budget(t), std::move(in));
  if (std::abs(t.excess) >= 1e-12) r.inputs["f_hat"] = r.residual / excess2;
  return r;
}

/// AC² - AB² - BC² for a triangle with a right angle at B.
inline LawResidual pythagoras_residual(const GeodesicTriangle& t) {
  if (std::abs(t.beta - std::numbers::pi / 2) > 1e-6) throw InputError("general_pythagoras: angle at B is not right");
  const double shift = t.alpha + t.gamma - std::numbers::pi / 2;
  return make_residual(Law::general_pythagoras, "general_pythagoras", t.AB * t.AB + t.BC * t.BC, t.AC * t.AC,
                       detail::squared_side_budget(t),
                       {{"angle_shift", shift}, {"angle_shift_squared", shift * shift}, {"excess", t.excess}});
}

enum class DarbouxVariant { h, S, angle_shift };

/// AC² against one of Darboux's curvature-corrected cosine laws.
/// `height` is the distance from B to side AC, needed only by the h variant.
inline LawResidual darboux_predict(const GeodesicTriangle& t, double K, DarbouxVariant variant,
                                   std::optional<double> height = std::nullopt) {
  const double base = euclid_cos(t.AB, t.BC, t.beta);
  const double AC2 = t.AC * t.AC;
  double budget = detail::squared_side_budget(t);
  switch (variant) {
    case DarbouxVariant::h: {
      const double h = height ? *height : height_from_vertex(t, Vertex::B);
      const double pred = base - K * h * h * AC2 / 3.0;
      return make_residual(Law::darboux_h, "darboux_h", pred, AC2, budget, {{"K", K}, {"height", h}});
    }
    case DarbouxVariant::S: {
      const double pred = base - 2.0 / 3.0 * K * t.area * t.AB * t.BC * std::sin(t.beta);
      return make_residual(Law::darboux_S, "darboux_S", pred, AC2, budget, {{"K", K}, {"area", t.area}});
    }
    case DarbouxVariant::angle_shift: {
      const double pred = euclid_cos(t.AB, t.BC, t.beta - t.excess / 3.0);
      return make_residual(Law::darboux_angle, "darboux_angle", pred, AC2, budget, {{"K", K}, {"KS", t.excess}});
    }
  }
  throw InputError("darboux_predict: unknown variant");
}

/// Empirical coefficient f̂ = (cosine residual) / ε².
inline double f_estimate(const GeodesicTriangle& t) {
  if (!(std::abs(t.excess) >= 1e-12)) throw NumericalError("f_estimate: angle excess below 1e-12, f is undefined");
  return cosine_residual(t).residual / (t.excess * t.excess);
}

/// Every residual a law produces for one triangle.
inline std::vector<LawResidual> evaluate(Law law, const GeodesicTriangle& t) {
  switch (law) {
    case Law::euclid_cos: return {euclid_cos_residual(t)};
    case Law::unified_cos: return {unified_cos_residual(t, triangle_curvature(t))};
    case Law::unified_sine: return {unified_sine_check(triangle_curvature(t), t)};
    case Law::gauss_bonnet: return {gauss_bonnet_residual(t)};
    case Law::toponogov_sine: {
      auto [ab, bc] = toponogov_residuals(t);
      return {ab, bc};
    }
    case Law::darboux_h: return {darboux_predict(t, triangle_curvature(t), DarbouxVariant::h)};
    case Law::darboux_S: return {darboux_predict(t, triangle_curvature(t), DarbouxVariant::S)};
    case Law::darboux_angle: return {darboux_predict(t, triangle_curvature(t), DarbouxVariant::angle_shift)};
    case Law::general_cos: return {cosine_residual(t)};
    case Law::general_pythagoras: return {pythagoras_residual(t)};
  }
  return {};
}

}  // namespace geotrig::laws
