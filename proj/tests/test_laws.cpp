#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace geotrig;
using namespace geotrig::testing;
namespace L = geotrig::laws;

namespace {

TEST(EuclidCos, Examples) {
  EXPECT_NEAR(L::euclid_cos(3, 4, pi / 2), 25.0, 1e-13);
  EXPECT_NEAR(L::euclid_cos(1, 1, pi / 3), 1.0, 1e-15);
  EXPECT_NEAR(L::euclid_cos(2, 3, 2 * pi / 3), 19.0, 1e-13);
}

TEST(UnifiedCos, Examples) {
  EXPECT_NEAR(L::unified_cos(1, pi / 2, pi / 2, pi / 2), pi / 2, 1e-15);
  const double c = L::unified_cos(-1, 1, 1, pi / 2);
  EXPECT_NEAR(std::cosh(c), std::cosh(1.0) * std::cosh(1.0), 1e-13);
  EXPECT_NEAR(c, std::acosh(std::cosh(1.0) * std::cosh(1.0)), 1e-14);
  EXPECT_NEAR(c, 1.5133740065965, 1e-12);
  EXPECT_NEAR(L::unified_cos(1e-8, 3, 4, pi / 2), 5.0, 5e-6);
  EXPECT_DOUBLE_EQ(L::unified_cos(0, 3, 4, pi / 2), 5.0);
}

TEST(UnifiedCos, SphereScaling) {
  // K = 4: same triangle as the unit sphere with lengths halved
  EXPECT_NEAR(L::unified_cos(4, 0.3, 0.4, 1.1), 0.5 * L::unified_cos(1, 0.6, 0.8, 1.1), 1e-15);
}

TEST(UnifiedCos, Errors) {
  EXPECT_THROW(L::unified_cos(1, 4.0, 0.5, 1.0), InputError);  // side beyond pi/sqrt(K)
  EXPECT_THROW(L::unified_cos(1, -0.1, 0.5, 1.0), InputError);
  EXPECT_THROW(L::unified_cos(-1, 0.1, 0.5, 4.0), InputError);
}

TEST(UnifiedCos, EuclideanLimitLinearInK) {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const double a = uniform(rng, 0.1, 2), b = uniform(rng, 0.1, 2), angle = uniform(rng, 0.1, 3);
    const double e = std::sqrt(L::euclid_cos(a, b, angle));
    double prev_err_pos = 0, prev_err_neg = 0;
    for (int p = 4; p <= 8; ++p) {
      const double K = std::pow(10.0, -p);
      const double ep = std::abs(L::unified_cos(K, a, b, angle) - e);
      const double en = std::abs(L::unified_cos(-K, a, b, angle) - e);
      EXPECT_LE(ep, 10.0 * K) << a << " " << b << " " << angle;
      EXPECT_LE(en, 10.0 * K);
      if (p > 4 && p < 7) {  // ratio stays near 10 until rounding sets in
        EXPECT_NEAR(prev_err_pos / ep, 10.0, 0.5);
        EXPECT_NEAR(prev_err_neg / en, 10.0, 0.5);
      }
      prev_err_pos = ep;
      prev_err_neg = en;
    }
  }
}

TEST(UnifiedCos, SymmetricAndMonotone) {
  std::mt19937_64 rng(42);
  for (double K : {1.0, 3.0, -1.0, -0.5}) {
    for (int k = 0; k < 20; ++k) {
      const double a = uniform(rng, 0.05, 1.4), b = uniform(rng, 0.05, 1.4);
      double last = 0.0;
      for (int i = 1; i < 30; ++i) {
        const double angle = pi * i / 30.0;
        const double c = L::unified_cos(K, a, b, angle);
        EXPECT_EQ(c, L::unified_cos(K, b, a, angle));
        EXPECT_GT(c, last);
        last = c;
      }
    }
  }
}

TEST(Toponogov, Predictor) {
  const double alpha = std::asin(0.8), gamma = std::asin(0.6);
  const auto [ab, bc] = L::toponogov_predict(5.0, alpha, gamma);
  EXPECT_NEAR(ab, 3.0, 1e-14);
  EXPECT_NEAR(bc, 4.0, 1e-14);
  const auto [x, y] = L::toponogov_predict(2.0, 0.7, 0.7);
  EXPECT_NEAR(x, 1.0 / std::cos(0.7), 1e-14);
  EXPECT_EQ(x, y);
  EXPECT_THROW(L::toponogov_predict(1.0, pi / 2, pi / 2), NumericalError);
  EXPECT_THROW(L::toponogov_predict(1.0, 1e-7, 1e-7), NumericalError);
}

TEST(Toponogov, SphereEquilateral) {
  const double t = 0.1;
  const auto tri = equilateral_member(sphere(), {0.3, 0.2}, {1, 0}, t, tight_options());
  const auto [ab, bc] = L::toponogov_residuals(tri);
  // cos α = cos t / (1 + cos t), AB_pred = t / (2 cos α)
  const double ca = std::cos(t) / (1 + std::cos(t));
  EXPECT_NEAR(ab.residual, t - t / (2 * ca), 1e-10);
  EXPECT_NEAR(ab.residual, -t * t * t / 4, 0.1 * t * t * t / 4);
  EXPECT_TRUE(ab.inputs.contains("shape_factor"));
  const double s = std::sin(tri.alpha + tri.gamma), c = std::cos(tri.alpha + tri.gamma);
  EXPECT_NEAR(ab.inputs.at("shape_factor"), (1 + s) / (1 + c), 1e-12);
}

TEST(Toponogov, HalfPlaneSignFlips) {
  const auto tri = equilateral_member(half_plane(), {0, 1}, {1, 0}, 0.1, tight_options());
  EXPECT_GT(L::toponogov_residuals(tri).first.residual, 0.0);
}

TEST(Toponogov, OctantIsSingular) {
  const auto v = octant_vertices();
  const auto t = build_triangle(sphere(), v[0], v[1], v[2], wide_guard());
  EXPECT_THROW(L::toponogov_residuals(t), NumericalError);
}

TEST(CosineResidual, SphereEquilateral) {
  const double t = 0.05;
  const auto tri = equilateral_member(sphere(), {0.3, 0.2}, {1, 0}, t, tight_options());
  const double ca = std::cos(t) / (1 + std::cos(t));
  const auto r = L::cosine_residual(tri);
  EXPECT_NEAR(r.residual, t * t * (2 * ca - 1), 1e-12);
  EXPECT_NEAR(r.residual / std::pow(t, 4), -0.25, 0.01);
  EXPECT_EQ(r.residual, r.measured - r.predicted);
}

TEST(CosineResidual, SignOppositeToK) {
  for (double K : {0.5, 1.0, 4.0}) {
    const auto tri = family_member(sphere(K), {0.1, 0.2}, {1, 0.2}, {0.3, 1}, 1, 1, 0.1);
    EXPECT_LT(L::cosine_residual(tri).residual, 0.0);
  }
  for (double K : {-1.0, -2.0}) {
    const auto tri = family_member(half_plane(K), {0.1, 1}, {1, 0.2}, {0.3, 1}, 1, 1, 0.1);
    EXPECT_GT(L::cosine_residual(tri).residual, 0.0);
  }
}

TEST(Pythagoras, Examples) {
  const auto flat = L::pythagoras_residual(build_triangle(plane(), {0, 0}, {3, 0}, {3, 4}));
  EXPECT_LE(std::abs(flat.residual), 1e-9);

  const double t = 0.05;
  const auto tri = family_member(sphere(), {0.3, 0.2}, {1, 0}, {0, 1}, 1, 1, t, tight_options());
  const auto r = L::pythagoras_residual(tri);
  // cos AC = cos² t
  const double AC = std::acos(std::cos(t) * std::cos(t));
  EXPECT_NEAR(r.residual, AC * AC - 2 * t * t, 1e-12);
  EXPECT_NEAR(r.residual / std::pow(t, 4), -1.0 / 3, 0.01);
  EXPECT_NEAR(r.inputs.at("angle_shift") / (t * t), 0.5, 0.01);

  const auto hyp = family_member(half_plane(), {0, 1}, {1, 0}, {0, 1}, 1, 1, t, tight_options());
  const double ACh = std::acosh(std::cosh(t) * std::cosh(t));
  const auto rh = L::pythagoras_residual(hyp);
  EXPECT_NEAR(rh.residual, ACh * ACh - 2 * t * t, 1e-12);
  EXPECT_NEAR(rh.residual / std::pow(t, 4), 1.0 / 3, 0.01);
}

TEST(Pythagoras, RequiresRightAngle) {
  EXPECT_THROW(L::pythagoras_residual(build_triangle(plane(), {0, 0}, {3, 0}, {4, 4})), InputError);
}

TEST(Pythagoras, EqualsCosineAtRightAngle) {
  const auto tri = family_member(sphere(), {0.3, 0.2}, {1, 0}, {0, 1}, 1, 2, 0.2);
  EXPECT_NEAR(L::pythagoras_residual(tri).residual, L::cosine_residual(tri).residual, 1e-12);
}

TEST(SineCheck, Examples) {
  const auto flat = L::unified_sine_check(0.0, build_triangle(plane(), {0, 0}, {3, 0}, {3, 4}));
  EXPECT_NEAR(flat.predicted, 5.0, 1e-9);
  EXPECT_LE(std::abs(flat.residual), 1e-9);

  const auto v = octant_vertices();
  const auto oct = L::unified_sine_check(1.0, build_triangle(sphere(), v[0], v[1], v[2], wide_guard()));
  EXPECT_NEAR(oct.predicted, 1.0, 1e-7);
  EXPECT_LE(std::abs(oct.residual), 1e-7);

  const auto hyp = L::unified_sine_check(-1.0, build_triangle(half_plane(), {0, 1}, {1, 1}, {0.5, 1.5}));
  EXPECT_TRUE(hyp.within_numerics()) << hyp.residual << " " << hyp.error_budget;
}

TEST(Darboux, PlaneCollapses) {
  const auto t = build_triangle(plane(), {0, 0}, {2, 0.3}, {0.4, 1.7});
  for (auto v : {L::DarbouxVariant::h, L::DarbouxVariant::S, L::DarbouxVariant::angle_shift})
    EXPECT_LE(std::abs(L::darboux_predict(t, 0.0, v).residual), 1e-9);
}

TEST(Darboux, SphereCorrections) {
  const double t = 0.05;
  const auto eq = equilateral_member(sphere(), {0.3, 0.2}, {1, 0}, t, tight_options());
  const double plain = std::abs(L::cosine_residual(eq).residual);
  const double corrected = std::abs(L::darboux_predict(eq, 1.0, L::DarbouxVariant::S).residual);
  EXPECT_LT(corrected, 1e-2 * plain);

  const auto right = family_member(sphere(), {0.3, 0.2}, {1, 0}, {0, 1}, 1, 1, t, tight_options());
  const auto s = L::darboux_predict(right, 1.0, L::DarbouxVariant::S);
  const double correction = s.predicted - L::euclid_cos(right.AB, right.BC, right.beta);
  EXPECT_NEAR(correction / std::pow(t, 4), -1.0 / 3, 0.01);
  const auto h = L::darboux_predict(right, 1.0, L::DarbouxVariant::h);
  EXPECT_NEAR(h.inputs.at("height"), height_from_vertex(right, Vertex::B), 1e-15);
}

TEST(ProofCoefficients, QuarterPi) {
  const auto c = L::proof_coefficients(pi / 4, pi / 4);
  EXPECT_NEAR(c.m, 2.0, 1e-12);
  EXPECT_NEAR(c.w_thm1, 2.0, 1e-12);
  EXPECT_NEAR(c.w_literal, 1.0, 1e-12);
  EXPECT_NEAR(c.c, 8.0 + 4.0 * std::sqrt(2.0), 1e-12);
  const auto lit = L::proof_coefficients(pi / 4, pi / 4, L::CoefficientVariant::literal);
  EXPECT_NEAR(lit.c, 4 + 1 + 2 * (std::sqrt(2.0) + std::sqrt(2.0) / 2), 1e-12);
  EXPECT_THROW(L::proof_coefficients(pi / 2, pi / 2), NumericalError);
  EXPECT_NO_THROW(L::proof_coefficients(pi / 2, pi / 2, L::CoefficientVariant::literal));
}

TEST(ProofCoefficients, LiteralIdentity) {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 1000; ++k) {
    const double a = uniform(rng, 1e-3, pi - 1e-3), g = uniform(rng, 1e-3, pi - a - 1e-3);
    const auto c = L::proof_coefficients(a, g, L::CoefficientVariant::literal);
    EXPECT_NEAR(c.w_literal, std::sin(a + g), 1e-14);
    EXPECT_GE(c.m, 0.0);
    EXPECT_LE(c.m, 2.0);
  }
}

TEST(FEstimate, Examples) {
  EXPECT_THROW(L::f_estimate(build_triangle(plane(), {0, 0}, {3, 0}, {3, 4})), NumericalError);
  const double t = 0.0125;
  const auto right = family_member(sphere(), {0.3, 0.2}, {1, 0}, {0, 1}, 1, 1, t, tight_options());
  EXPECT_NEAR(L::f_estimate(right), -4.0 / 3, 0.01);
  const auto eq = equilateral_member(sphere(), {0.3, 0.2}, {1, 0}, t, tight_options());
  EXPECT_NEAR(L::f_estimate(eq), -4.0 / 3, 0.01);
  const auto hyp = family_member(half_plane(), {0, 1}, {1, 0}, {0, 1}, 1, 1, t, tight_options());
  EXPECT_NEAR(L::f_estimate(hyp), 4.0 / 3, 0.01);  // R > 0 and ε² > 0
}

TEST(Residual, Definition) {
  const auto r = L::make_residual(L::Law::euclid_cos, "euclid_cos", 2.0, 2.5, 1.0, {});
  EXPECT_EQ(r.residual, 0.5);
  EXPECT_TRUE(r.within_numerics());
  EXPECT_FALSE(L::make_residual(L::Law::euclid_cos, "euclid_cos", 2.0, 4.0, 1.0, {}).within_numerics());
}

TEST(Names, RoundTrip) {
  for (auto law : L::kAllLaws) EXPECT_EQ(L::law_from_string(L::to_string(law)), law);
  EXPECT_FALSE(L::law_from_string("nope"));
  EXPECT_EQ(L::residual_labels(L::Law::toponogov_sine).size(), 2u);
}

TEST(Flat, EveryLawWithinBudget) {
  std::mt19937_64 rng(44);
  int right = 0;
  for (int k = 0; k < 10; ++k) {
    GeodesicTriangle t;
    if (k % 2 == 0) {
      const double d = uniform(rng, -1, 1);
      t = family_member(plane(), {uniform(rng, -1, 1), uniform(rng, -1, 1)}, {1, d}, {-d, 1}, uniform(rng, 0.5, 2),
                        uniform(rng, 0.5, 2), 1.0);
      t = build_triangle(plane(), t.A, t.B, t.C);
    } else {
      t = build_triangle(plane(), {uniform(rng, -2, 2), uniform(rng, -2, 2)}, {uniform(rng, -2, 2), uniform(rng, -2, 2)},
                         {uniform(rng, -2, 2), uniform(rng, -2, 2)});
    }
    for (auto law : L::kAllLaws) {
      if (law == L::Law::general_pythagoras && std::abs(t.beta - pi / 2) > 1e-6) continue;
      if (law == L::Law::general_pythagoras) ++right;
      for (const auto& r : L::evaluate(law, t)) {
        EXPECT_LE(std::abs(r.residual), 1e-9) << r.label;
        EXPECT_TRUE(r.within_numerics()) << r.label << " " << r.residual << " " << r.error_budget;
      }
    }
  }
  EXPECT_GT(right, 0);
}

}  // namespace
