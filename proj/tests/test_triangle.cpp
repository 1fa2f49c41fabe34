#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "support.hpp"

using namespace geotrig;
using namespace geotrig::testing;

namespace {

TEST(Build, Plane345) {
  const auto t = build_triangle(plane(), {0, 0}, {3, 0}, {3, 4});
  EXPECT_NEAR(t.AB, 3.0, 1e-10);
  EXPECT_NEAR(t.BC, 4.0, 1e-10);
  EXPECT_NEAR(t.AC, 5.0, 1e-10);
  EXPECT_NEAR(t.beta, pi / 2, 1e-10);
  EXPECT_NEAR(t.excess, 0.0, 1e-10);
  EXPECT_NEAR(t.area, 6.0, 1e-9);
  EXPECT_EQ(t.curvature_integral, 0.0);
}

TEST(Build, ExcessIsAngleSumExactly) {
  const auto t = build_triangle(sphere(), {0, 0}, {0.3, 0.1}, {0.1, 0.4});
  EXPECT_EQ(t.excess, t.alpha + t.beta + t.gamma - pi);
}

TEST(Build, OctantAtPoleIsOutsideChart) {
  EXPECT_THROW(build_triangle(sphere(), {0, 0}, {pi / 2, 0}, {0, pi / 2}, wide_guard()), InputError);
}

TEST(Build, OctantInRotatedChart) {
  const auto v = octant_vertices();
  const auto t = build_triangle(sphere(), v[0], v[1], v[2], wide_guard());
  for (double side : {t.AB, t.BC, t.AC}) EXPECT_NEAR(side, pi / 2, 1e-9);
  for (double angle : {t.alpha, t.beta, t.gamma}) EXPECT_NEAR(angle, pi / 2, 1e-9);
  EXPECT_NEAR(t.excess, pi / 2, 1e-8);
  EXPECT_NEAR(t.area, pi / 2, 1e-8);
  EXPECT_NEAR(t.curvature_integral, pi / 2, 1e-8);
}

TEST(Build, HalfPlaneAnglesMatchHyperbolicCosineLaw) {
  const auto t = build_triangle(half_plane(), {0, 1}, {1, 1}, {0.5, 1.5});
  EXPECT_LT(t.excess, 0.0);
  EXPECT_NEAR(t.alpha, constant_k_angle(-1, t.BC, t.AB, t.AC), 1e-8);
  EXPECT_NEAR(t.beta, constant_k_angle(-1, t.AC, t.AB, t.BC), 1e-8);
  EXPECT_NEAR(t.gamma, constant_k_angle(-1, t.AB, t.AC, t.BC), 1e-8);
  EXPECT_NEAR(t.excess, -t.area, 1e-8);
  EXPECT_NEAR(t.AB, half_plane_distance({0, 1}, {1, 1}), 1e-9);
}

TEST(Build, Rejections) {
  EXPECT_THROW(build_triangle(plane(), {0, 0}, {0, 0}, {1, 1}), InputError);
  EXPECT_THROW(build_triangle(plane(), {0, 0}, {1, 1}, {2, 2}), NumericalError);
}

TEST(Region, ConstantCurvatureRatio) {
  const auto m = sphere(4.0);
  const auto t = equilateral_member(m, {0.1, 0.2}, {1, 0.3}, 0.05);
  EXPECT_NEAR(t.curvature_integral / t.area, 4.0, 1e-6);
  EXPECT_NEAR(t.AB, 0.05, 1e-9);
  EXPECT_NEAR(t.AC, 0.05, 1e-9);
}

TEST(Region, RejectsOpenBoundary) {
  const auto m = plane();
  const std::vector<GeodesicPath> loop{shoot(m, {0, 0}, {1, 0}, 1), shoot(m, {1, 0}, {0, 1}, 1),
                                       shoot(m, {1, 1}, {-1, 0}, 1)};
  EXPECT_THROW(integrate_region(m, loop), InputError);
}

TEST(Region, RejectsSelfIntersection) {
  const auto m = plane();
  // bow-tie: (0,0)->(1,1)->(1,0)->(0,1)->(0,0)
  const std::vector<GeodesicPath> loop{connect(m, {0, 0}, {1, 1}).path, connect(m, {1, 1}, {1, 0}).path,
                                       connect(m, {1, 0}, {0, 1}).path, connect(m, {0, 1}, {0, 0}).path};
  EXPECT_THROW(integrate_region(m, loop), NumericalError);
}

TEST(ExcessCheck, Examples) {
  const auto flat = excess_check(build_triangle(plane(), {0.2, 0.1}, {2, 0.5}, {0.7, 3}));
  EXPECT_LE(std::abs(flat.residual), 1e-10);

  const auto v = octant_vertices();
  const auto oct = excess_check(build_triangle(sphere(), v[0], v[1], v[2], wide_guard()));
  EXPECT_NEAR(oct.excess, pi / 2, 1e-8);
  EXPECT_NEAR(oct.curvature_integral, pi / 2, 1e-8);
  EXPECT_LE(std::abs(oct.residual), 1e-7);

  // torus near the outer equator, at two integrator tolerances
  const auto m = torus();
  const Point A{0.1, -0.2}, B{0.5, 0.1}, C{0.2, 0.4};
  const auto r1 = excess_check(build_triangle(m, A, B, C));
  const auto r2 = excess_check(build_triangle(m, A, B, C, tight_options()));
  EXPECT_LE(std::abs(r1.residual), 1e-6);
  EXPECT_LE(std::abs(r2.residual), 1e-6);
  EXPECT_NEAR(r1.excess, r2.excess, 1e-7);
}

TEST(Height, Examples) {
  EXPECT_NEAR(height_from_vertex(build_triangle(plane(), {0, 0}, {3, 0}, {3, 4}), Vertex::B), 2.4, 1e-8);
  EXPECT_NEAR(height_from_vertex(build_triangle(plane(), {0, 0}, {2, 0}, {1, std::sqrt(3.0)}), Vertex::C),
              std::sqrt(3.0), 1e-8);

  // right spherical triangle: sin h = sin a sin b / sin c, and h / (t/sqrt 2) = 1 + t²/6 + O(t⁴)
  for (double t : {0.1, 0.03}) {
    const auto tri = family_member(sphere(), {0.3, 0.2}, {1, 0}, {0, 1}, 1, 1, t);
    const double h = height_from_vertex(tri, Vertex::B);
    EXPECT_NEAR(std::sin(h), std::sin(tri.AB) * std::sin(tri.BC) / std::sin(tri.AC), 1e-9);
    EXPECT_NEAR(h / (t / std::sqrt(2.0)), 1.0 + t * t / 6, 2e-5);
  }
}

TEST(Family, PlaneSimilarity) {
  const std::vector<double> scales{1.0, 0.5};
  const auto fam = scale_family(plane(), {0, 0}, {1, 0}, {0, 1}, 1, 1, scales);
  ASSERT_EQ(fam.size(), 2u);
  for (const auto& t : fam) EXPECT_NEAR(t.beta, pi / 2, 1e-12);
  EXPECT_NEAR(fam[1].AB, 0.5 * fam[0].AB, 1e-9);
  EXPECT_NEAR(fam[1].BC, 0.5 * fam[0].BC, 1e-9);
  EXPECT_NEAR(fam[1].AC, 0.5 * fam[0].AC, 1e-9);
  EXPECT_NEAR(fam[1].area, 0.25 * fam[0].area, 1e-9);
  EXPECT_NEAR(fam[1].alpha, fam[0].alpha, 1e-9);
  EXPECT_NEAR(fam[1].gamma, fam[0].gamma, 1e-9);
}

TEST(Family, PlaneSimilarityAnyShape) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 5; ++k) {
    const ChartVector d1{uniform(rng, 0.5, 1), uniform(rng, -0.3, 0.3)};
    const ChartVector d2{uniform(rng, -0.5, 0.5), uniform(rng, 0.5, 1)};
    const double L1 = uniform(rng, 0.5, 2), L2 = uniform(rng, 0.5, 2);
    const auto a = family_member(plane(), {1, 2}, d1, d2, L1, L2, 1.0);
    const auto b = family_member(plane(), {1, 2}, d1, d2, L1, L2, 0.3);
    EXPECT_NEAR(b.AB, 0.3 * a.AB, 1e-9);
    EXPECT_NEAR(b.BC, 0.3 * a.BC, 1e-9);
    EXPECT_NEAR(b.AC, 0.3 * a.AC, 1e-9);
    EXPECT_NEAR(b.alpha, a.alpha, 1e-9);
    EXPECT_NEAR(b.beta, a.beta, 1e-9);
    EXPECT_NEAR(b.gamma, a.gamma, 1e-9);
  }
}

TEST(Family, SphereExcessLimit) {
  const auto t = family_member(sphere(), {0.3, 0.2}, {1, 0}, {0, 1}, 1.0, 2.0, 0.02, tight_options());
  EXPECT_NEAR(t.excess / (0.02 * 0.02), 0.5 * 1.0 * 2.0, 1e-3);
}

TEST(Family, HalfPlaneExcessNegative) {
  for (double t : {0.4, 0.1, 0.025})
    EXPECT_LT(family_member(half_plane(), {0, 1}, {1, 0.2}, {-0.3, 1}, 1, 1, t).excess, 0.0);
}

TEST(Family, Errors) {
  EXPECT_THROW(family_member(plane(), {0, 0}, {1, 0}, {2, 0}, 1, 1, 0.5), InputError);
  EXPECT_THROW(family_member(sphere(), {0, 0}, {1, 0}, {0, 1}, 1, 1, 3.0), InputError);
  EXPECT_THROW(family_member(plane(), {0, 0}, {1, 0}, {0, 1}, 1, 1, -1.0), InputError);
}

TEST(Family, ApexAngleFixed) {
  const auto m = sphere();
  for (double t : {0.3, 0.1, 0.01}) {
    const auto tri = family_member(m, {0.2, 0.5}, {1, 0.4}, {-0.2, 1}, 1, 1, t);
    EXPECT_NEAR(tri.beta, tangent_angle(m, {0.2, 0.5}, {1, 0.4}, {-0.2, 1}), 1e-8);
  }
}

TEST(Equilateral, SidesEqual) {
  const auto t = equilateral_member(half_plane(), {0, 1}, {1, 0}, 0.3);
  EXPECT_NEAR(t.AB, 0.3, 1e-9);
  EXPECT_NEAR(t.BC, 0.3, 1e-9);
  EXPECT_NEAR(t.AC, 0.3, 1e-9);
  EXPECT_NEAR(t.alpha, t.gamma, 1e-8);
  EXPECT_NEAR(t.alpha, constant_k_angle(-1, 0.3, 0.3, 0.3), 1e-8);
}

struct Case {
  SurfaceModel m;
  Point centre;
  double spread;
};

std::vector<Case> surface_cases() {
  return {{plane(), {0, 0}, 1.0},        {sphere(0.5), {0.2, 0.3}, 0.5}, {sphere(), {0.2, 0.3}, 0.4},
          {sphere(4), {0.2, 0.3}, 0.2}, {half_plane(), {0, 1}, 0.4},    {half_plane(-2), {0, 1}, 0.3},
          {torus(), {0.2, 0.3}, 0.4},   {paraboloid(), {0, 0}, 0.5},    {ellipsoid(), {0.3, 0.2}, 0.4}};
}

Point random_point(std::mt19937_64& rng, const Case& c) {
  return {c.centre.u + uniform(rng, -c.spread, c.spread), c.centre.v + uniform(rng, -c.spread, c.spread)};
}

TEST(Invariants, GaussBonnetAndTriangleInequality) {
  std::mt19937_64 rng(32);
  for (const auto& c : surface_cases()) {
    int built = 0;
    while (built < 3) {
      const Point A = random_point(rng, c), B = random_point(rng, c), C = random_point(rng, c);
      GeodesicTriangle t;
      try {
        t = build_triangle(c.m, A, B, C);
      } catch (const NumericalError&) {
        continue;  // nearly collinear draw
      }
      ++built;
      EXPECT_LE(std::abs(t.excess - t.curvature_integral), 1e-6) << to_string(c.m.kind());
      for (double a : {t.alpha, t.beta, t.gamma}) {
        EXPECT_GT(a, 0.0);
        EXPECT_LT(a, pi);
      }
      if (c.m.is_constant_curvature()) {
        EXPECT_LT(t.AC, t.AB + t.BC);
        EXPECT_LT(t.AB, t.AC + t.BC);
        EXPECT_LT(t.BC, t.AB + t.AC);
      }
    }
  }
}

TEST(Invariants, PermutationInvariance) {
  std::mt19937_64 rng(33);
  for (const auto& c : surface_cases()) {
    const Point A = c.centre, B{c.centre.u + 0.6 * c.spread, c.centre.v + 0.1 * c.spread},
                C{c.centre.u + 0.2 * c.spread, c.centre.v + 0.7 * c.spread};
    const auto t = build_triangle(c.m, A, B, C);
    const auto r = build_triangle(c.m, B, C, A);  // A'=B, B'=C, C'=A
    EXPECT_EQ(r.AB, t.BC);
    EXPECT_EQ(r.BC, t.AC);
    EXPECT_EQ(r.AC, t.AB);
    EXPECT_EQ(r.alpha, t.beta);
    EXPECT_EQ(r.beta, t.gamma);
    EXPECT_EQ(r.gamma, t.alpha);
    EXPECT_NEAR(r.excess, t.excess, 1e-12);
    EXPECT_NEAR(r.area, t.area, 1e-12 * std::max(1.0, t.area));
    const auto s = build_triangle(c.m, C, B, A);  // mirror labelling
    EXPECT_EQ(s.AB, t.BC);
    EXPECT_EQ(s.alpha, t.gamma);
    EXPECT_NEAR(s.excess, t.excess, 1e-12);
    EXPECT_NEAR(s.area, t.area, 1e-12 * std::max(1.0, t.area));
  }
}

}  // namespace
