#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helios/fastmath.hpp"
#include "helios/quadrature.hpp"

using namespace helios;

TEST(GaussLegendre, TwoPointRule) {
  Rule1D r = gauss_legendre(2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r.nodes[0], -0.5773502691896258, 1e-15);
  EXPECT_NEAR(r.nodes[1], 0.5773502691896258, 1e-15);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(r.weights[1], 1.0, 1e-15);
}

TEST(GaussLegendre, ThreePointExactForQuartic) {
  Rule1D r = gauss_legendre(3);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 4);
  EXPECT_NEAR(s, 0.4, 1e-14);
}

TEST(GaussLegendre, SixtyFourPointExponential) {
  Rule1D r = gauss_legendre(64);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::exp(r.nodes[i]);
  EXPECT_NEAR(s, std::exp(1.0) - std::exp(-1.0), 1e-13);
}

TEST(GaussLegendre, InvariantsAndExactness) {
  for (int n : {1, 2, 5, 17, 64, 200, 501}) {
    Rule1D r = gauss_legendre(n);
    double sw = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    EXPECT_NEAR(sw, 2.0, 1e-13) << n;
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
    for (double w : r.weights) EXPECT_GT(w, 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r.nodes[i], -r.nodes[r.size() - 1 - i]);
    // degree 2n-1 monomial moments
    for (int d = 0; d <= std::min(2 * n - 1, 40); ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " d=" << d;
    }
  }
}

TEST(GaussLegendre, RejectsZeroPoints) { EXPECT_THROW(gauss_legendre(0), ArgumentError); }

TEST(SphereRule, SurfaceArea) {
  SphereRule s = sphere_rule(8, 16);
  EXPECT_NEAR(integrate(s, [](Vec3) { return 1.0; }), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(s.total, 12.566370614359172, 1e-12);
}

TEST(SphereRule, SecondMoment) {
  SphereRule s = sphere_rule(8, 16);
  EXPECT_NEAR(integrate(s, [](Vec3 v) { return v.z * v.z; }), 4.0 * kPi / 3.0, 1e-12);
  EXPECT_NEAR(integrate(s, [](Vec3 v) { return v.x * v.x; }), 4.0 * kPi / 3.0, 1e-12);
}

TEST(SphereRule, NodesAreUnitVectors) {
  SphereRule s = sphere_rule(11, 24);
  for (const Vec3& v : s.nodes) EXPECT_NEAR(norm(v), 1.0, 1e-15);
  for (double w : s.weights) EXPECT_GT(w, 0.0);
  EXPECT_EQ(s.product_degree(), 10);
}

TEST(SphereRule, RejectsTooFewNodes) {
  EXPECT_THROW(sphere_rule(1, 16), ArgumentError);
  EXPECT_THROW(sphere_rule(4, 3), ArgumentError);
}

TEST(Geometry, TriangulationCoversArea) {
  Polygon L = {{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 3}, {0, 3}};
  Polygon ccw = normalized_polygon(L);
  double a = 0.0;
  for (const Triangle& t : triangulate(ccw)) {
    double ta = 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    EXPECT_GT(ta, 0.0);
    a += ta;
  }
  EXPECT_NEAR(a, 5.0, 1e-14);
}

TEST(Geometry, TriangulationIsDeterministic) {
  Polygon P = {{0, 0}, {4, 0}, {4, 4}, {2, 1.5}, {0, 4}};
  auto a = triangulate(normalized_polygon(P));
  auto b = triangulate(normalized_polygon(P));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int v = 0; v < 3; ++v) {
      EXPECT_EQ(a[i][v].x, b[i][v].x);
      EXPECT_EQ(a[i][v].y, b[i][v].y);
    }
}

TEST(Geometry, ClockwiseInputIsReoriented) {
  Polygon cw = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  EXPECT_GT(signed_area(normalized_polygon(cw)), 0.0);
}

TEST(Geometry, DegeneratePolygonsAreRejected) {
  EXPECT_THROW(normalized_polygon({{0, 0}, {1, 0}, {2, 0}}), DegeneratePolygon);
  EXPECT_THROW(normalized_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), DegeneratePolygon);
  EXPECT_THROW(normalized_polygon({{0, 0}, {1, 0}}), DegeneratePolygon);
}

TEST(Geometry, ConvexErodedArea) {
  Polygon sq = normalized_polygon({{-2, -2}, {2, -2}, {2, 2}, {-2, 2}});
  EXPECT_NEAR(convex_eroded_area(sq, 0.5), 9.0, 1e-13);
  EXPECT_NEAR(convex_eroded_area(sq, 2.5), 0.0, 1e-13);
}

TEST(ApertureRule, UnitSquareArea) {
  Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (double ppw : {6.0, 10.0, 23.0}) {
    ApertureRule r = aperture_rule(sq, ppw, 1.0);
    EXPECT_NEAR(integrate(r, [](Vec2) { return 1.0; }), 1.0, 1e-12);
  }
}

TEST(ApertureRule, SecondMomentOfSquare) {
  Polygon sq = {{-2, -2}, {2, -2}, {2, 2}, {-2, 2}};
  ApertureRule r = aperture_rule(sq, 10.0, 3.0);
  EXPECT_NEAR(integrate(r, [](Vec2 q) { return q.x * q.x; }), 64.0 / 3.0, 1e-10);
}

TEST(ApertureRule, NodesInsideAndWeightsPositive) {
  Polygon P = {{0, 0}, {4, 0}, {4, 4}, {2, 1.5}, {0, 4}};
  ApertureRule r = aperture_rule(P, 8.0, 5.0);
  const Polygon ccw = normalized_polygon(P);
  double area = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n) {
    EXPECT_GT(r.weights[n], 0.0);
    EXPECT_TRUE(contains(ccw, r.nodes[n]));
    EXPECT_GT(boundary_distance(ccw, r.nodes[n]), 0.0);
    area += r.weights[n];
  }
  EXPECT_NEAR(area, signed_area(ccw), 1e-10);
  EXPECT_GE(r.k_resolved, 5.0);
}

TEST(ApertureRule, OscillatorySelfConvergence) {
  Polygon sq = {{-2, -2}, {2, -2}, {2, 2}, {-2, 2}};
  auto f = [](Vec2 q) {
    const double r = norm(q);
    return r * 40.0 < 1e-6 ? 40.0 : std::sin(40.0 * r) / r;
  };
  const double a = integrate(aperture_rule(sq, 10.0, 40.0), f);
  const double b = integrate(aperture_rule(sq, 20.0, 40.0), f);
  EXPECT_NEAR(a, b, 1e-6);
}

TEST(ApertureRule, RejectsBadInput) {
  Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_THROW(aperture_rule(sq, 5.0, 1.0), ArgumentError);
  EXPECT_THROW(aperture_rule({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, 10.0, 1.0), DegeneratePolygon);
  EXPECT_THROW(aperture_rule({{0, 0}, {1, 0}, {2, 0}}, 10.0, 1.0), DegeneratePolygon);
}

TEST(PairwiseSum, IndependentOfPartitioning) {
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.001 * i) * 1e-3 + 1.0 / (i + 1.0);
  double whole = pairwise_sum(v);
  double naive = 0.0;
  for (double x : v) naive += x;
  EXPECT_NEAR(whole, naive, 1e-12);
}

TEST(FastSincos, MatchesLibmOverSupportedRange) {
  double worst = 0.0;
  for (int i = -200000; i <= 200000; ++i) {
    const double x = helios::kFastSincosLimit * i / 200000.0 + 1e-3 * std::sin(1.0 * i);
    double s = 0.0, c = 0.0;
    helios::fast_sincos(x, s, c);
    worst = std::max({worst, std::abs(s - std::sin(x)), std::abs(c - std::cos(x))});
  }
  EXPECT_LE(worst, 1e-15);
}
