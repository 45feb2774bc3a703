#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "helios/quadrature.hpp"
#include "helios/specfun.hpp"

using namespace helios;

TEST(SphBessel, J0AtOneMatchesClosedForm) {
  BesselSequence s = sph_bessel(BesselKind::j, 0, 1.0);
  ASSERT_EQ(s.values.size(), 1u);
  ASSERT_EQ(s.derivatives.size(), 1u);
  EXPECT_NEAR(s.values[0].real(), 0.8414709848078965, 1e-15);
  EXPECT_NEAR(s.values[0].imag(), 0.0, 1e-16);
}

TEST(SphBessel, H10AtOneMatchesClosedForm) {
  BesselSequence s = sph_bessel(BesselKind::h1, 0, 1.0);
  EXPECT_NEAR(s.values[0].real(), 0.8414709848078965, 1e-15);
  EXPECT_NEAR(s.values[0].imag(), -0.5403023058681398, 1e-15);
}

TEST(SphBessel, WronskianAtOrderFive) {
  BesselSequence j = sph_bessel(BesselKind::j, 5, 2.7);
  BesselSequence y = sph_bessel(BesselKind::y, 5, 2.7);
  cplx w = j.values[5] * y.derivatives[5] - j.derivatives[5] * y.values[5];
  EXPECT_NEAR(w.real(), 1.0 / (2.7 * 2.7), 1e-12);
  EXPECT_NEAR(w.real(), 0.13717421124828533, 1e-12);
}

TEST(SphBessel, KnownValuesOfHigherOrders) {
  // j_2(1) = 3 sin 1 - 3 cos 1 - sin 1 ... closed form (3/x^3 - 1/x) sin x - 3 cos x / x^2
  const double x = 1.3;
  BesselSequence j = sph_bessel(BesselKind::j, 2, x);
  BesselSequence y = sph_bessel(BesselKind::y, 2, x);
  const double j2 = (3.0 / (x * x * x) - 1.0 / x) * std::sin(x) - 3.0 * std::cos(x) / (x * x);
  const double y2 = -(3.0 / (x * x * x) - 1.0 / x) * std::cos(x) - 3.0 * std::sin(x) / (x * x);
  EXPECT_NEAR(j.values[2].real(), j2, 1e-14);
  EXPECT_NEAR(y.values[2].real(), y2, 1e-13);
}

TEST(SphBessel, LargeOrderSmallArgumentIsStable) {
  // j_l(x) ~ x^l / (2l+1)!!, downward recurrence keeps full relative accuracy
  BesselSequence j = sph_bessel(BesselKind::j, 10, 0.5);
  double dfact = 1.0;
  for (int k = 1; k <= 21; k += 2) dfact *= k;
  const double approx = std::pow(0.5, 10) / dfact * (1.0 - 0.25 / (2.0 * 23.0));
  EXPECT_NEAR(j.values[10].real() / approx, 1.0, 1e-4);
}

TEST(SphBessel, ZeroArgumentThrows) {
  EXPECT_THROW(sph_bessel(BesselKind::j, 3, 0.0), ZeroArgument);
}

TEST(SphBessel, NegativeLmaxThrows) { EXPECT_THROW(sph_bessel(BesselKind::j, -1, 1.0), ArgumentError); }

TEST(SphBessel, WronskianOverValidatedRange) {
  for (double x : {0.1, 0.7, 3.0, 17.3, 55.0, 120.0, 300.0, 500.0}) {
    const int lmax = static_cast<int>(std::floor(x + 4.0 * std::cbrt(x) + 20.0));
    SphericalBesselTable t = spherical_bessel_table(lmax, x);
    EXPECT_LE(t.wronskian_residual, 1e-8) << "x=" << x;
  }
}

TEST(SphBessel, H1EqualsJPlusIY) {
  for (double x : {0.3, 5.0, 42.0}) {
    const int lmax = truncation_lmax(x);
    BesselSequence j = sph_bessel(BesselKind::j, lmax, x);
    BesselSequence y = sph_bessel(BesselKind::y, lmax, x);
    BesselSequence h = sph_bessel(BesselKind::h1, lmax, x);
    for (int l = 0; l <= lmax; ++l) {
      cplx ref = j.values[l] + kI * y.values[l];
      EXPECT_LE(std::abs(h.values[l] - ref), 1e-10 * std::abs(ref)) << "x=" << x << " l=" << l;
    }
  }
}

TEST(SphBessel, H10ModulusAtComplexArgument) {
  for (cplx z : {cplx(2.0, 0.5), cplx(20.0, 1.0), cplx(14.1, 14.1)}) {
    BesselSequence h = sph_bessel(BesselKind::h1, 4, z);
    EXPECT_NEAR(std::abs(h.values[0]), std::abs(std::exp(kI * z)) / std::abs(z), 1e-14 * std::abs(h.values[0]));
  }
}

TEST(SphBessel, DerivativeRecurrenceConsistency) {
  for (cplx z : {cplx(3.7, 0.0), cplx(25.0, 0.0), cplx(10.0, 3.0)}) {
    const int lmax = truncation_lmax(std::abs(z));
    for (BesselKind kind : {BesselKind::j, BesselKind::y, BesselKind::h1}) {
      BesselSequence s = sph_bessel(kind, lmax, z);
      for (int l = 1; l <= lmax; ++l) {
        cplx rhs = s.values[l - 1] - (l + 1.0) / z * s.values[l];
        EXPECT_LE(std::abs(s.derivatives[l] - rhs), 1e-9 * std::max(std::abs(rhs), 1e-300))
            << to_string(kind) << " l=" << l;
      }
    }
  }
}

TEST(SphBessel, DerivativeMatchesFiniteDifference) {
  const double x = 7.3, h = 1e-5;
  BesselSequence a = sph_bessel(BesselKind::j, 6, x + h);
  BesselSequence b = sph_bessel(BesselKind::j, 6, x - h);
  BesselSequence c = sph_bessel(BesselKind::j, 6, x);
  for (int l = 0; l <= 6; ++l) {
    cplx fd = (a.values[l] - b.values[l]) / (2.0 * h);
    EXPECT_NEAR(std::abs(fd - c.derivatives[l]), 0.0, 1e-9);
  }
}

TEST(SphBessel, ComplexWronskian) {
  cplx z = std::polar(40.0, kPi / 4.0);
  SphericalBesselTable t = spherical_bessel_table(truncation_lmax(40.0) + 20, z);
  EXPECT_LE(t.wronskian_residual, 1e-8);
}

TEST(SphBessel, DeepEvanescentOrderSignalsStabilityLoss) {
  // h1 upward recurrence at orders far beyond the argument overflows or loses
  // the Wronskian; the runtime check must report it rather than return
  // garbage.
  EXPECT_THROW(spherical_bessel_table(400, cplx(0.01, 0.0)), StabilityLoss);
}

TEST(Legendre, ValuesAtOne) {
  auto p = legendre_p(3, 1.0);
  ASSERT_EQ(p.size(), 4u);
  for (double v : p) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Legendre, FirstOrderIsIdentity) {
  auto p = legendre_p(1, 0.37);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 0.37);
}

TEST(Legendre, SecondOrderClosedForm) { EXPECT_NEAR(legendre_p(2, 0.5)[2], -0.125, 1e-16); }

TEST(Legendre, OutOfDomainThrows) { EXPECT_THROW(legendre_p(2, 1.0001), DomainError); }

TEST(SphHarmonic, ConstantMode) {
  EXPECT_NEAR(std::abs(sph_harmonic(0, 0, 0.4, 1.9)), 0.28209479177387814, 1e-15);
  EXPECT_NEAR(sph_harmonic(0, 0, 2.0, -0.3).real(), 0.28209479177387814, 1e-15);
}

TEST(SphHarmonic, DipoleAtPole) {
  EXPECT_NEAR(sph_harmonic(1, 0, 0.0, 0.0).real(), 0.4886025119029199, 1e-15);
  EXPECT_NEAR(sph_harmonic(1, 0, 0.8, 0.0).real(), std::sqrt(3.0 / (4.0 * kPi)) * std::cos(0.8), 1e-15);
}

TEST(SphHarmonic, AdditionTheorem) {
  double sum = 0.0;
  for (int m = -3; m <= 3; ++m) sum += std::norm(sph_harmonic(3, m, 1.1, 2.3));
  EXPECT_NEAR(sum, 7.0 / (4.0 * kPi), 1e-14);
}

TEST(SphHarmonic, NegativeOrderConjugateSymmetry) {
  cplx a = sph_harmonic(4, -3, 0.7, 0.9);
  cplx b = sph_harmonic(4, 3, 0.7, 0.9);
  EXPECT_NEAR(std::abs(a + std::conj(b)), 0.0, 1e-15);
}

TEST(SphHarmonic, KnownClosedFormForOrderOne) {
  // Y_11 = -sqrt(3/8pi) sin(theta) e^{i phi}
  cplx y = sph_harmonic(1, 1, 0.6, 0.4);
  cplx ref = -std::sqrt(3.0 / (8.0 * kPi)) * std::sin(0.6) * std::exp(kI * 0.4);
  EXPECT_NEAR(std::abs(y - ref), 0.0, 1e-15);
}

TEST(SphHarmonic, InvalidIndicesThrow) {
  EXPECT_THROW(sph_harmonic(2, 3, 0.1, 0.1), IndexError);
  EXPECT_THROW(sph_harmonic(2, 0, -0.1, 0.1), DomainError);
}

TEST(SphHarmonic, GramMatrixIsIdentityUnderSphereRule) {
  const int L = 12;
  SphereRule rule = sphere_rule(16, 32);
  std::vector<std::vector<cplx>> Y(mode_count(L), std::vector<cplx>(rule.size()));
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const Vec3 v = rule.nodes[n];
    const double th = std::acos(std::clamp(v.z, -1.0, 1.0));
    const double ph = std::atan2(v.y, v.x);
    for (int l = 0; l <= L; ++l)
      for (int m = -l; m <= l; ++m) Y[mode_index(l, m)][n] = sph_harmonic(l, m, th, ph);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < Y.size(); ++a) {
    for (std::size_t b = 0; b < Y.size(); ++b) {
      cplx g{0.0};
      for (std::size_t n = 0; n < rule.size(); ++n) g += rule.weights[n] * Y[a][n] * std::conj(Y[b][n]);
      worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Truncation, RuleValues) {
  EXPECT_EQ(truncation_lmax(0.0), 12);
  EXPECT_EQ(truncation_lmax(8.0), 28);  // 8 + 4*2 + 12
  EXPECT_EQ(truncation_lmax(100.0), static_cast<int>(std::ceil(100.0 + 4.0 * std::cbrt(100.0) + 12.0)));
}
