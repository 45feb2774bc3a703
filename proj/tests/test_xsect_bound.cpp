#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "helios/xsect_bound.hpp"

using namespace helios;

namespace {

const SphereObstacle kUnit(1.0);

double max_diff(const PartialWaveCoefficients& a, const PartialWaveCoefficients& b) {
  double w = 0.0;
  for (std::size_t n = 0; n < a.coeffs.size(); ++n) w = std::max(w, std::abs(a.coeffs[n] - b.coeffs[n]));
  return w;
}

}  // namespace

TEST(Projection, SingleHarmonicIsRecovered) {
  const int lmax = 8;
  auto field = [](Vec3 r) {
    const double th = std::acos(std::clamp(r.z / norm(r), -1.0, 1.0));
    return sph_harmonic(2, 1, th, std::atan2(r.y, r.x));
  };
  const PartialWaveCoefficients c = project_on_sphere(field, kUnit, 1.0, lmax);
  EXPECT_EQ(c.meaning, CoefficientMeaning::boundary_data);
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) {
      const cplx expect = (l == 2 && m == 1) ? cplx(1.0) : cplx(0.0);
      EXPECT_LE(std::abs(c.at(l, m) - expect), 1e-12) << l << "," << m;
    }
}

TEST(Projection, PlaneWaveMatchesAnalyticExpansion) {
  const double k = 10.0;
  const int lmax = boundary_lmax(k);
  const PartialWaveCoefficients c =
      project_on_sphere([k](Vec3 r) { return std::exp(kI * (k * r.z)); }, kUnit, k, lmax);
  EXPECT_LE(max_diff(c, plane_wave_trace(kUnit, k, lmax)), 1e-9);
}

TEST(Projection, ShortExpansionRaisesTailNotResolved) {
  const double k = 30.0;
  EXPECT_THROW(project_on_sphere([k](Vec3 r) { return std::exp(kI * (k * r.z)); }, kUnit, k, 20), TailNotResolved);
}

TEST(Projection, SymmetricSamplingMatchesDirectEvaluation) {
  const double k = 8.0;
  const PlanarAperture ap = default_sphere_aperture(kUnit);
  IncidentField field(ap, k);
  const int lmax = boundary_lmax(k);
  const SphereRule rule = projection_rule(lmax);
  for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    field.set_d4_symmetric(true);
    const std::vector<cplx> folded = sample_phi_trace(field, kUnit, k, bc, rule);
    field.set_d4_symmetric(false);
    const std::vector<cplx> plain = sample_phi_trace(field, kUnit, k, bc, rule);
    double worst = 0.0, direct = 0.0;
    for (std::size_t n = 0; n < rule.size(); ++n) worst = std::max(worst, std::abs(folded[n] - plain[n]));
    for (std::size_t n = 0; n < rule.size(); n += 97) {
      const Vec3 th = rule.nodes[n];
      cplx ref;
      if (bc == BoundaryCondition::Dirichlet) {
        ref = field.phi(th, k);
      } else {
        const auto g = phi_gradient_from(field.near_field(th, k, true), k);
        ref = th.x * g[0] + th.y * g[1] + th.z * g[2];
      }
      direct = std::max(direct, std::abs(plain[n] - ref));
    }
    EXPECT_LE(worst, 1e-9) << to_string(bc);
    EXPECT_LE(direct, 1e-12 * k) << to_string(bc);
  }
}

TEST(Projection, PhiTraceAtKa40MatchesPlaneWave) {
  const double k = 40.0;
  const IncidentField field(default_sphere_aperture(kUnit), k);
  const int lmax = boundary_lmax(k);
  const PartialWaveCoefficients phi = project_phi_trace(field, kUnit, k, BoundaryCondition::Dirichlet, lmax);
  const double d = max_diff(phi, plane_wave_trace(kUnit, k, lmax));
  RecordProperty("max_coefficient_deviation", std::to_string(d));
  EXPECT_LE(d, 1e-6);
}

TEST(Experiment, RejectsApertureThatMissesTheShadow) {
  EXPECT_THROW(u0_experiment(kUnit, BoundaryCondition::Dirichlet, PlanarAperture::square(3.0, 0.5), 10.0),
               ArgumentError);
}

TEST(Experiment, DirichletDecompositionAtKa30) {
  const PlanarAperture ap = default_sphere_aperture(kUnit);
  auto [d, r] = decomposition_experiment(kUnit, BoundaryCondition::Dirichlet, ap, 30.0);
  EXPECT_LE(d.balance_residual, 1e-3);
  EXPECT_LE(d.sigma_u0, 4.0 * d.eta_mass + 0.1);
  EXPECT_LE(d.sigma_u0, std::pow(d.norm_phi_out + d.norm_phi_in, 2) + 1e-8);
  EXPECT_NEAR(d.bound_slack, 4.0 * ap.eta_mass() - d.sigma_u0, 1e-12);
  EXPECT_EQ(d.balance_sign, 1);
  EXPECT_GT(d.balance_residual_other, 1e-2);
  EXPECT_LE(r.identity_residual, 1e-8);
  EXPECT_LE(r.consistency_residual, 1e-6);
  EXPECT_GE(r.v_boundary_norm, 0.0);
  EXPECT_GE(r.sigma_v, 0.0);
}

TEST(Experiment, NeumannDecomposition) {
  const PlanarAperture ap = default_sphere_aperture(kUnit);
  auto [d, r] = decomposition_experiment(kUnit, BoundaryCondition::Neumann, ap, 15.0);
  EXPECT_LE(d.balance_residual, 1e-3);
  EXPECT_LE(d.sigma_u0, std::pow(d.norm_phi_out + d.norm_phi_in, 2) + 1e-8);
  EXPECT_LE(r.identity_residual, 1e-8);
  EXPECT_LE(r.consistency_residual, 1e-6);
}

TEST(Experiment, BalanceSignIsStableAcrossSweep) {
  const PlanarAperture ap = default_sphere_aperture(kUnit);
  for (double k : {10.0, 16.0, 22.0}) {
    const DecompositionReport d = u0_experiment(kUnit, BoundaryCondition::Dirichlet, ap, k);
    EXPECT_EQ(d.balance_sign, 1) << k;
  }
}

TEST(Experiment, BalanceDoesNotDegradeUnderRefinement) {
  const PlanarAperture ap = default_sphere_aperture(kUnit);
  ExperimentSettings coarse, fine;
  fine.ppw = 14.0;
  const double a = u0_experiment(kUnit, BoundaryCondition::Dirichlet, ap, 12.0, coarse).balance_residual;
  const double b = u0_experiment(kUnit, BoundaryCondition::Dirichlet, ap, 12.0, fine).balance_residual;
  EXPECT_LE(b, std::max(a, 1e-10));
}

TEST(Experiment, MismatchDecaysFasterThanCubic) {
  const PlanarAperture ap = default_sphere_aperture(kUnit);
  const ResidualReport r20 = v_experiment(kUnit, BoundaryCondition::Dirichlet, ap, 20.0);
  const ResidualReport r80 = v_experiment(kUnit, BoundaryCondition::Dirichlet, ap, 80.0);
  EXPECT_LE(r80.v_boundary_norm, r20.v_boundary_norm / 64.0);
  EXPECT_LE(r20.identity_residual, 1e-8);
  EXPECT_LE(r80.identity_residual, 1e-8);
}

TEST(WindowAverage, ConstantAndLinearAreReproduced) {
  std::vector<double> k, c, lin;
  for (int i = 0; i <= 400; ++i) {
    k.push_back(10.0 + 0.05 * i);
    c.push_back(3.5);
    lin.push_back(10.0 + 0.05 * i);
  }
  const auto ac = window_average(k, c, 1.0);
  const auto al = window_average(k, lin, 1.0);
  int present = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const bool inside = k[i] - 1.0 >= k.front() - 1e-9 && k[i] + 1.0 <= k.back() + 1e-9;
    EXPECT_EQ(ac[i].has_value(), inside) << k[i];
    if (!ac[i]) continue;
    ++present;
    EXPECT_NEAR(*ac[i], 3.5, 1e-13);
    EXPECT_NEAR(*al[i], k[i], 1e-11);
  }
  EXPECT_GT(present, 300);
}

TEST(WindowAverage, VariableWidthAndGuards) {
  std::vector<double> k, v;
  for (int i = 0; i <= 200; ++i) {
    k.push_back(1.0 + 0.01 * i);
    v.push_back(std::sin(3.0 * k.back()) + 1.0);
  }
  const auto a = window_average(k, v, [](double kk) { return 0.1 + 0.05 * (kk - 1.0); });
  const double vmax = *std::max_element(v.begin(), v.end());
  for (const auto& x : a)
    if (x) {
      EXPECT_GE(*x, 0.0);
      EXPECT_LE(*x, vmax);
    }
  EXPECT_THROW(window_average(k, v, 0.05), WindowUnderresolved);
  EXPECT_THROW(window_average(k, v, -1.0), ArgumentError);
  EXPECT_THROW(window_average({1.0, 0.5}, {1.0, 1.0}, 1.0), ArgumentError);
}

TEST(WindowAverage, AveragedCrossSectionObeysBound) {
  std::vector<double> k, s;
  for (int i = 0; i <= 700 * 2; ++i) {
    k.push_back(30.0 + 0.05 * i);
    s.push_back(total_cross_section(kUnit, BoundaryCondition::Dirichlet, k.back()));
  }
  const double theta = kUnit.theta();
  const auto a = window_average(k, s, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]) {
      EXPECT_LE(*a[i], 4.0 * theta * 1.05);
      EXPECT_LE(*a[i], 4.0 * theta + 0.2 * theta);
    }
}
