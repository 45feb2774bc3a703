#pragma once

// Cross-section bound experiment on the sphere: the scattered wave is split
// as u = u0 + v, where u0 cancels the quasi-plane wave Phi on the boundary
// and v carries the small mismatch Phi - e^{ikz}. Also hosts the k-window
// moving average.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "helios/errors.hpp"
#include "helios/incident_field.hpp"
#include "helios/mie_sphere.hpp"
#include "helios/parallel.hpp"
#include "helios/quadrature.hpp"
#include "helios/specfun.hpp"

namespace helios {

/// Rule used to project onto modes l <= lmax: Gauss-Legendre in cos theta
/// with lmax + 1 nodes and a phi grid of at least 2 lmax + 2 points, rounded to
/// a multiple of 8 so that square symmetry maps the grid onto itself.
inline SphereRule projection_rule(int lmax) { return sphere_rule(lmax + 1, round_up_to(2 * lmax + 2, 8)); }

/// Projects samples given on every node of `rule` onto Y_lm, l <= lmax:
/// f_lm = sum_nodes w f conj(Y_lm), computed ring by ring through a phi
/// Fourier transform.
inline PartialWaveCoefficients project_samples(const SphereRule& rule, const std::vector<cplx>& samples, int lmax,
                                               cplx k, double radius) {
  if (samples.size() != rule.size()) throw ArgumentError("sample count does not match the sphere rule");
  const int nt = rule.n_theta, np = rule.n_phi;
  if (nt < lmax + 1 || np < 2 * lmax + 1) throw ArgumentError("sphere rule too coarse for the requested lmax");
  const int nm = 2 * lmax + 1;
  std::vector<cplx> ph(static_cast<std::size_t>(np) * nm);
  for (int j = 0; j < np; ++j)
    for (int m = -lmax; m <= lmax; ++m)
      ph[static_cast<std::size_t>(j) * nm + (m + lmax)] = std::exp(-kI * (m * rule.phi[static_cast<std::size_t>(j)]));
  // F[i][m] = (2 pi / np) sum_j f_ij e^{-i m phi_j}
  std::vector<cplx> F(static_cast<std::size_t>(nt) * nm);
  const double wphi = 2.0 * kPi / np;
  parallel_for(static_cast<std::size_t>(nt), [&](std::size_t i) {
    for (int m = 0; m < nm; ++m) {
      cplx s{0.0};
      for (int j = 0; j < np; ++j)
        s += samples[rule.index(static_cast<int>(i), j)] * ph[static_cast<std::size_t>(j) * nm + m];
      F[i * nm + m] = wphi * s;
    }
  });
  PartialWaveCoefficients c = PartialWaveCoefficients::zeros(lmax, k, radius, CoefficientMeaning::boundary_data);
  std::vector<std::vector<cplx>> parts(static_cast<std::size_t>(nt));
  parallel_for(static_cast<std::size_t>(nt), [&](std::size_t i) {
    const NormalizedLegendre P(lmax, rule.cos_theta[i]);
    const double w = rule.theta_weights[i];
    std::vector<cplx>& out = parts[i];
    out.assign(c.coeffs.size(), cplx{0.0});
    for (int l = 0; l <= lmax; ++l)
      for (int m = -l; m <= l; ++m) {
        const int am = std::abs(m);
        const double sign = (m < 0 && am % 2) ? -1.0 : 1.0;
        out[mode_index(l, m)] = w * sign * P(l, am) * F[i * nm + (m + lmax)];
      }
  });
  std::vector<cplx> col(static_cast<std::size_t>(nt));
  for (std::size_t n = 0; n < c.coeffs.size(); ++n) {
    for (int i = 0; i < nt; ++i) col[static_cast<std::size_t>(i)] = parts[static_cast<std::size_t>(i)][n];
    c.coeffs[n] = pairwise_sum(col);
  }
  return c;
}

inline void require_tail_resolved(const PartialWaveCoefficients& c, double tol = kTailTolerance) {
  const double t = c.tail_ratio();
  if (t > tol) {
    throw TailNotResolved("last three bands carry " + std::to_string(t) + " of the peak coefficient (threshold " +
                          std::to_string(tol) + "); increase lmax beyond " + std::to_string(c.lmax));
  }
}

/// Boundary coefficients of a point-evaluable field on |r| = a.
template <class Field>
PartialWaveCoefficients project_on_sphere(Field&& field, const SphereObstacle& ob, cplx k, int lmax,
                                          double tail_tol = kTailTolerance) {
  const SphereRule rule = projection_rule(lmax);
  std::vector<cplx> samples(rule.size());
  parallel_for(rule.size(), [&](std::size_t n) { samples[n] = field(ob.a * rule.nodes[n]); });
  PartialWaveCoefficients c = project_samples(rule, samples, lmax, k, ob.a);
  require_tail_resolved(c, tail_tol);
  return c;
}

/// Samples Phi (Dirichlet) or its outward normal derivative (Neumann) on the
/// projection rule of radius a. Mirror rings z -> -z share one near-field
/// evaluation (p even, p_z odd in z); square-symmetric apertures evaluate
/// only phi indices in [0, n_phi / 8].
inline std::vector<cplx> sample_phi_trace(const IncidentField& field, const SphereObstacle& ob, double k,
                                          BoundaryCondition bc, const SphereRule& rule) {
  const int nt = rule.n_theta, np = rule.n_phi;
  const bool fold = field.d4_symmetric() && np % 8 == 0;
  const int nrep = fold ? np / 8 + 1 : np;
  const int first = nt / 2;  // rings i >= first carry the evaluation
  const int nrings = nt - first;
  const bool grad = bc == BoundaryCondition::Neumann;
  std::vector<cplx> upper(static_cast<std::size_t>(nrings) * nrep), lower(upper.size());
  const double c1 = k / (2.0 * kPi);
  const cplx c2 = kI / (2.0 * kPi);
  parallel_for(upper.size(), [&](std::size_t idx) {
    const int ring = first + static_cast<int>(idx / static_cast<std::size_t>(nrep));
    const int j = static_cast<int>(idx % static_cast<std::size_t>(nrep));
    const Vec3 th = rule.nodes[rule.index(ring, j)];
    const Vec3 r = ob.a * th;
    const NearField f = field.near_field(r, k, grad);
    if (!grad) {
      upper[idx] = c1 * f.p - c2 * f.p_z;
      lower[idx] = c1 * f.p + c2 * f.p_z;
    } else {
      // at the mirror point grad p -> (p_x, p_y, -p_z), grad p_z -> (-, -, +)
      const cplx gx = c1 * f.grad_p[0] - c2 * f.grad_p_z[0];
      const cplx gy = c1 * f.grad_p[1] - c2 * f.grad_p_z[1];
      const cplx gz = c1 * f.grad_p[2] - c2 * f.grad_p_z[2];
      upper[idx] = th.x * gx + th.y * gy + th.z * gz;
      const cplx mx = c1 * f.grad_p[0] + c2 * f.grad_p_z[0];
      const cplx my = c1 * f.grad_p[1] + c2 * f.grad_p_z[1];
      const cplx mz = -c1 * f.grad_p[2] - c2 * f.grad_p_z[2];
      lower[idx] = th.x * mx + th.y * my - th.z * mz;
    }
  });
  std::vector<cplx> out(rule.size());
  for (int i = 0; i < nt; ++i) {
    const bool up = i >= first;
    const int ring = up ? i : nt - 1 - i;
    for (int j = 0; j < np; ++j) {
      const int jr = fold ? d4_phi_representative(j, np) : j;
      const std::size_t idx = static_cast<std::size_t>(ring - first) * nrep + static_cast<std::size_t>(jr);
      out[rule.index(i, j)] = up ? upper[idx] : lower[idx];
    }
  }
  return out;
}

/// Boundary coefficients of Phi (Dirichlet) or d Phi / dn (Neumann).
inline PartialWaveCoefficients project_phi_trace(const IncidentField& field, const SphereObstacle& ob, double k,
                                                 BoundaryCondition bc, int lmax, double tail_tol = kTailTolerance) {
  const SphereRule rule = projection_rule(lmax);
  PartialWaveCoefficients c = project_samples(rule, sample_phi_trace(field, ob, k, bc, rule), lmax, k, ob.a);
  require_tail_resolved(c, tail_tol);
  return c;
}

/// Default aperture for sphere experiments: square of side 8 a with cutoff
/// width a, so eta = 1 on |x|, |y| <= 2 a. The margin of a between the sphere
/// and the edge of the eta = 1 plateau keeps the Fresnel spreading of the
/// collar away from the boundary already at ka = 20.
inline constexpr double kSphereApertureSide = 8.0;
inline constexpr double kSphereApertureDelta = 1.0;
inline PlanarAperture default_sphere_aperture(const SphereObstacle& ob) {
  return PlanarAperture::square(kSphereApertureSide * ob.a, kSphereApertureDelta * ob.a);
}

/// Requires eta = 1 on a neighbourhood of the disk of radius a (the shadow
/// of the sphere).
inline void require_shadow_covered(const PlanarAperture& ap, const SphereObstacle& ob) {
  const int n = 720;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    const double r = 1.001 * ob.a;
    if (ap.eta({r * std::cos(t), r * std::sin(t)}) < 1.0) {
      throw ArgumentError("aperture cutoff is not identically one over the projection of the obstacle");
    }
  }
  if (ap.eta({0.0, 0.0}) < 1.0) throw ArgumentError("aperture does not cover the obstacle projection");
}

struct DecompositionReport {
  double k = 0.0;
  double sigma_u0 = 0.0;
  double norm_phi_out = 0.0;
  double norm_phi_in = 0.0;
  double balance_residual = 0.0;
  int balance_sign = 0;                 // sign s minimising | |Phi_in| - |u0 + s Phi_out| |
  double balance_residual_other = 0.0;  // residual for the other sign
  double bound_slack = 0.0;             // 4 eta_mass - sigma_u0
  double eta_mass = 0.0;
  int lmax = 0;
  int n_theta = 0;
  int n_phi = 0;
};

struct ResidualReport {
  double k = 0.0;
  double v_boundary_norm = 0.0;
  double sigma_v = 0.0;
  double identity_residual = 0.0;
  double sigma_total = 0.0;  // cross section of u0 + v
  double sigma_mie = 0.0;    // plane-wave cross section from the Mie series
  double consistency_residual = 0.0;
  int lmax = 0;
};

struct ExperimentSettings {
  double ppw = kDefaultPpw;
  double farfield_tol = 1e-8;
  int lmax = -1;  // -1: boundary_lmax(ka)
};

namespace detail {

inline double identity_residual(const SphereObstacle& ob, const PartialWaveCoefficients& v_field) {
  // trace and normal derivative of v from the same coefficients; the NtD
  // eigenvalue links them: d_n v = v / d_l
  const double k = v_field.k.real();
  const SphericalBesselTable t = spherical_bessel_table(v_field.lmax, k * ob.a);
  const std::vector<cplx> d = ntd_eigenvalues(ob, k, v_field.lmax);
  std::vector<double> terms(v_field.coeffs.size());
  for (int l = 0; l <= v_field.lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      const cplx trace = v_field.at(l, m) * t.h1[l];
      const cplx dn = trace / d[l];
      terms[mode_index(l, m)] = (dn * std::conj(trace)).imag() * ob.a * ob.a;
    }
  }
  const double rhs = pairwise_sum(terms) / k;
  const double lhs = cross_section(v_field);
  return std::abs(lhs - rhs) / std::max(lhs, 1e-30);
}

}  // namespace detail

/// Runs both halves of the decomposition; they share the expensive Phi trace.
inline std::pair<DecompositionReport, ResidualReport> decomposition_experiment(
    const SphereObstacle& ob, BoundaryCondition bc, const PlanarAperture& ap, double k,
    const ExperimentSettings& settings = {}) {
  if (!(k > 0.0)) throw ArgumentError("experiment needs k > 0");
  require_shadow_covered(ap, ob);
  const IncidentField field(ap, k, settings.ppw);
  const int lmax = settings.lmax >= 0 ? settings.lmax : boundary_lmax(k * ob.a);
  const PartialWaveCoefficients phi_trace = project_phi_trace(field, ob, k, bc, lmax);

  PartialWaveCoefficients u0_data = phi_trace;
  for (cplx& c : u0_data.coeffs) c = -c;
  const PartialWaveCoefficients u0 = scatter_boundary_data(ob, bc, k, u0_data);

  const PartialWaveCoefficients pw =
      bc == BoundaryCondition::Dirichlet ? plane_wave_trace(ob, k, lmax) : plane_wave_normal_trace(ob, k, lmax);
  PartialWaveCoefficients v_data = phi_trace;
  for (std::size_t n = 0; n < v_data.coeffs.size(); ++n) v_data.coeffs[n] -= pw.coeffs[n];
  const PartialWaveCoefficients v = scatter_boundary_data(ob, bc, k, v_data);

  DecompositionReport d;
  d.k = k;
  d.lmax = lmax;
  d.eta_mass = ap.eta_mass();
  d.sigma_u0 = cross_section(u0);
  const FarFieldNorms norms = phi_farfield_norms(field, k, ap.eta_mass(), settings.farfield_tol);
  d.norm_phi_out = std::sqrt(norms.norm_out_sq);
  d.norm_phi_in = std::sqrt(norms.norm_in_sq);
  d.bound_slack = 4.0 * ap.eta_mass() - d.sigma_u0;
  // balance on a rule that also integrates |u0_inf|^2 exactly
  d.n_theta = std::max(norms.n_theta, lmax + 2);
  d.n_phi = round_up_to(std::max(norms.n_phi, 2 * lmax + 4), 8);
  const SphereRule rule = sphere_rule(d.n_theta, d.n_phi);
  auto [out, in] = phi_farfield_samples(field, k, rule);
  const FarFieldSamples u0inf = far_field(u0, rule);
  const double nin = in.norm();
  double res[2];
  for (int s = 0; s < 2; ++s) {
    const double sign = s == 0 ? 1.0 : -1.0;
    std::vector<double> t(rule.size());
    for (std::size_t n = 0; n < rule.size(); ++n)
      t[n] = rule.weights[n] * std::norm(u0inf.values[n] + sign * out.values[n]);
    res[s] = std::abs(nin - std::sqrt(pairwise_sum(t))) / nin;
  }
  const int best = res[0] <= res[1] ? 0 : 1;
  d.balance_sign = best == 0 ? 1 : -1;
  d.balance_residual = res[best];
  d.balance_residual_other = res[1 - best];

  ResidualReport r;
  r.k = k;
  r.lmax = lmax;
  v_data.radius = ob.a;
  r.v_boundary_norm = sobolev_norm(v_data, 0.5);
  r.sigma_v = cross_section(v);
  r.identity_residual = detail::identity_residual(ob, v);
  PartialWaveCoefficients total = u0;
  for (std::size_t n = 0; n < total.coeffs.size(); ++n) total.coeffs[n] += v.coeffs[n];
  r.sigma_total = cross_section(total);
  r.sigma_mie = total_cross_section(ob, bc, k);
  r.consistency_residual = std::abs(r.sigma_total - r.sigma_mie) / r.sigma_mie;
  return {d, r};
}

inline DecompositionReport u0_experiment(const SphereObstacle& ob, BoundaryCondition bc, const PlanarAperture& ap,
                                         double k, const ExperimentSettings& settings = {}) {
  return decomposition_experiment(ob, bc, ap, k, settings).first;
}

/// The v half alone; skips the far-field norms of Phi.
inline ResidualReport v_experiment(const SphereObstacle& ob, BoundaryCondition bc, const PlanarAperture& ap, double k,
                                   const ExperimentSettings& settings = {}) {
  if (!(k > 0.0)) throw ArgumentError("experiment needs k > 0");
  require_shadow_covered(ap, ob);
  const IncidentField field(ap, k, settings.ppw);
  const int lmax = settings.lmax >= 0 ? settings.lmax : boundary_lmax(k * ob.a);
  const PartialWaveCoefficients phi_trace = project_phi_trace(field, ob, k, bc, lmax);
  const PartialWaveCoefficients pw =
      bc == BoundaryCondition::Dirichlet ? plane_wave_trace(ob, k, lmax) : plane_wave_normal_trace(ob, k, lmax);
  PartialWaveCoefficients v_data = phi_trace;
  for (std::size_t n = 0; n < v_data.coeffs.size(); ++n) v_data.coeffs[n] -= pw.coeffs[n];
  const PartialWaveCoefficients v = scatter_boundary_data(ob, bc, k, v_data);
  PartialWaveCoefficients u0_data = phi_trace;
  for (cplx& c : u0_data.coeffs) c = -c;
  const PartialWaveCoefficients u0 = scatter_boundary_data(ob, bc, k, u0_data);
  ResidualReport r;
  r.k = k;
  r.lmax = lmax;
  r.v_boundary_norm = sobolev_norm(v_data, 0.5);
  r.sigma_v = cross_section(v);
  r.identity_residual = detail::identity_residual(ob, v);
  PartialWaveCoefficients total = u0;
  for (std::size_t n = 0; n < total.coeffs.size(); ++n) total.coeffs[n] += v.coeffs[n];
  r.sigma_total = cross_section(total);
  r.sigma_mie = total_cross_section(ob, bc, k);
  r.consistency_residual = std::abs(r.sigma_total - r.sigma_mie) / r.sigma_mie;
  return r;
}

/// Moving average (1 / 2 alpha) int_{k - alpha}^{k + alpha} of the piecewise
/// linear interpolant of (k_grid, values). Entries whose window leaves the
/// grid are empty. Throws WindowUnderresolved when a window contains a grid
/// spacing above alpha / 8.
inline std::vector<std::optional<double>> window_average(const std::vector<double>& k_grid,
                                                         const std::vector<double>& values,
                                                         const std::function<double(double)>& alpha) {
  if (k_grid.size() != values.size()) throw ArgumentError("k grid and values differ in length");
  if (k_grid.size() < 2) throw ArgumentError("window average needs at least two grid points");
  for (std::size_t i = 1; i < k_grid.size(); ++i)
    if (!(k_grid[i] > k_grid[i - 1])) throw ArgumentError("k grid must be strictly increasing");
  const std::size_t n = k_grid.size();
  auto interp = [&](std::size_t seg, double x) {
    const double t = (x - k_grid[seg]) / (k_grid[seg + 1] - k_grid[seg]);
    return values[seg] + t * (values[seg + 1] - values[seg]);
  };
  std::vector<std::optional<double>> out(n);
  const double tol = 1e-12 * std::max(std::abs(k_grid.front()), std::abs(k_grid.back()));
  for (std::size_t i = 0; i < n; ++i) {
    const double k = k_grid[i];
    const double a = alpha(k);
    if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("window half-width alpha must be positive");
    const double lo = k - a, hi = k + a;
    if (lo < k_grid.front() - tol || hi > k_grid.back() + tol) continue;
    const double clo = std::max(lo, k_grid.front()), chi = std::min(hi, k_grid.back());
    std::vector<double> parts;
    for (std::size_t s = 0; s + 1 < n; ++s) {
      const double x0 = std::max(clo, k_grid[s]), x1 = std::min(chi, k_grid[s + 1]);
      if (x1 <= x0) continue;
      if (k_grid[s + 1] - k_grid[s] > a / 8.0 * (1.0 + 1e-12)) {
        throw WindowUnderresolved("grid spacing " + std::to_string(k_grid[s + 1] - k_grid[s]) + " at k = " +
                                  std::to_string(k_grid[s]) + " exceeds alpha / 8 = " + std::to_string(a / 8.0));
      }
      parts.push_back(0.5 * (x1 - x0) * (interp(s, x0) + interp(s, x1)));
    }
    out[i] = pairwise_sum(parts) / (2.0 * a);
  }
  return out;
}

inline std::vector<std::optional<double>> window_average(const std::vector<double>& k_grid,
                                                         const std::vector<double>& values, double alpha) {
  return window_average(k_grid, values, [alpha](double) { return alpha; });
}

}  // namespace helios
