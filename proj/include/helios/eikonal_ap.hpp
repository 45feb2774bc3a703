#pragma once

// Physical-optics model of the two-strip phase-shifting obstacle: rays
// crossing the outer strips |x| in [1/4, 1/2] of the exit plane pick up the
// extra phase delta = k Delta - k0, rays through the centre strip do not. The
// offset sign makes delta = (2n + 1) pi exactly at k_n = (k0 + (2n + 1) pi) / Delta.
// The shadow difference field g = (e^{i delta} - 1) 1_strips gives the cross
// section either by Plancherel (exit-plane energy) or by integrating the
// Fraunhofer amplitude over the forward hemisphere.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "helios/errors.hpp"
#include "helios/geometry.hpp"
#include "helios/parallel.hpp"
#include "helios/quadrature.hpp"
#include "helios/specfun.hpp"

namespace helios {

/// Axis-aligned rectangle [x0, x1] x [y0, y1] of the exit plane.
struct Rect {
  double x0, x1, y0, y1;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

struct APGeometry {
  /// Cross-section vertices (x, z) of the scaled profile, keyed A, A', A'',
  /// B, B', B'', G, G'.
  std::map<std::string, Vec2> vertices;
  std::vector<Rect> shifted_region;
  std::vector<Rect> unshifted_region;
  double depth = 1.0;
  double Delta = 0.0;
  double Theta = 0.0;
};

/// Geometry of the obstacle: |AB| = 1, |A''B''| = 1/2, |AA'| = sqrt(3)/2 and
/// depth 1 along y. Delta = |GA''| + |A''B| - |A'A| is recomputed from the
/// coordinates.
inline APGeometry ap_geometry() {
  const double h = std::sqrt(3.0) / 4.0;
  APGeometry g;
  g.vertices = {{"A", {-0.5, -h}},  {"A'", {-0.5, h}},  {"A''", {-0.25, 0.0}}, {"B", {0.5, -h}},
                {"B'", {0.5, h}},   {"B''", {0.25, 0.0}}, {"G", {-0.25, h}},     {"G'", {0.25, h}}};
  const auto& v = g.vertices;
  g.Delta = norm(v.at("G") - v.at("A''")) + norm(v.at("A''") - v.at("B")) - norm(v.at("A'") - v.at("A"));
  g.shifted_region = {{-0.5, -0.25, 0.0, g.depth}, {0.25, 0.5, 0.0, g.depth}};
  g.unshifted_region = {{-0.25, 0.25, 0.0, g.depth}};
  g.Theta = 0.0;
  for (const Rect& r : g.shifted_region) g.Theta += r.area();
  return g;
}

inline double resonant_k(int n, double k0, const APGeometry& g = ap_geometry()) {
  if (n < 0) throw ArgumentError("resonance index must be nonnegative");
  return (k0 + (2.0 * n + 1.0) * kPi) / g.Delta;
}

inline double invisible_k(int n, double k0, const APGeometry& g = ap_geometry()) {
  if (n < 0) throw ArgumentError("invisibility index must be nonnegative");
  return (k0 + 2.0 * n * kPi) / g.Delta;
}

inline double eikonal_phase(double k, double k0, const APGeometry& g = ap_geometry()) { return k * g.Delta - k0; }

/// Plancherel model sigma = |e^{i delta} - 1|^2 Theta = 4 Theta sin^2(delta / 2).
inline double eikonal_sigma(double k, double k0, const APGeometry& g = ap_geometry()) {
  if (!(k > 0.0)) throw ArgumentError("eikonal_sigma needs k > 0");
  const double s = std::sin(0.5 * eikonal_phase(k, k0, g));
  return 4.0 * g.Theta * s * s;
}

/// Angular weight of the Fraunhofer amplitude
/// u_inf = (k / 2 pi i) w(theta_3) g_hat(k theta_perp).
/// kirchhoff: w = (1 + theta_3) / 2 (the aperture-field obliquity); unit: w = 1.
enum class Obliquity { kirchhoff, unit };

inline const char* to_string(Obliquity o) { return o == Obliquity::kirchhoff ? "kirchhoff" : "unit"; }

namespace detail {

/// |int_strips e^{-i xi . q} dq|^2 in closed form.
inline double strip_transform_sq(const APGeometry& g, double xi1, double xi2) {
  cplx gx{0.0};
  for (const Rect& r : g.shifted_region) {
    gx += std::abs(xi1) < 1e-8 ? cplx(r.x1 - r.x0)
                               : (std::exp(-kI * (xi1 * r.x1)) - std::exp(-kI * (xi1 * r.x0))) / (-kI * xi1);
  }
  const Rect& r0 = g.shifted_region.front();
  const double L = r0.y1 - r0.y0;
  const double half = 0.5 * xi2 * L;
  const double sy = std::abs(half) < 1e-8 ? L : L * std::sin(half) / half;
  return std::norm(gx) * sy * sy;
}

inline double hemisphere_sigma(double k, double k0, const APGeometry& g, Obliquity ob, int nt, int np) {
  // theta_3 in [0, 1] by Gauss-Legendre, phi in [0, pi / 2] by Gauss-Legendre;
  // |g_hat|^2 is even in each component of xi, so the quarter covers all.
  const Rule1D rt = gauss_legendre(nt);
  const Rule1D rp = gauss_legendre(np);
  const double amp = std::norm(std::exp(kI * eikonal_phase(k, k0, g)) - 1.0);
  std::vector<double> rings(static_cast<std::size_t>(nt));
  parallel_for(static_cast<std::size_t>(nt), [&](std::size_t i) {
    const double t3 = 0.5 * (rt.nodes[i] + 1.0);
    const double rho = std::sqrt(std::max(0.0, 1.0 - t3 * t3));
    const double w = ob == Obliquity::kirchhoff ? 0.5 * (1.0 + t3) : 1.0;
    std::vector<double> terms(static_cast<std::size_t>(np));
    for (int j = 0; j < np; ++j) {
      const double ph = 0.25 * kPi * (rp.nodes[static_cast<std::size_t>(j)] + 1.0);
      terms[static_cast<std::size_t>(j)] =
          rp.weights[static_cast<std::size_t>(j)] * strip_transform_sq(g, k * rho * std::cos(ph), k * rho * std::sin(ph));
    }
    rings[i] = rt.weights[i] * w * w * pairwise_sum(terms);
  });
  // Jacobians: theta_3 map 1/2, phi map pi/4, four quarters
  const double integral = pairwise_sum(rings) * 0.5 * (0.25 * kPi) * 4.0;
  return amp * k * k / (4.0 * kPi * kPi) * integral;
}

}  // namespace detail

struct AngularSigma {
  double sigma = 0.0;
  double refinement_change = 0.0;
  int n_theta = 0;
  int n_phi = 0;
};

/// Cross section from the Fraunhofer amplitude over the forward hemisphere.
/// The rule has about 4 nodes per oscillation of the strip transform and is
/// checked against a 1.5x refinement; a change above tol raises
/// UnresolvedOscillation.
inline AngularSigma eikonal_sigma_farfield_detail(double k, double k0, Obliquity ob = Obliquity::kirchhoff,
                                                  double tol = 1e-8, const APGeometry& g = ap_geometry()) {
  if (!(k > 0.0)) throw ArgumentError("eikonal_sigma_farfield needs k > 0");
  AngularSigma out;
  out.n_theta = std::max(64, static_cast<int>(std::ceil(2.0 * k)) + 64);
  out.n_phi = out.n_theta;
  out.sigma = detail::hemisphere_sigma(k, k0, g, ob, out.n_theta, out.n_phi);
  const int nt2 = static_cast<int>(std::ceil(1.5 * out.n_theta));
  const double fine = detail::hemisphere_sigma(k, k0, g, ob, nt2, nt2);
  const double scale = std::max(std::abs(fine), 4.0 * g.Theta * 1e-12);
  out.refinement_change = std::abs(fine - out.sigma) / scale;
  if (out.refinement_change > tol) {
    throw UnresolvedOscillation("hemisphere quadrature changed by " + std::to_string(out.refinement_change) +
                                " under refinement at k = " + std::to_string(k));
  }
  out.sigma = fine;
  out.n_theta = out.n_phi = nt2;
  return out;
}

inline double eikonal_sigma_farfield(double k, double k0, Obliquity ob = Obliquity::kirchhoff) {
  return eikonal_sigma_farfield_detail(k, k0, ob).sigma;
}

struct EikonalRow {
  double k = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  bool is_resonant = false;
  bool is_invisible = false;
};

struct EikonalSpectrum {
  double k0 = 0.0;
  std::vector<EikonalRow> rows;
  std::vector<double> resonances;
  std::vector<double> invisibles;
};

/// Plancherel spectrum on a uniform grid of nk points over [kmin, kmax]; every
/// resonant and invisible wavenumber inside the range is merged in as an
/// extra row carrying its flag.
inline EikonalSpectrum eikonal_spectrum(double kmin, double kmax, int nk, double k0,
                                        const APGeometry& g = ap_geometry()) {
  if (!(kmin > 0.0) || !(kmax > kmin) || nk < 2) throw ArgumentError("eikonal spectrum needs 0 < kmin < kmax, nk >= 2");
  EikonalSpectrum s;
  s.k0 = k0;
  for (int n = 0;; ++n) {
    const double kr = resonant_k(n, k0, g);
    if (kr > kmax) break;
    if (kr >= kmin) s.resonances.push_back(kr);
  }
  for (int n = 0;; ++n) {
    const double ki = invisible_k(n, k0, g);
    if (ki > kmax) break;
    if (ki >= kmin && ki > 0.0) s.invisibles.push_back(ki);
  }
  for (int i = 0; i < nk; ++i) {
    const double k = kmin + (kmax - kmin) * i / (nk - 1);
    s.rows.push_back({k, eikonal_phase(k, k0, g), eikonal_sigma(k, k0, g), false, false});
  }
  for (double k : s.resonances) s.rows.push_back({k, eikonal_phase(k, k0, g), eikonal_sigma(k, k0, g), true, false});
  for (double k : s.invisibles) s.rows.push_back({k, eikonal_phase(k, k0, g), eikonal_sigma(k, k0, g), false, true});
  std::stable_sort(s.rows.begin(), s.rows.end(), [](const EikonalRow& a, const EikonalRow& b) { return a.k < b.k; });
  return s;
}

}  // namespace helios
