#pragma once

// Separable exterior Helmholtz problems on a sphere of radius a: plane-wave
// scattering, far fields, cross sections, scattering of arbitrary boundary
// data and the Neumann-to-Dirichlet operator in spectral form.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "helios/errors.hpp"
#include "helios/incident_field.hpp"
#include "helios/parallel.hpp"
#include "helios/quadrature.hpp"
#include "helios/specfun.hpp"

namespace helios {

struct SphereObstacle {
  double a = 1.0;

  explicit SphereObstacle(double radius = 1.0) : a(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ArgumentError("sphere radius must be positive");
  }
  /// Geometric cross section pi a^2.
  double theta() const { return kPi * a * a; }
};

enum class BoundaryCondition { Dirichlet, Neumann };

inline const char* to_string(BoundaryCondition bc) { return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann"; }

enum class CoefficientMeaning { boundary_data, radiating_field };

inline const char* to_string(CoefficientMeaning m) {
  return m == CoefficientMeaning::boundary_data ? "boundary_data" : "radiating_field";
}

/// Storage layout. `axisymmetric` holds one scalar per l (plane-wave
/// convention, see below); `full` holds all (l, m) modes at mode_index(l, m).
enum class CoefficientLayout { axisymmetric, full };

/// Coefficients of a function on the sphere or of an outgoing field.
///
/// full / boundary_data:     f(a theta) = sum f_lm Y_lm(theta)
/// full / radiating_field:   u(r) = sum b_lm h_l(k|r|) Y_lm(r / |r|)
/// axisymmetric / radiating: u(r) = sum (2l+1) i^l c_l h_l(k|r|) P_l(cos theta)
struct PartialWaveCoefficients {
  int lmax = 0;
  cplx k{0.0};
  double radius = 1.0;
  CoefficientMeaning meaning = CoefficientMeaning::boundary_data;
  CoefficientLayout layout = CoefficientLayout::full;
  std::vector<cplx> coeffs;

  static PartialWaveCoefficients zeros(int lmax, cplx k, double radius, CoefficientMeaning meaning) {
    PartialWaveCoefficients c;
    c.lmax = lmax;
    c.k = k;
    c.radius = radius;
    c.meaning = meaning;
    c.coeffs.assign(mode_count(lmax), cplx{0.0});
    return c;
  }

  cplx& at(int l, int m) { return coeffs[mode_index(l, m)]; }
  cplx at(int l, int m) const { return coeffs[mode_index(l, m)]; }

  /// max |coefficient| over the last three l bands divided by the overall max
  /// (0 when all coefficients vanish).
  double tail_ratio() const {
    double all = 0.0, tail = 0.0;
    for (int l = 0; l <= lmax; ++l) {
      double band = 0.0;
      if (layout == CoefficientLayout::axisymmetric) {
        band = std::abs(coeffs[static_cast<std::size_t>(l)]);
      } else {
        for (int m = -l; m <= l; ++m) band = std::max(band, std::abs(at(l, m)));
      }
      all = std::max(all, band);
      if (l > lmax - 3) tail = std::max(tail, band);
    }
    return all > 0.0 ? tail / all : 0.0;
  }
};

inline constexpr double kTailTolerance = 1e-10;

namespace detail {

inline cplx ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

inline void require_real_k(cplx k, const char* what) {
  if (k.imag() != 0.0 || !(k.real() > 0.0)) throw ArgumentError(std::string(what) + " needs real k > 0");
}

}  // namespace detail

/// Mie coefficients for plane-wave incidence along +z:
/// Dirichlet c_l = -j_l(ka) / h_l(ka), Neumann c_l = -j_l'(ka) / h_l'(ka).
inline PartialWaveCoefficients scattering_coeffs(const SphereObstacle& ob, BoundaryCondition bc, double k,
                                                 int lmax = -1) {
  if (!(k > 0.0)) throw ArgumentError("scattering_coeffs needs k > 0");
  const double x = k * ob.a;
  if (lmax < 0) lmax = truncation_lmax(x);
  const SphericalBesselTable t = spherical_bessel_table(lmax, x);
  PartialWaveCoefficients c;
  c.lmax = lmax;
  c.k = k;
  c.radius = ob.a;
  c.meaning = CoefficientMeaning::radiating_field;
  c.layout = CoefficientLayout::axisymmetric;
  c.coeffs.resize(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) {
    c.coeffs[l] = bc == BoundaryCondition::Dirichlet ? -t.j[l] / t.h1[l] : -t.jp[l] / t.h1p[l];
  }
  return c;
}

/// Converts the axisymmetric plane-wave layout to full (l, m) coefficients:
/// b_l0 = (2l+1) i^l c_l sqrt(4 pi / (2l+1)).
inline PartialWaveCoefficients to_full(const PartialWaveCoefficients& c) {
  if (c.layout == CoefficientLayout::full) return c;
  PartialWaveCoefficients f = PartialWaveCoefficients::zeros(c.lmax, c.k, c.radius, c.meaning);
  for (int l = 0; l <= c.lmax; ++l) {
    const double n = 2.0 * l + 1.0;
    f.at(l, 0) = n * detail::ipow(l) * c.coeffs[static_cast<std::size_t>(l)] * std::sqrt(4.0 * kPi / n);
  }
  return f;
}

/// Coefficients f_l0 of the trace of e^{ikz} on |r| = a:
/// e^{ikz} = sum_l i^l sqrt(4 pi (2l+1)) j_l(ka) Y_l0.
inline PartialWaveCoefficients plane_wave_trace(const SphereObstacle& ob, double k, int lmax) {
  PartialWaveCoefficients f = PartialWaveCoefficients::zeros(lmax, k, ob.a, CoefficientMeaning::boundary_data);
  const SphericalBesselTable t = spherical_bessel_table(lmax, k * ob.a);
  for (int l = 0; l <= lmax; ++l) f.at(l, 0) = detail::ipow(l) * std::sqrt(4.0 * kPi * (2.0 * l + 1.0)) * t.j[l];
  return f;
}

/// Coefficients of the normal derivative of e^{ikz} on |r| = a.
inline PartialWaveCoefficients plane_wave_normal_trace(const SphereObstacle& ob, double k, int lmax) {
  PartialWaveCoefficients f = PartialWaveCoefficients::zeros(lmax, k, ob.a, CoefficientMeaning::boundary_data);
  const SphericalBesselTable t = spherical_bessel_table(lmax, k * ob.a);
  for (int l = 0; l <= lmax; ++l)
    f.at(l, 0) = detail::ipow(l) * std::sqrt(4.0 * kPi * (2.0 * l + 1.0)) * k * t.jp[l];
  return f;
}

/// Far-field amplitude at one direction.
inline cplx far_field_at(const PartialWaveCoefficients& c, Vec3 dir) {
  if (c.meaning != CoefficientMeaning::radiating_field) {
    throw MeaningMismatch("far field needs radiating_field coefficients, got " + std::string(to_string(c.meaning)));
  }
  detail::require_real_k(c.k, "far field");
  const double k = c.k.real();
  const double t = std::clamp(dir.z, -1.0, 1.0);
  if (c.layout == CoefficientLayout::axisymmetric) {
    const std::vector<double> P = legendre_p(c.lmax, t);
    cplx s{0.0};
    for (int l = 0; l <= c.lmax; ++l) s += (2.0 * l + 1.0) * c.coeffs[static_cast<std::size_t>(l)] * P[l];
    return s / (kI * k);
  }
  const NormalizedLegendre P(c.lmax, t);
  const double phi = std::atan2(dir.y, dir.x);
  cplx s{0.0};
  for (int l = 0; l <= c.lmax; ++l) {
    cplx band{0.0};
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      cplx y = P(l, am) * std::exp(kI * (am * phi));
      if (m < 0) y = (am % 2 ? -1.0 : 1.0) * std::conj(y);
      band += c.at(l, m) * y;
    }
    s += detail::ipow(-(l + 1)) * band;
  }
  return s / k;
}

/// Far-field amplitude on every node of a sphere rule, one Legendre table per
/// ring.
inline FarFieldSamples far_field(const PartialWaveCoefficients& c, const SphereRule& rule) {
  if (c.meaning != CoefficientMeaning::radiating_field) {
    throw MeaningMismatch("far field needs radiating_field coefficients, got " + std::string(to_string(c.meaning)));
  }
  detail::require_real_k(c.k, "far field");
  const double k = c.k.real();
  FarFieldSamples out{rule, std::vector<cplx>(rule.size()), k};
  parallel_for(static_cast<std::size_t>(rule.n_theta), [&](std::size_t i) {
    const double t = rule.cos_theta[i];
    if (c.layout == CoefficientLayout::axisymmetric) {
      const std::vector<double> P = legendre_p(c.lmax, t);
      cplx s{0.0};
      for (int l = 0; l <= c.lmax; ++l) s += (2.0 * l + 1.0) * c.coeffs[static_cast<std::size_t>(l)] * P[l];
      s /= kI * k;
      for (int j = 0; j < rule.n_phi; ++j) out.values[rule.index(static_cast<int>(i), j)] = s;
      return;
    }
    const NormalizedLegendre P(c.lmax, t);
    // per-m amplitude A_m = sum_l b_lm (-i)^{l+1} Pbar_l|m| (with the
    // negative-m sign), then synthesis over phi
    std::vector<cplx> A(static_cast<std::size_t>(2 * c.lmax + 1), cplx{0.0});
    for (int l = 0; l <= c.lmax; ++l) {
      const cplx ph = detail::ipow(-(l + 1));
      for (int m = -l; m <= l; ++m) {
        const int am = std::abs(m);
        const double sign = (m < 0 && am % 2) ? -1.0 : 1.0;
        A[static_cast<std::size_t>(m + c.lmax)] += ph * c.at(l, m) * (sign * P(l, am));
      }
    }
    for (int j = 0; j < rule.n_phi; ++j) {
      const double phi = rule.phi[static_cast<std::size_t>(j)];
      cplx s{0.0};
      for (int m = -c.lmax; m <= c.lmax; ++m) s += A[static_cast<std::size_t>(m + c.lmax)] * std::exp(kI * (m * phi));
      out.values[rule.index(static_cast<int>(i), j)] = s / k;
    }
  });
  return out;
}

/// Sphere rule that integrates |u_inf|^2 exactly for coefficients up to lmax.
inline SphereRule far_field_rule(int lmax) { return sphere_rule_for_degree(lmax + 1); }

/// Total cross section from the coefficient series (Parseval):
/// axisymmetric (4 pi / k^2) sum (2l+1) |c_l|^2, full sum |b_lm|^2 / k^2.
inline double cross_section(const PartialWaveCoefficients& c) {
  if (c.meaning != CoefficientMeaning::radiating_field) throw MeaningMismatch("cross section needs radiating_field");
  detail::require_real_k(c.k, "cross section");
  const double k = c.k.real();
  std::vector<double> t;
  if (c.layout == CoefficientLayout::axisymmetric) {
    t.resize(static_cast<std::size_t>(c.lmax) + 1);
    for (int l = 0; l <= c.lmax; ++l) t[l] = (2.0 * l + 1.0) * std::norm(c.coeffs[static_cast<std::size_t>(l)]);
    return 4.0 * kPi / (k * k) * pairwise_sum(t);
  }
  t.resize(c.coeffs.size());
  for (std::size_t n = 0; n < c.coeffs.size(); ++n) t[n] = std::norm(c.coeffs[n]);
  return pairwise_sum(t) / (k * k);
}

inline double total_cross_section(const SphereObstacle& ob, BoundaryCondition bc, double k) {
  return cross_section(scattering_coeffs(ob, bc, k));
}

/// |sigma - (4 pi / k) Im u_inf(z)| / sigma. sigma is always the fully
/// truncated series; the forward amplitude uses the first lmax + 1 modes
/// (default: all), so a shortened series shows up as a residual.
inline double optical_theorem_residual(const SphereObstacle& ob, BoundaryCondition bc, double k, int lmax = -1) {
  const PartialWaveCoefficients c = scattering_coeffs(ob, bc, k);
  const double sigma = cross_section(c);
  const int lf = lmax < 0 ? c.lmax : std::min(lmax, c.lmax);
  cplx fwd{0.0};
  for (int l = 0; l <= lf; ++l) fwd += (2.0 * l + 1.0) * c.coeffs[static_cast<std::size_t>(l)];
  fwd /= kI * k;
  return std::abs(sigma - 4.0 * kPi / k * fwd.imag()) / sigma;
}

/// Per-mode unitarity defect max_l | |1 + 2 c_l| - 1 |.
inline double unitarity_defect(const PartialWaveCoefficients& c) {
  double worst = 0.0;
  if (c.layout != CoefficientLayout::axisymmetric) throw ArgumentError("unitarity check needs axisymmetric layout");
  for (const cplx& v : c.coeffs) worst = std::max(worst, std::abs(std::abs(1.0 + 2.0 * v) - 1.0));
  return worst;
}

/// Evaluates the outgoing field at a point (full or axisymmetric layout).
inline cplx field_at(const PartialWaveCoefficients& c, Vec3 r) {
  if (c.meaning != CoefficientMeaning::radiating_field) throw MeaningMismatch("field_at needs radiating_field");
  const double rr = norm(r);
  const SphericalBesselTable t = spherical_bessel_table(c.lmax, c.k * rr);
  const double ct = std::clamp(r.z / rr, -1.0, 1.0);
  if (c.layout == CoefficientLayout::axisymmetric) {
    const std::vector<double> P = legendre_p(c.lmax, ct);
    cplx s{0.0};
    for (int l = 0; l <= c.lmax; ++l)
      s += (2.0 * l + 1.0) * detail::ipow(l) * c.coeffs[static_cast<std::size_t>(l)] * t.h1[l] * P[l];
    return s;
  }
  const NormalizedLegendre P(c.lmax, ct);
  const double phi = std::atan2(r.y, r.x);
  cplx s{0.0};
  for (int l = 0; l <= c.lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      cplx y = P(l, am) * std::exp(kI * (am * phi));
      if (m < 0) y = (am % 2 ? -1.0 : 1.0) * std::conj(y);
      s += c.at(l, m) * t.h1[l] * y;
    }
  }
  return s;
}

/// NtD eigenvalues d_l = h_l(ka) / (k h_l'(ka)), l = 0..lmax.
inline std::vector<cplx> ntd_eigenvalues(const SphereObstacle& ob, cplx k, int lmax) {
  if (k == cplx{0.0}) throw ZeroArgument("ntd_eigenvalues needs k != 0");
  const SphericalBesselTable t = spherical_bessel_table(lmax, k * ob.a);
  std::vector<cplx> d(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) d[l] = t.h1[l] / (k * t.h1p[l]);
  return d;
}

/// Spectral Sobolev weight (1 + l(l+1)/a^2)^{1/2}.
inline double sobolev_weight(int l, double a) { return std::sqrt(1.0 + l * (l + 1.0) / (a * a)); }

struct NtdNorms {
  double norm_D = 0.0;     // sup_l w_l |d_l|          (H^{-1/2} -> H^{1/2})
  double norm_Dinv = 0.0;  // sup_l |d_l|^{-1} / w_l    (H^{1/2} -> H^{-1/2})
  int argmax_D = 0;
  int argmax_Dinv = 0;
  int lmax = 0;
  // Both weighted symbols tend to 1 as l grows (d_l ~ -a / (l + 1) once
  // l >> |k| a). The tail is certified when each symbol moves monotonically
  // toward that limit over the last 10 modes; the uncounted tail can then
  // exceed the computed sup by at most tail_gap_D or tail_gap_Dinv.
  bool tail_certified = false;
  double tail_gap_D = 0.0;
  double tail_gap_Dinv = 0.0;
};

/// Operator norms of the diagonal NtD map and its inverse. The sup runs over
/// l <= l_max(|k| a) + 20. With enforce_sector, complex k must satisfy
/// 0 < arg k < pi/2 - sector_margin.
inline NtdNorms ntd_norms(const SphereObstacle& ob, cplx k, bool enforce_sector = false, double sector_margin = 0.0) {
  if (k == cplx{0.0}) throw ZeroArgument("ntd_norms needs k != 0");
  if (enforce_sector && k.imag() != 0.0) {
    const double arg = std::arg(k);
    if (!(arg > 0.0 && arg < kPi / 2.0 - sector_margin)) {
      throw SectorViolation("arg k = " + std::to_string(arg) + " is outside (0, pi/2 - " + std::to_string(sector_margin) +
                            ")");
    }
  }
  NtdNorms n;
  n.lmax = truncation_lmax(std::abs(k) * ob.a) + 20;
  const std::vector<cplx> d = ntd_eigenvalues(ob, k, n.lmax);
  std::vector<double> sD(d.size()), sDi(d.size());
  for (int l = 0; l <= n.lmax; ++l) {
    const double w = sobolev_weight(l, ob.a);
    sD[l] = w * std::abs(d[l]);
    sDi[l] = 1.0 / (std::abs(d[l]) * w);
    if (sD[l] > n.norm_D) {
      n.norm_D = sD[l];
      n.argmax_D = l;
    }
    if (sDi[l] > n.norm_Dinv) {
      n.norm_Dinv = sDi[l];
      n.argmax_Dinv = l;
    }
  }
  auto toward_limit = [&](const std::vector<double>& s) {
    for (int l = n.lmax - 9; l <= n.lmax; ++l) {
      if (std::abs(s[l] - 1.0) > std::abs(s[l - 1] - 1.0)) return false;
      if ((s[l] - s[l - 1]) * (s[n.lmax] - s[n.lmax - 10]) < 0.0) return false;
    }
    return true;
  };
  n.tail_certified = toward_limit(sD) && toward_limit(sDi);
  n.tail_gap_D = std::max(0.0, 1.0 - n.norm_D);
  n.tail_gap_Dinv = std::max(0.0, 1.0 - n.norm_Dinv);
  return n;
}

/// Outgoing field whose boundary trace (Dirichlet) or normal derivative
/// (Neumann) equals the given data: b_lm = f_lm / h_l(ka) or
/// b_lm = g_lm / (k h_l'(ka)).
inline PartialWaveCoefficients scatter_boundary_data(const SphereObstacle& ob, BoundaryCondition bc, cplx k,
                                                     const PartialWaveCoefficients& data) {
  if (data.meaning != CoefficientMeaning::boundary_data) {
    throw MeaningMismatch("scatter_boundary_data needs boundary_data coefficients");
  }
  const PartialWaveCoefficients f = to_full(data);
  const SphericalBesselTable t = spherical_bessel_table(f.lmax, k * ob.a);
  PartialWaveCoefficients u = PartialWaveCoefficients::zeros(f.lmax, k, ob.a, CoefficientMeaning::radiating_field);
  for (int l = 0; l <= f.lmax; ++l) {
    const cplx den = bc == BoundaryCondition::Dirichlet ? t.h1[l] : k * t.h1p[l];
    for (int m = -l; m <= l; ++m) u.at(l, m) = f.at(l, m) / den;
  }
  return u;
}

/// (sum (1 + l(l+1)/a^2)^s |f_lm|^2)^{1/2} with a the coefficient radius.
inline double sobolev_norm(const PartialWaveCoefficients& data, double s) {
  if (data.meaning != CoefficientMeaning::boundary_data) throw MeaningMismatch("sobolev_norm needs boundary_data");
  const PartialWaveCoefficients f = to_full(data);
  std::vector<double> t(f.coeffs.size());
  for (int l = 0; l <= f.lmax; ++l) {
    const double w = std::pow(1.0 + l * (l + 1.0) / (f.radius * f.radius), s);
    for (int m = -l; m <= l; ++m) t[mode_index(l, m)] = w * std::norm(f.at(l, m));
  }
  return std::sqrt(pairwise_sum(t));
}

/// Synthesises sum f_lm Y_lm at one direction.
inline cplx synthesize(const PartialWaveCoefficients& data, Vec3 dir) {
  const PartialWaveCoefficients f = to_full(data);
  const NormalizedLegendre P(f.lmax, std::clamp(dir.z / norm(dir), -1.0, 1.0));
  const double phi = std::atan2(dir.y, dir.x);
  cplx s{0.0};
  for (int l = 0; l <= f.lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      cplx y = P(l, am) * std::exp(kI * (am * phi));
      if (m < 0) y = (am % 2 ? -1.0 : 1.0) * std::conj(y);
      s += f.at(l, m) * y;
    }
  }
  return s;
}

}  // namespace helios
