#pragma once

// Spherical Bessel and Hankel functions of complex argument, Legendre
// polynomials and orthonormal spherical harmonics.
//
// j_l uses Miller's downward recurrence normalised against the closed forms of
// j_0 or j_1 (whichever is larger, so zeros of sin z never spoil the scale).
// The growing companion uses upward recurrence from closed-form seeds:
// y_l when Im z <= 0, h1_l when Im z > 0 (there h1 dominates j and y would be
// swamped). Every table is validated by its Wronskian at runtime.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "helios/errors.hpp"

namespace helios {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Relative Wronskian residual above which a table is rejected.
inline constexpr double kWronskianTolerance = 1e-8;

enum class BesselKind { j, y, h1 };

inline const char* to_string(BesselKind kind) {
  switch (kind) {
    case BesselKind::j: return "j";
    case BesselKind::y: return "y";
    case BesselKind::h1: return "h1";
  }
  return "?";
}

struct BesselSequence {
  BesselKind kind = BesselKind::j;
  int lmax = 0;
  cplx argument{};
  std::vector<cplx> values;       // l = 0..lmax
  std::vector<cplx> derivatives;  // d/dz, l = 0..lmax
};

/// All three kinds with derivatives at one argument.
struct SphericalBesselTable {
  int lmax = 0;
  cplx z{};
  std::vector<cplx> j, jp, y, yp, h1, h1p;
  /// max over l of |W_l / W_exact - 1| for the pair used in validation.
  double wronskian_residual = 0.0;
};

/// Partial-wave truncation for size parameter x = ka: ceil(x + 4 x^(1/3) + 12).
inline int truncation_lmax(double x) {
  x = std::abs(x);
  return static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 12.0));
}

/// Truncation for boundary traces such as the plane-wave trace, whose modal
/// tail decays like j_l(x) rather than j_l(x)^2: ceil(x + 9 x^(1/3) + 12).
inline int boundary_lmax(double x) {
  x = std::abs(x);
  return static_cast<int>(std::ceil(x + 9.0 * std::cbrt(x) + 12.0));
}

namespace detail {

inline cplx j0_closed(cplx z) {
  if (std::abs(z) < 1e-3) {
    cplx z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0;
  }
  return std::sin(z) / z;
}

inline cplx j1_closed(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx z2 = z * z;
    // z/3 * (1 - z^2/10 + z^4/280 - z^6/15120 + z^8/1330560)
    return z / 3.0 *
           (1.0 + z2 * (-1.0 / 10.0 + z2 * (1.0 / 280.0 + z2 * (-1.0 / 15120.0 + z2 / 1330560.0))));
  }
  return std::sin(z) / (z * z) - std::cos(z) / z;
}

/// Miller downward recurrence for j_0..j_n (n >= 1).
inline std::vector<cplx> j_downward(int n, cplx z) {
  const double az = std::abs(z);
  const int start = std::max(n, truncation_lmax(az)) + static_cast<int>(std::ceil(10.0 + std::sqrt(az)));
  std::vector<cplx> f(start + 2, cplx{0.0});
  f[start + 1] = 0.0;
  f[start] = 1e-30;
  constexpr double kBig = 1e250;
  for (int l = start; l >= 1; --l) {
    f[l - 1] = (2.0 * l + 1.0) / z * f[l] - f[l + 1];
    if (std::abs(f[l - 1]) > kBig) {
      for (int m = l - 1; m <= start; ++m) f[m] /= kBig;
    }
  }
  const cplx j0 = j0_closed(z);
  const cplx j1 = j1_closed(z);
  const cplx scale = std::abs(j0) >= std::abs(j1) ? j0 / f[0] : j1 / f[1];
  std::vector<cplx> out(n + 1);
  for (int l = 0; l <= n; ++l) out[l] = f[l] * scale;
  return out;
}

/// Upward recurrence for y_0..y_n.
inline std::vector<cplx> y_upward(int n, cplx z) {
  std::vector<cplx> y(n + 1);
  y[0] = -std::cos(z) / z;
  if (n >= 1) y[1] = -std::cos(z) / (z * z) - std::sin(z) / z;
  for (int l = 1; l < n; ++l) y[l + 1] = (2.0 * l + 1.0) / z * y[l] - y[l - 1];
  return y;
}

/// Upward recurrence for h1_0..h1_n.
inline std::vector<cplx> h1_upward(int n, cplx z) {
  std::vector<cplx> h(n + 1);
  const cplx e = std::exp(kI * z);
  h[0] = -kI * e / z;
  if (n >= 1) h[1] = -e * (z + kI) / (z * z);
  for (int l = 1; l < n; ++l) h[l + 1] = (2.0 * l + 1.0) / z * h[l] - h[l - 1];
  return h;
}

/// f_l' = f_{l-1} - (l+1)/z f_l, with f_0' = -f_1. Input has lmax+2 entries.
inline std::vector<cplx> derivative_from_recurrence(const std::vector<cplx>& f, int lmax, cplx z) {
  std::vector<cplx> d(lmax + 1);
  d[0] = -f[1];
  for (int l = 1; l <= lmax; ++l) d[l] = f[l - 1] - (l + 1.0) / z * f[l];
  return d;
}

}  // namespace detail

/// Computes j, y, h1 and their derivatives for l = 0..lmax at z and validates
/// the Wronskian (j y' - j' y = 1/z^2 at real z, j h1' - j' h1 = i/z^2 otherwise).
inline SphericalBesselTable spherical_bessel_table(int lmax, cplx z) {
  if (lmax < 0) throw ArgumentError("lmax must be nonnegative, got " + std::to_string(lmax));
  if (z == cplx{0.0}) throw ZeroArgument("spherical Bessel functions need z != 0");
  const int n = lmax + 1;
  std::vector<cplx> j = detail::j_downward(n, z);
  std::vector<cplx> y, h;
  if (z.imag() > 0.0) {
    h = detail::h1_upward(n, z);
    y.resize(n + 1);
    for (int l = 0; l <= n; ++l) y[l] = -kI * (h[l] - j[l]);
  } else {
    y = detail::y_upward(n, z);
    h.resize(n + 1);
    for (int l = 0; l <= n; ++l) h[l] = j[l] + kI * y[l];
  }
  SphericalBesselTable t;
  t.lmax = lmax;
  t.z = z;
  t.jp = detail::derivative_from_recurrence(j, lmax, z);
  t.yp = detail::derivative_from_recurrence(y, lmax, z);
  t.h1p = detail::derivative_from_recurrence(h, lmax, z);
  j.resize(lmax + 1);
  y.resize(lmax + 1);
  h.resize(lmax + 1);
  t.j = std::move(j);
  t.y = std::move(y);
  t.h1 = std::move(h);

  const bool real_arg = z.imag() == 0.0;
  const cplx exact = real_arg ? 1.0 / (z * z) : kI / (z * z);
  double worst = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    cplx w = real_arg ? t.j[l] * t.yp[l] - t.jp[l] * t.y[l] : t.j[l] * t.h1p[l] - t.jp[l] * t.h1[l];
    double r = std::abs(w / exact - 1.0);
    if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
    worst = std::max(worst, r);
  }
  t.wronskian_residual = worst;
  if (!(worst <= kWronskianTolerance)) {
    throw StabilityLoss("Wronskian residual " + std::to_string(worst) + " at |z|=" + std::to_string(std::abs(z)) +
                        ", lmax=" + std::to_string(lmax) + "; reduce lmax or increase precision");
  }
  return t;
}

inline BesselSequence sph_bessel(BesselKind kind, int lmax, cplx z) {
  SphericalBesselTable t = spherical_bessel_table(lmax, z);
  BesselSequence s;
  s.kind = kind;
  s.lmax = lmax;
  s.argument = z;
  switch (kind) {
    case BesselKind::j:
      s.values = std::move(t.j);
      s.derivatives = std::move(t.jp);
      break;
    case BesselKind::y:
      s.values = std::move(t.y);
      s.derivatives = std::move(t.yp);
      break;
    case BesselKind::h1:
      s.values = std::move(t.h1);
      s.derivatives = std::move(t.h1p);
      break;
  }
  return s;
}

/// P_0(t) .. P_lmax(t) by the three-term recurrence.
inline std::vector<double> legendre_p(int lmax, double t) {
  if (lmax < 0) throw ArgumentError("lmax must be nonnegative");
  if (!(std::abs(t) <= 1.0)) throw DomainError("legendre_p needs |t| <= 1, got " + std::to_string(t));
  std::vector<double> p(lmax + 1);
  p[0] = 1.0;
  if (lmax >= 1) p[1] = t;
  for (int l = 1; l < lmax; ++l) p[l + 1] = ((2.0 * l + 1.0) * t * p[l] - l * p[l - 1]) / (l + 1.0);
  return p;
}

/// Orthonormal associated Legendre functions with the Condon-Shortley phase,
/// scaled so that Y_lm(theta, phi) = value(l, m) * exp(i m phi) for m >= 0.
class NormalizedLegendre {
 public:
  NormalizedLegendre() = default;
  NormalizedLegendre(int lmax, double t) { compute(lmax, t); }

  void compute(int lmax, double t) {
    if (lmax < 0) throw ArgumentError("lmax must be nonnegative");
    if (!(std::abs(t) <= 1.0)) throw DomainError("NormalizedLegendre needs |t| <= 1");
    lmax_ = lmax;
    values_.assign(static_cast<std::size_t>(lmax + 1) * (lmax + 2) / 2, 0.0);
    const double s = std::sqrt(std::max(0.0, (1.0 - t) * (1.0 + t)));
    double pmm = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 0; m <= lmax; ++m) {
      if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
      at(m, m) = pmm;
      if (m + 1 <= lmax) at(m + 1, m) = t * std::sqrt(2.0 * m + 3.0) * pmm;
      for (int l = m + 2; l <= lmax; ++l) {
        const double l2 = static_cast<double>(l) * l;
        const double m2 = static_cast<double>(m) * m;
        const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m2) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        at(l, m) = a * (t * at(l - 1, m) - b * at(l - 2, m));
      }
    }
  }

  int lmax() const { return lmax_; }
  double operator()(int l, int m) const { return values_[index(l, m)]; }

 private:
  static std::size_t index(int l, int m) { return static_cast<std::size_t>(l) * (l + 1) / 2 + m; }
  double& at(int l, int m) { return values_[index(l, m)]; }

  int lmax_ = -1;
  std::vector<double> values_;
};

/// Packed index of mode (l, m), |m| <= l: l^2 + l + m.
inline constexpr std::size_t mode_index(int l, int m) {
  return static_cast<std::size_t>(l) * l + static_cast<std::size_t>(l + m);
}
inline constexpr std::size_t mode_count(int lmax) {
  return static_cast<std::size_t>(lmax + 1) * (lmax + 1);
}

inline cplx sph_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) {
    throw IndexError("sph_harmonic needs 0 <= |m| <= l, got l=" + std::to_string(l) + " m=" + std::to_string(m));
  }
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("sph_harmonic needs 0 <= theta <= pi");
  NormalizedLegendre p(l, std::cos(theta));
  const int am = std::abs(m);
  cplx y = p(l, am) * std::exp(kI * (static_cast<double>(am) * phi));
  if (m < 0) {
    y = std::conj(y);
    if (am % 2 == 1) y = -y;
  }
  return y;
}

}  // namespace helios
