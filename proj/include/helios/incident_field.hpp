#pragma once

// Smooth planar aperture, the auxiliary field p, the quasi-plane wave
// Phi = (k / 2 pi) p - (i / 2 pi) p_z and their far-field amplitudes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "helios/errors.hpp"
#include "helios/fastmath.hpp"
#include "helios/geometry.hpp"
#include "helios/parallel.hpp"
#include "helios/quadrature.hpp"
#include "helios/specfun.hpp"

namespace helios {

/// C-infinity step: s(t) = g(t) / (g(t) + g(1 - t)), g(t) = exp(-1/t) for
/// t > 0 and 0 otherwise. s = 0 for t <= 0 and s = 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

/// Default points per wavelength of the field quadrature.
inline constexpr double kDefaultPpw = 10.0;

/// Simple polygon M in the plane z = 0 with the cutoff eta that vanishes
/// within distance delta of the boundary and equals one beyond 2 delta.
class PlanarAperture {
 public:
  PlanarAperture(const Polygon& M, double delta) : M_(normalized_polygon(M)), delta_(delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError("aperture delta must be positive and finite");
    area_ = signed_area(M_);
    convex_ = is_convex(M_);
    eroded_2delta_ = convex_ ? convex_eroded_area(M_, 2.0 * delta_) : std::numeric_limits<double>::quiet_NaN();
    radius_ = 0.0;
    for (const Vec2& v : M_) radius_ = std::max(radius_, norm(v));
    d4_ = detect_d4();
    // eta^2 is k independent; an 8 x 8 Gauss rule on cells of size delta / 8
    // resolves the collar profile far below the 1e-10 level.
    const ApertureRule rule = aperture_rule(M_, 6.0, 1.0, delta_ / 8.0);
    std::vector<double> terms(rule.size());
    for (std::size_t n = 0; n < rule.size(); ++n) {
      const double e = eta(rule.nodes[n]);
      terms[n] = rule.weights[n] * e * e;
    }
    eta_mass_ = pairwise_sum(terms);
    if (!(eta_mass_ > 0.0)) {
      throw ArgumentError("aperture delta leaves no region where eta is positive (delta too large for M)");
    }
  }

  /// Axis-aligned square of the given side centred at the origin.
  static PlanarAperture square(double side, double delta) {
    if (!(side > 0.0)) throw ArgumentError("square side must be positive");
    const double h = 0.5 * side;
    return PlanarAperture({{-h, -h}, {h, -h}, {h, h}, {-h, h}}, delta);
  }

  const Polygon& polygon() const { return M_; }
  double delta() const { return delta_; }
  double area() const { return area_; }
  double eta_mass() const { return eta_mass_; }
  bool convex() const { return convex_; }
  /// Area of the points at distance >= 2 delta from the boundary (convex M
  /// only; NaN otherwise).
  double eroded_area_2delta() const { return eroded_2delta_; }
  /// max |q| over M.
  double radius() const { return radius_; }
  /// True when M is invariant under the dihedral group of the square about
  /// the origin, so eta and every field built from it share that symmetry.
  bool d4_symmetric() const { return d4_; }

  /// Cutoff profile. For convex M, eta(q) = prod_e s(d_e(q) / delta - 1) with
  /// d_e the distance to the line of edge e; inside a convex polygon the
  /// smallest d_e is dist(q, boundary), so eta vanishes for dist <= delta and
  /// equals one for dist >= 2 delta, and the product is C-infinity. The plain
  /// composition s(dist / delta - 1) has a gradient jump along the medial axis
  /// through the corner collars; it is used only for non-convex M.
  double eta(Vec2 q) const {
    if (convex_) {
      double e = 1.0;
      for (std::size_t i = 0, n = M_.size(); i < n && e > 0.0; ++i) {
        const Vec2 a = M_[i], b = M_[(i + 1) % n];
        const Vec2 t = b - a;
        const double d = cross(t, q - a) / norm(t);
        e *= smooth_step(d / delta_ - 1.0);
      }
      return e;
    }
    if (!contains(M_, q)) return 0.0;
    return smooth_step(boundary_distance(M_, q) / delta_ - 1.0);
  }

  const char* eta_profile_name() const { return convex_ ? "edge-product" : "min-distance"; }

 private:
  bool detect_d4() const {
    const double tol = 1e-12 * std::max(1.0, radius_);
    auto has = [&](Vec2 p) {
      for (const Vec2& v : M_)
        if (norm(v - p) <= tol) return true;
      return false;
    };
    for (const Vec2& v : M_) {
      if (!has({-v.y, v.x}) || !has({v.y, v.x})) return false;
    }
    return true;
  }

  Polygon M_;
  double delta_;
  double area_ = 0.0;
  double eta_mass_ = 0.0;
  double eroded_2delta_ = 0.0;
  double radius_ = 0.0;
  bool convex_ = false;
  bool d4_ = false;
};

inline double eta(const PlanarAperture& aperture, Vec2 q) { return aperture.eta(q); }

/// p, p_z and optionally their gradients at one point.
struct NearField {
  cplx p{0.0};
  cplx p_z{0.0};
  std::array<cplx, 3> grad_p{};
  std::array<cplx, 3> grad_p_z{};
};

/// Phi = (k / 2 pi) p - (i / 2 pi) p_z.
template <class K>
cplx phi_from(const NearField& f, K k) {
  return cplx(k) / (2.0 * kPi) * f.p - kI / (2.0 * kPi) * f.p_z;
}
template <class K>
std::array<cplx, 3> phi_gradient_from(const NearField& f, K k) {
  std::array<cplx, 3> g;
  for (int a = 0; a < 3; ++a) g[a] = cplx(k) / (2.0 * kPi) * f.grad_p[a] - kI / (2.0 * kPi) * f.grad_p_z[a];
  return g;
}

namespace detail {

/// Kernel pieces as functions of R for the integrand sin(kR)/R:
///   K0 = sin(kR)/R, f = K0'(R)/R, g2 = f'(R)/R.
/// Below |kR| = 1 the closed forms cancel badly, so a power series in
/// x = (kR)^2 is used there (truncation error below 1e-24).
template <class K>
void kernel_series(K k, double R2, K& K0, K& f, K& g2) {
  const K x = k * k * R2;
  // F(u) = k sum_n (-1)^n x^n / (2n+1)!, f = 2 F'(u), g2 = 4 F''(u)
  constexpr int kTerms = 14;
  double inv_fact[2 * kTerms + 2];
  inv_fact[0] = 1.0;
  for (int i = 1; i < 2 * kTerms + 2; ++i) inv_fact[i] = inv_fact[i - 1] / i;
  K s0{0.0}, s1{0.0}, s2{0.0};
  for (int n = kTerms - 1; n >= 0; --n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    s0 = s0 * x + sign * inv_fact[2 * n + 1];
    if (n >= 1) s1 = s1 * x + sign * n * inv_fact[2 * n + 1];
    if (n >= 2) s2 = s2 * x + sign * n * (n - 1.0) * inv_fact[2 * n + 1];
  }
  const K k2 = k * k;
  K0 = k * s0;
  f = 2.0 * k * k2 * s1;
  g2 = 4.0 * k * k2 * k2 * s2;
}

template <class K>
void kernel_closed(K k, double R, K& K0, K& f, K& g2) {
  const K kr = k * R;
  const K s = std::sin(kr);
  const K c = std::cos(kr);
  const double iR = 1.0 / R;
  const double iR2 = iR * iR;
  K0 = s * iR;
  f = (k * c * R - s) * iR2 * iR;
  g2 = (-k * k * s * R * R - 3.0 * k * c * R + 3.0 * s) * iR2 * iR2 * iR;
}

template <class K>
void kernel_terms(K k, double R2, K& K0, K& f, K& g2) {
  const double R = std::sqrt(R2);
  if (std::abs(k) * R < 1.0) {
    kernel_series(k, R2, K0, f, g2);
  } else {
    kernel_closed(k, R, K0, f, g2);
  }
}

}  // namespace detail

/// Quadrature-discretised field of one aperture. Nodes where eta vanishes are
/// dropped; each retained node carries weight * eta(q).
class IncidentField {
 public:
  /// Builds the aperture rule for wavenumber modulus k_rule at ppw points per
  /// wavelength. Cells never exceed delta / 4 so that eta is resolved.
  IncidentField(const PlanarAperture& aperture, double k_rule, double ppw = kDefaultPpw)
      : IncidentField(aperture, aperture_rule(aperture.polygon(), ppw, k_rule, aperture.delta() / 4.0)) {}

  IncidentField(const PlanarAperture& aperture, const ApertureRule& rule)
      : d4_(aperture.d4_symmetric()), radius_(aperture.radius()), k_resolved_(rule.k_resolved), ppw_(rule.ppw) {
    for (std::size_t n = 0; n < rule.size(); ++n) {
      const double e = aperture.eta(rule.nodes[n]);
      if (e > 0.0) {
        x_.push_back(rule.nodes[n].x);
        y_.push_back(rule.nodes[n].y);
        w_.push_back(rule.weights[n] * e);
      }
    }
    total_nodes_ = rule.size();
    for (std::size_t i = 0; i < w_.size(); ++i) active_radius_ = std::max(active_radius_, std::hypot(x_[i], y_[i]));
  }

  double k_resolved() const { return k_resolved_; }
  double ppw() const { return ppw_; }
  bool d4_symmetric() const { return d4_; }
  void set_d4_symmetric(bool v) { d4_ = v; }
  std::size_t active_nodes() const { return w_.size(); }
  std::size_t total_nodes() const { return total_nodes_; }
  /// max |q| over nodes where eta > 0.
  double active_radius() const { return active_radius_; }

  void require_resolved(double k_modulus) const {
    if (k_modulus > k_resolved_ * (1.0 + 1e-12)) {
      throw UnresolvedOscillation("aperture rule resolves k <= " + std::to_string(k_resolved_) + " but k = " +
                                  std::to_string(k_modulus) + " was requested; rebuild the rule for this k");
    }
  }

  /// p and p_z (and, when with_gradient, their gradients) at r. K is double
  /// or std::complex<double>.
  template <class K>
  NearField near_field(Vec3 r, K k, bool with_gradient = false) const {
    require_resolved(std::abs(k));
    const std::size_t n = w_.size();
    double min_r2 = std::numeric_limits<double>::infinity();
    {
      const double* x = x_.data();
      const double* y = y_.data();
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = r.x - x[i], dy = r.y - y[i];
        min_r2 = std::min(min_r2, dx * dx + dy * dy + r.z * r.z);
      }
    }
    const double max_phase = std::abs(k) * (norm(r) + radius_);
    if constexpr (std::is_same_v<K, double>) {
      if (std::sqrt(min_r2) * std::abs(k) >= 1.0 && max_phase < kFastSincosLimit) {
        return with_gradient ? fast_real<true>(r, k) : fast_real<false>(r, k);
      }
    }
    return generic(r, k, with_gradient);
  }

  template <class K>
  cplx phi(Vec3 r, K k) const {
    return phi_from(near_field(r, k), k);
  }

  /// eta_hat(xi) = sum_q w_q eta(q) exp(-i xi . q).
  cplx eta_hat(double xi1, double xi2) const {
    const std::size_t n = w_.size();
    const double* x = x_.data();
    const double* y = y_.data();
    const double* w = w_.data();
    const double phase_bound = std::hypot(xi1, xi2) * radius_;
    if (phase_bound >= kFastSincosLimit) {
      cplx acc{0.0};
      for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::exp(-kI * (xi1 * x[i] + xi2 * y[i]));
      return acc;
    }
    constexpr std::size_t kBlock = 512;
    std::vector<double> re_blocks, im_blocks;
    re_blocks.reserve(n / kBlock + 1);
    im_blocks.reserve(n / kBlock + 1);
    for (std::size_t b = 0; b < n; b += kBlock) {
      const std::size_t e = std::min(n, b + kBlock);
      double re = 0.0, im = 0.0;
      HELIOS_SIMD_REDUCTION(re, im)
      for (std::size_t i = b; i < e; ++i) {
        double s, c;
        fast_sincos(xi1 * x[i] + xi2 * y[i], s, c);
        re += w[i] * c;
        im += -w[i] * s;
      }
      re_blocks.push_back(re);
      im_blocks.push_back(im);
    }
    return {pairwise_sum(re_blocks), pairwise_sum(im_blocks)};
  }

 private:
  template <bool Grad>
  NearField fast_real(Vec3 r, double k) const {
    const std::size_t n = w_.size();
    const double* x = x_.data();
    const double* y = y_.data();
    const double* w = w_.data();
    const double z = r.z;
    constexpr std::size_t kBlock = 512;
    const std::size_t nb = (n + kBlock - 1) / kBlock;
    constexpr int kAcc = Grad ? 7 : 2;
    std::vector<double> blocks(static_cast<std::size_t>(kAcc) * nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
      double sp = 0.0, sz = 0.0, gx = 0.0, gy = 0.0, gzp = 0.0, gzx = 0.0, gzz = 0.0;
      if constexpr (Grad) {
        HELIOS_SIMD_REDUCTION(sp, sz, gx, gy, gzp, gzx, gzz)
        for (std::size_t i = lo; i < hi; ++i) {
          const double dx = r.x - x[i], dy = r.y - y[i];
          const double R2 = dx * dx + dy * dy + z * z;
          const double R = std::sqrt(R2);
          double s, c;
          fast_sincos(k * R, s, c);
          const double iR = 1.0 / R;
          const double iR2 = iR * iR;
          const double K0 = s * iR;
          const double f = (k * c * R - s) * iR2 * iR;
          const double g2 = (-k * k * s * R2 - 3.0 * k * c * R + 3.0 * s) * iR2 * iR2 * iR;
          sp += w[i] * K0;
          sz += w[i] * z * f;
          // grad p = sum w f (r - q); the z component is z * sum w f = sz
          gx += w[i] * f * dx;
          gy += w[i] * f * dy;
          // grad p_z = sum w (z g2 dx, z g2 dy, f + z^2 g2)
          gzx += w[i] * g2 * dx;
          gzp += w[i] * g2 * dy;
          gzz += w[i] * (f + z * z * g2);
        }
        double* out = &blocks[static_cast<std::size_t>(kAcc) * b];
        out[0] = sp;
        out[1] = sz;
        out[2] = gx;
        out[3] = gy;
        out[4] = gzx;
        out[5] = gzp;
        out[6] = gzz;
      } else {
        HELIOS_SIMD_REDUCTION(sp, sz)
        for (std::size_t i = lo; i < hi; ++i) {
          const double dx = r.x - x[i], dy = r.y - y[i];
          const double R2 = dx * dx + dy * dy + z * z;
          const double R = std::sqrt(R2);
          double s, c;
          fast_sincos(k * R, s, c);
          const double iR = 1.0 / R;
          sp += w[i] * s * iR;
          sz += w[i] * z * (k * c * R - s) * iR * iR * iR;
        }
        blocks[2 * b] = sp;
        blocks[2 * b + 1] = sz;
      }
    }
    std::array<double, 7> tot{};
    std::vector<double> col(nb);
    for (int a = 0; a < kAcc; ++a) {
      for (std::size_t b = 0; b < nb; ++b) col[b] = blocks[static_cast<std::size_t>(kAcc) * b + a];
      tot[static_cast<std::size_t>(a)] = pairwise_sum(col);
    }
    NearField out;
    out.p = tot[0];
    out.p_z = tot[1];
    if constexpr (Grad) {
      out.grad_p = {cplx(tot[2]), cplx(tot[3]), cplx(tot[1])};
      out.grad_p_z = {cplx(z * tot[4]), cplx(z * tot[5]), cplx(tot[6])};
    }
    return out;
  }

  template <class K>
  NearField generic(Vec3 r, K k, bool with_gradient) const {
    const std::size_t n = w_.size();
    std::vector<cplx> tp(n), tz(n);
    std::vector<cplx> g[6];
    if (with_gradient)
      for (auto& v : g) v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = r.x - x_[i], dy = r.y - y_[i];
      const double R2 = dx * dx + dy * dy + r.z * r.z;
      K K0, f, g2;
      detail::kernel_terms(k, R2, K0, f, g2);
      tp[i] = w_[i] * cplx(K0);
      tz[i] = w_[i] * r.z * cplx(f);
      if (with_gradient) {
        g[0][i] = w_[i] * cplx(f) * dx;
        g[1][i] = w_[i] * cplx(f) * dy;
        g[2][i] = w_[i] * r.z * cplx(g2) * dx;
        g[3][i] = w_[i] * r.z * cplx(g2) * dy;
        g[4][i] = w_[i] * (cplx(f) + r.z * r.z * cplx(g2));
      }
    }
    NearField out;
    out.p = pairwise_sum(tp);
    out.p_z = pairwise_sum(tz);
    if (with_gradient) {
      out.grad_p = {pairwise_sum(g[0]), pairwise_sum(g[1]), out.p_z};
      out.grad_p_z = {pairwise_sum(g[2]), pairwise_sum(g[3]), pairwise_sum(g[4])};
    }
    return out;
  }

  std::vector<double> x_, y_, w_;
  bool d4_ = false;
  double radius_ = 0.0;
  double k_resolved_ = 0.0;
  double ppw_ = 0.0;
  std::size_t total_nodes_ = 0;
  double active_radius_ = 0.0;
};

/// Convenience evaluators that build a rule for k at the default density.
inline cplx eval_p(const PlanarAperture& ap, double k, Vec3 r, double ppw = kDefaultPpw) {
  return IncidentField(ap, k, ppw).near_field(r, k).p;
}
inline cplx eval_p_z(const PlanarAperture& ap, double k, Vec3 r, double ppw = kDefaultPpw) {
  return IncidentField(ap, k, ppw).near_field(r, k).p_z;
}
inline cplx eval_phi(const PlanarAperture& ap, double k, Vec3 r, double ppw = kDefaultPpw) {
  return IncidentField(ap, k, ppw).phi(r, k);
}

enum class FarFieldBranch { out, in };

inline const char* to_string(FarFieldBranch b) { return b == FarFieldBranch::out ? "out" : "in"; }

/// Far-field amplitudes of Phi = e^{ik|r|}/|r| Phi_out + e^{-ik|r|}/|r| Phi_in:
///   Phi_out(theta) =  k (1 + theta_3) / (4 pi i) * eta_hat(k theta_perp)
///   Phi_in(theta)  = -k (1 - theta_3) / (4 pi i) * eta_hat(-k theta_perp)
inline cplx phi_farfield(const IncidentField& field, double k, Vec3 theta, FarFieldBranch which) {
  if (!(std::abs(norm(theta) - 1.0) <= 1e-12)) throw ArgumentError("far-field direction must be a unit vector");
  field.require_resolved(k);
  const cplx pre = k / (4.0 * kPi * kI);
  if (which == FarFieldBranch::out) {
    if (theta.z == -1.0) return cplx{0.0};
    return pre * (1.0 + theta.z) * field.eta_hat(k * theta.x, k * theta.y);
  }
  if (theta.z == 1.0) return cplx{0.0};
  return -pre * (1.0 - theta.z) * field.eta_hat(-k * theta.x, -k * theta.y);
}

inline cplx phi_farfield(const PlanarAperture& ap, double k, Vec3 theta, FarFieldBranch which,
                         double ppw = kDefaultPpw) {
  return phi_farfield(IncidentField(ap, k, ppw), k, theta, which);
}

/// Complex far-field values on every node of a sphere rule.
struct FarFieldSamples {
  SphereRule rule;
  std::vector<cplx> values;
  double k = 0.0;

  double norm_sq() const {
    std::vector<double> t(values.size());
    for (std::size_t n = 0; n < values.size(); ++n) t[n] = rule.weights[n] * std::norm(values[n]);
    return pairwise_sum(t);
  }
  double norm() const { return std::sqrt(norm_sq()); }
};

/// Representative of phi index j under the symmetry group of the square when
/// n_phi is a multiple of 8: rotations by quarter turns and the reflection
/// across the diagonal map it into [0, n_phi / 8].
inline int d4_phi_representative(int j, int n_phi) {
  const int quarter = n_phi / 4;
  int m = j % quarter;
  if (m > n_phi / 8) m = quarter - m;
  return m;
}

/// Phi_out and Phi_in on all nodes of the rule. eta_hat depends only on
/// theta_perp, so mirror rings share one evaluation; with square symmetry
/// only phi indices in [0, n_phi / 8] are evaluated.
inline std::pair<FarFieldSamples, FarFieldSamples> phi_farfield_samples(const IncidentField& field, double k,
                                                                        const SphereRule& rule) {
  field.require_resolved(k);
  const int nt = rule.n_theta, np = rule.n_phi;
  const bool fold = field.d4_symmetric() && np % 8 == 0;
  const int nrep = fold ? np / 8 + 1 : np;
  // rings i and nt-1-i share theta_perp; evaluate for i >= nt/2
  const int first = nt / 2;
  const int nrings = nt - first;
  std::vector<cplx> eh(static_cast<std::size_t>(nrings) * nrep), ehm(eh.size());
  parallel_for(eh.size(), [&](std::size_t idx) {
    const int ring = first + static_cast<int>(idx / static_cast<std::size_t>(nrep));
    const int j = static_cast<int>(idx % static_cast<std::size_t>(nrep));
    const Vec3 th = rule.nodes[rule.index(ring, j)];
    eh[idx] = field.eta_hat(k * th.x, k * th.y);
  });
  // eta is real, so eta_hat(-xi) = conj(eta_hat(xi))
  for (std::size_t idx = 0; idx < eh.size(); ++idx) ehm[idx] = std::conj(eh[idx]);
  FarFieldSamples out{rule, std::vector<cplx>(rule.size()), k};
  FarFieldSamples in{rule, std::vector<cplx>(rule.size()), k};
  const cplx pre = k / (4.0 * kPi * kI);
  for (int i = 0; i < nt; ++i) {
    const int ring = i >= first ? i : nt - 1 - i;
    const double t = rule.cos_theta[static_cast<std::size_t>(i)];
    for (int j = 0; j < np; ++j) {
      int jr = fold ? d4_phi_representative(j, np) : j;
      // mirror ring nt-1-i sits at -theta_3 with the same theta_perp
      const std::size_t idx = static_cast<std::size_t>(ring - first) * nrep + static_cast<std::size_t>(jr);
      out.values[rule.index(i, j)] = pre * (1.0 + t) * eh[idx];
      in.values[rule.index(i, j)] = -pre * (1.0 - t) * ehm[idx];
    }
  }
  return {std::move(out), std::move(in)};
}

struct FarFieldNorms {
  double norm_out_sq = 0.0;
  double norm_in_sq = 0.0;
  double eta_mass = 0.0;
  int n_theta = 0;
  int n_phi = 0;
  double refinement_change = 0.0;  // relative change at the last refinement
  bool converged = false;
};

/// Starting sphere resolution for far fields of an aperture of radius rho at
/// wavenumber k: the amplitude oscillates with period about 2 pi / (k rho) in
/// angle.
inline int farfield_start_n_theta(double k, double rho) {
  return std::max(16, static_cast<int>(std::ceil(k * rho)) + 40);
}

inline int round_up_to(int n, int m) { return ((n + m - 1) / m) * m; }

inline FarFieldNorms phi_farfield_norms(const IncidentField& field, double k, double eta_mass, double tol = 1e-8,
                                        int max_refinements = 6) {
  FarFieldNorms r;
  r.eta_mass = eta_mass;
  int nt = farfield_start_n_theta(k, field.active_radius());
  double prev_out = -1.0, prev_in = -1.0;
  for (int it = 0; it <= max_refinements; ++it) {
    const int np = round_up_to(2 * nt, 8);
    const SphereRule rule = sphere_rule(nt, np);
    auto [out, in] = phi_farfield_samples(field, k, rule);
    r.norm_out_sq = out.norm_sq();
    r.norm_in_sq = in.norm_sq();
    r.n_theta = nt;
    r.n_phi = np;
    if (prev_out >= 0.0) {
      r.refinement_change = std::max(std::abs(r.norm_out_sq - prev_out) / std::max(r.norm_out_sq, 1e-300),
                                     std::abs(r.norm_in_sq - prev_in) / std::max(r.norm_in_sq, 1e-300));
      if (r.refinement_change <= tol) {
        r.converged = true;
        return r;
      }
    }
    prev_out = r.norm_out_sq;
    prev_in = r.norm_in_sq;
    nt = static_cast<int>(std::ceil(1.5 * nt));
  }
  return r;
}

inline FarFieldNorms phi_farfield_norms(const PlanarAperture& ap, double k, double ppw = kDefaultPpw,
                                        double tol = 1e-8) {
  return phi_farfield_norms(IncidentField(ap, k, ppw), k, ap.eta_mass(), tol);
}

}  // namespace helios
