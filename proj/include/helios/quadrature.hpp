#pragma once

// Gauss-Legendre rules, product rules on the unit sphere and densified
// tensor-Gauss rules on simple planar polygons.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "helios/errors.hpp"
#include "helios/geometry.hpp"
#include "helios/parallel.hpp"
#include "helios/specfun.hpp"

namespace helios {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n. Nodes
/// are symmetrised so that x_i = -x_{n-1-i} holds bit for bit.
inline Rule1D gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre needs n >= 1, got " + std::to_string(n));
  Rule1D r;
  r.nodes.assign(static_cast<std::size_t>(n), 0.0);
  r.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? x : p1;
      double pm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm1) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // one more evaluation for a consistent derivative at the final node
        p0 = 1.0;
        p1 = x;
        for (int l = 2; l <= n; ++l) {
          double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
          p0 = p1;
          p1 = p2;
        }
        pn = n == 1 ? x : p1;
        pm1 = n == 1 ? 1.0 : p0;
        dp = n * (x * pn - pm1) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const std::size_t lo = static_cast<std::size_t>(i);
    const std::size_t hi = static_cast<std::size_t>(n - 1 - i);
    r.nodes[lo] = -x;
    r.nodes[hi] = x;
    r.weights[lo] = w;
    r.weights[hi] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

/// Product rule: Gauss-Legendre in cos(theta) times the uniform trapezoid in
/// phi. Node (i, j) sits at flat index i * n_phi + j.
struct SphereRule {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> cos_theta;      // increasing, size n_theta
  std::vector<double> theta_weights;  // Gauss weights in cos(theta)
  std::vector<double> phi;            // 2 pi j / n_phi
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  double total = 0.0;

  /// Largest L such that products Y_lm conj(Y_l'm') with l, l' <= L are
  /// integrated exactly.
  int product_degree() const { return std::min(n_theta - 1, (n_phi - 1) / 2); }
  std::size_t size() const { return nodes.size(); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_phi) + static_cast<std::size_t>(j);
  }
};

inline SphereRule sphere_rule(int n_theta, int n_phi) {
  if (n_theta < 2) throw ArgumentError("sphere_rule needs n_theta >= 2");
  if (n_phi < 4) throw ArgumentError("sphere_rule needs n_phi >= 4");
  SphereRule s;
  s.n_theta = n_theta;
  s.n_phi = n_phi;
  Rule1D gl = gauss_legendre(n_theta);
  s.cos_theta = gl.nodes;
  s.theta_weights = gl.weights;
  s.phi.resize(static_cast<std::size_t>(n_phi));
  std::vector<double> cp(s.phi.size()), sp(s.phi.size());
  for (int j = 0; j < n_phi; ++j) {
    s.phi[static_cast<std::size_t>(j)] = 2.0 * kPi * j / n_phi;
    cp[static_cast<std::size_t>(j)] = std::cos(s.phi[static_cast<std::size_t>(j)]);
    sp[static_cast<std::size_t>(j)] = std::sin(s.phi[static_cast<std::size_t>(j)]);
  }
  s.nodes.resize(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi));
  s.weights.resize(s.nodes.size());
  const double wphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double t = s.cos_theta[static_cast<std::size_t>(i)];
    const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (int j = 0; j < n_phi; ++j) {
      s.nodes[s.index(i, j)] = {st * cp[static_cast<std::size_t>(j)], st * sp[static_cast<std::size_t>(j)], t};
      s.weights[s.index(i, j)] = s.theta_weights[static_cast<std::size_t>(i)] * wphi;
    }
  }
  s.total = pairwise_sum(s.weights);
  return s;
}

/// Sphere rule whose product degree is at least L (n_theta = L + 1,
/// n_phi = 2L + 2).
inline SphereRule sphere_rule_for_degree(int L) { return sphere_rule(std::max(L + 1, 2), std::max(2 * L + 2, 4)); }

template <class F>
auto integrate(const SphereRule& rule, F&& f) {
  using R = decltype(f(rule.nodes[0]) * 1.0);
  std::vector<R> terms(rule.size());
  for (std::size_t n = 0; n < rule.size(); ++n) terms[n] = rule.weights[n] * f(rule.nodes[n]);
  return pairwise_sum(terms);
}

/// Tensor-Gauss rule on a planar polygon.
struct ApertureRule {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  double k_resolved = 0.0;  // largest wavenumber resolved at the requested ppw
  double cell_size = 0.0;   // largest physical subcell edge length
  double ppw = 0.0;
  int gauss_order = 0;
  std::size_t size() const { return nodes.size(); }
};

/// Gauss points per subcell edge. A subcell edge of length h carries this
/// many points, so the points-per-wavelength density is order * lambda / h.
inline constexpr int kApertureGaussOrder = 8;

/// Triangulates M by ear clipping, splits each triangle into three convex
/// quadrilaterals (vertex, two edge midpoints, centroid), subdivides each
/// quadrilateral into nu x nw bilinear subcells whose edges do not exceed
/// h = min(order * 2 pi / (k * ppw), max_cell) and applies an order x order
/// Gauss rule per subcell.
inline ApertureRule aperture_rule(const Polygon& M, double ppw, double k,
                                  double max_cell = std::numeric_limits<double>::infinity()) {
  if (!(ppw >= 6.0)) throw ArgumentError("aperture_rule needs ppw >= 6");
  if (!(k > 0.0)) throw ArgumentError("aperture_rule needs k > 0");
  if (!(max_cell > 0.0)) throw ArgumentError("aperture_rule needs max_cell > 0");
  const Polygon poly = normalized_polygon(M);
  const int g = kApertureGaussOrder;
  const double h = std::min(g * 2.0 * kPi / (k * ppw), max_cell);
  const Rule1D gl = gauss_legendre(g);

  ApertureRule rule;
  rule.ppw = ppw;
  rule.gauss_order = g;
  double h_max = 0.0;
  for (const Triangle& tri : triangulate(poly)) {
    const Vec2 centroid = (1.0 / 3.0) * (tri[0] + tri[1] + tri[2]);
    for (int v = 0; v < 3; ++v) {
      const Vec2 a = tri[static_cast<std::size_t>(v)];
      const Vec2 b = tri[static_cast<std::size_t>((v + 1) % 3)];
      const Vec2 c = tri[static_cast<std::size_t>((v + 2) % 3)];
      // counter-clockwise quad P0 P1 P2 P3
      const Vec2 P0 = a, P1 = 0.5 * (a + b), P2 = centroid, P3 = 0.5 * (a + c);
      // u runs along P0->P1 (and P3->P2), w along P0->P3 (and P1->P2)
      const double edge_u = std::max(norm(P1 - P0), norm(P2 - P3));
      const double edge_w = std::max(norm(P3 - P0), norm(P2 - P1));
      const int nu = std::max(1, static_cast<int>(std::ceil(edge_u / h * (1.0 - 1e-12))));
      const int nw = std::max(1, static_cast<int>(std::ceil(edge_w / h * (1.0 - 1e-12))));
      h_max = std::max({h_max, edge_u / nu, edge_w / nw});
      for (int iu = 0; iu < nu; ++iu) {
        for (int iw = 0; iw < nw; ++iw) {
          for (int gu = 0; gu < g; ++gu) {
            const double u = (iu + 0.5 * (gl.nodes[static_cast<std::size_t>(gu)] + 1.0)) / nu;
            for (int gw = 0; gw < g; ++gw) {
              const double w = (iw + 0.5 * (gl.nodes[static_cast<std::size_t>(gw)] + 1.0)) / nw;
              const Vec2 q = (1 - u) * (1 - w) * P0 + u * (1 - w) * P1 + u * w * P2 + (1 - u) * w * P3;
              const Vec2 du = (1 - w) * (P1 - P0) + w * (P2 - P3);
              const Vec2 dw = (1 - u) * (P3 - P0) + u * (P2 - P1);
              const double jac = cross(du, dw);
              const double wt = jac * gl.weights[static_cast<std::size_t>(gu)] * gl.weights[static_cast<std::size_t>(gw)] /
                                (4.0 * nu * nw);
              rule.nodes.push_back(q);
              rule.weights.push_back(wt);
            }
          }
        }
      }
    }
  }
  rule.cell_size = h_max;
  rule.k_resolved = g * 2.0 * kPi / (ppw * h_max);
  return rule;
}

template <class F>
auto integrate(const ApertureRule& rule, F&& f) {
  using R = decltype(f(rule.nodes[0]) * 1.0);
  std::vector<R> terms(rule.size());
  for (std::size_t n = 0; n < rule.size(); ++n) terms[n] = rule.weights[n] * f(rule.nodes[n]);
  return pairwise_sum(terms);
}

}  // namespace helios
