#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pwls/geometry.hpp"
#include "pwls/mesh.hpp"

namespace pwls {

struct QuadPoint {
  Vec3 x;
  double w;
};

struct QuadRule {
  int n1d = 0;
  std::vector<QuadPoint> points;
};

namespace detail {
// (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}
}  // namespace detail

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration from the
// Chebyshev-like initial guesses.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error("quadrature: need at least one point");
  nodes.assign(static_cast<size_t>(n), 0.0);
  weights.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, dpn] = detail::legendre(n, x);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dpn = detail::legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    nodes[static_cast<size_t>(i)] = -x;
    nodes[static_cast<size_t>(n - 1 - i)] = x;
    weights[static_cast<size_t>(i)] = w;
    weights[static_cast<size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<size_t>(n / 2)] = 0.0;
}

/// Tensor Gauss-Legendre rule on an axis-aligned square face, weights summing
/// to the face area.
inline QuadRule face_quadrature(const Face& face, int n1d) {
  std::vector<double> t, w;
  gauss_legendre(n1d, t, w);
  const Vec3 lo = face.corners[0];
  const Vec3 hi = face.corners[2];
  const int a1 = (face.axis + 1) % 3;
  const int a2 = (face.axis + 2) % 3;
  const double len1 = hi[a1] - lo[a1];
  const double len2 = hi[a2] - lo[a2];
  QuadRule rule;
  rule.n1d = n1d;
  rule.points.reserve(static_cast<size_t>(n1d * n1d));
  for (int i = 0; i < n1d; ++i)
    for (int j = 0; j < n1d; ++j) {
      Vec3 x = lo;
      x[a1] = lo[a1] + 0.5 * len1 * (t[static_cast<size_t>(i)] + 1.0);
      x[a2] = lo[a2] + 0.5 * len2 * (t[static_cast<size_t>(j)] + 1.0);
      rule.points.push_back({x, 0.25 * face.area * w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)]});
    }
  return rule;
}

// Tensor rule on a box (used for volume error integrals).
inline QuadRule box_quadrature(const Box& box, int n1d) {
  std::vector<double> t, w;
  gauss_legendre(n1d, t, w);
  const Vec3 ext = box.extent();
  const double scale = box.volume() / 8.0;
  QuadRule rule;
  rule.n1d = n1d;
  rule.points.reserve(static_cast<size_t>(n1d) * n1d * n1d);
  for (int i = 0; i < n1d; ++i)
    for (int j = 0; j < n1d; ++j)
      for (int k = 0; k < n1d; ++k) {
        const Vec3 ref(t[static_cast<size_t>(i)], t[static_cast<size_t>(j)], t[static_cast<size_t>(k)]);
        const Vec3 x = box.min_corner + 0.5 * ext.cwiseProduct(ref + Vec3::Ones());
        rule.points.push_back(
            {x, scale * w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)] * w[static_cast<size_t>(k)]});
      }
  return rule;
}

/// Points per direction for face integrals: enough for the polynomial degree
/// implied by q and for the oscillation |kappa| h across a face, capped at 32.
/// The +4 (rather than +3) keeps doubled-order changes below 1e-8 at q=3, h=1/4.
inline int default_quadrature_order(int q, double kappa_max_abs, double h) {
  const int osc = static_cast<int>(std::ceil(kappa_max_abs * h / 2.0)) + 4;
  return std::min(32, std::max(q + 2, osc));
}

}  // namespace pwls
