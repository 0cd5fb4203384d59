#pragma once

#include <cmath>
#include <vector>

#include "pwls/geometry.hpp"
#include "pwls/material.hpp"

namespace pwls {

using CMatrix3X = Eigen::Matrix<cplx, 3, Eigen::Dynamic>;

struct DirectionSet {
  int q = 0;
  int p = 0;
  std::vector<Vec3> directions;
};

/// p = (q+1)^2 unit directions on a staggered equal-area latitude grid:
/// polar cosines c_m = 1 - 2(m+1/2)/(q+1) and azimuths 2*pi*(n + m/2)/(q+1).
/// The poles are never hit.
inline DirectionSet direction_set(int q) {
  if (q < 1) throw Error("planewave: q must be >= 1 (q = " + std::to_string(q) + ")");
  DirectionSet set;
  set.q = q;
  set.p = (q + 1) * (q + 1);
  set.directions.reserve(static_cast<size_t>(set.p));
  const double m_count = q + 1;
  for (int m = 0; m <= q; ++m) {
    const double c = 1.0 - 2.0 * (m + 0.5) / m_count;
    const double s = std::sqrt(1.0 - c * c);
    for (int n = 0; n <= q; ++n) {
      const double phi = 2.0 * pi * (n + 0.5 * m) / m_count;
      set.directions.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
    }
  }
  return set;
}

/// Real unit vector orthogonal to d, built from the coordinate axis least
/// aligned with d (lowest axis index on ties).
inline Vec3 polarization(const Vec3& d) {
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(d[i]) < std::abs(d[axis])) axis = i;
  const Vec3 g = d.cross(Vec3::Unit(axis));
  return g / g.norm();
}

// The 2p plane waves sqrt(mu) F_l exp(i kappa d_l.x) living on one element.
// Entries l and l+p share (d_l, G_l) with F = G +- i G x d. Indices are
// zero-based here; global unknown of (k, l) is k*2p + l.
class PWBasis {
 public:
  PWBasis(int element, cplx kappa, double mu, const DirectionSet& dirs)
      : element_(element), kappa_(kappa), sqrt_mu_(std::sqrt(mu)) {
    const int p = dirs.p;
    d_.resize(static_cast<size_t>(2 * p));
    F_.resize(static_cast<size_t>(2 * p));
    for (int l = 0; l < p; ++l) {
      const Vec3& d = dirs.directions[static_cast<size_t>(l)];
      const Vec3 g = polarization(d);
      const CVec3 gc = to_complex(g);
      const CVec3 gxd = to_complex(g.cross(d));
      d_[static_cast<size_t>(l)] = d;
      d_[static_cast<size_t>(l + p)] = d;
      F_[static_cast<size_t>(l)] = gc + I_unit * gxd;
      F_[static_cast<size_t>(l + p)] = gc - I_unit * gxd;
    }
    dF_.resize(F_.size());
    for (size_t l = 0; l < F_.size(); ++l) dF_[l] = cross(d_[l], F_[l]);
  }

  int element() const { return element_; }
  cplx kappa() const { return kappa_; }
  double mu() const { return sqrt_mu_ * sqrt_mu_; }
  int size() const { return static_cast<int>(F_.size()); }
  const Vec3& direction(int l) const { return d_[static_cast<size_t>(l)]; }
  const CVec3& polarization_vector(int l) const { return F_[static_cast<size_t>(l)]; }

  cplx phase(int l, const Vec3& x) const {
    return std::exp(I_unit * kappa_ * d_[static_cast<size_t>(l)].dot(x));
  }

  CVec3 eval_E(int l, const Vec3& x) const {
    return sqrt_mu_ * phase(l, x) * F_[static_cast<size_t>(l)];
  }

  // curl of the plane wave: i kappa sqrt(mu) (d x F) exp(i kappa d.x)
  CVec3 eval_curl_E(int l, const Vec3& x) const {
    return (I_unit * kappa_ * sqrt_mu_ * phase(l, x)) * dF_[static_cast<size_t>(l)];
  }

  // All 2p values (and curls) at x as 3 x 2p column blocks.
  void eval_all(const Vec3& x, CMatrix3X& E, CMatrix3X* curlE = nullptr) const {
    const int m = size();
    E.resize(3, m);
    if (curlE) curlE->resize(3, m);
    const cplx ik = I_unit * kappa_;
    for (int l = 0; l < m; ++l) {
      const cplx ph = sqrt_mu_ * std::exp(ik * d_[static_cast<size_t>(l)].dot(x));
      E.col(l) = ph * F_[static_cast<size_t>(l)];
      if (curlE) curlE->col(l) = (ik * ph) * dF_[static_cast<size_t>(l)];
    }
  }

  // E_h(x) = sum_l coeffs[l] E_l(x)
  template <class Coeffs>
  CVec3 combine(const Coeffs& coeffs, const Vec3& x) const {
    CVec3 out = CVec3::Zero();
    for (int l = 0; l < size(); ++l) out += coeffs[l] * eval_E(l, x);
    return out;
  }

 private:
  int element_;
  cplx kappa_;
  double sqrt_mu_;
  std::vector<Vec3> d_;
  std::vector<CVec3> F_;
  std::vector<CVec3> dF_;
};

inline PWBasis basis_for_element(int k, int q, double omega, const MaterialField& field) {
  return PWBasis(k, kappa_of(field, k, omega), field.mu(), direction_set(q));
}

inline std::vector<PWBasis> build_bases(const MaterialField& field, int q, double omega) {
  const DirectionSet dirs = direction_set(q);
  std::vector<PWBasis> bases;
  bases.reserve(static_cast<size_t>(field.size()));
  for (int k = 0; k < field.size(); ++k)
    bases.emplace_back(k, kappa_of(field, k, omega), field.mu(), dirs);
  return bases;
}

}  // namespace pwls
