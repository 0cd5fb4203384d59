#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "pwls/block_system.hpp"
#include "pwls/material.hpp"
#include "pwls/mesh.hpp"
#include "pwls/planewave.hpp"
#include "pwls/quadrature.hpp"

namespace pwls {

/// Boundary datum g(x) on a boundary face with outward normal n, adjacent to
/// `element`.
using BoundaryData = std::function<CVec3(const Vec3& x, const Vec3& n, int element)>;

/// Interface terms: `general` is the weighted sum of the tangential, magnetic
/// and normal (eps E.n) jumps. `combined` replaces the tangential and normal
/// jumps by the full jump |[[F]]|^2 (weight alpha); valid for homogeneous
/// media with alpha = theta |eps|^2.
enum class JumpForm { general, combined };

struct TraceQuantities {
  CVec3 e_cross_n;    // E x n
  CVec3 psi_cross_n;  // (1/(i omega mu)) (curl E) x n
  CVec3 phi_cross_n;  // sigma/(i omega mu) ((curl E) x n) x n
  cplx eps_e_dot_n;   // eps (E . n)
};

inline TraceQuantities trace_quantities(const CVec3& E, const CVec3& curlE, const Vec3& n, double omega,
                                        double mu, double sigma, cplx eps) {
  const cplx inv_iwm = 1.0 / (I_unit * omega * mu);
  const CVec3 curl_x_n = cross(curlE, n);
  TraceQuantities t;
  t.e_cross_n = cross(E, n);
  t.psi_cross_n = inv_iwm * curl_x_n;
  t.phi_cross_n = (sigma * inv_iwm) * cross(curl_x_n, n);
  t.eps_e_dot_n = eps * dot(E, n);
  return t;
}

namespace detail {

inline void check_bases(const MaterialField& field, const std::vector<PWBasis>& bases) {
  if (static_cast<int>(bases.size()) != field.size())
    throw Error("assembly: one basis per element required");
  for (const auto& b : bases)
    if (b.size() != bases.front().size())
      throw Error("assembly: inconsistent basis count on element " + std::to_string(b.element()));
}

// D += S^H S, written to the lower triangle only.
inline void add_gram(CMatrix& D, const CMatrix& S) { D.selfadjointView<Eigen::Lower>().rankUpdate(S.adjoint()); }

// Rows of the weighted boundary residual -E x n + Phi(E) x n for each basis
// function (columns), three rows per quadrature point.
inline CMatrix boundary_rows(const PWBasis& basis, const QuadRule& rule, const Vec3& n, double omega,
                             double sigma, double scale) {
  const int m = basis.size();
  const Eigen::Index npts = static_cast<Eigen::Index>(rule.points.size());
  CMatrix R(3 * npts, m);
  const cplx c_phi = sigma / (I_unit * omega * basis.mu());
  CMatrix3X E, C;
  for (Eigen::Index qp = 0; qp < npts; ++qp) {
    const auto& pt = rule.points[static_cast<size_t>(qp)];
    basis.eval_all(pt.x, E, &C);
    const double sw = std::sqrt(scale * pt.w);
    for (int a = 0; a < m; ++a) {
      const CVec3 r = -cross(E.col(a), n) + c_phi * cross(cross(C.col(a), n), n);
      R.block<3, 1>(3 * qp, a) = sw * r;
    }
  }
  return R;
}

// Rows of all weighted interface jump terms for one side of an interior face;
// `sign` is +1 for the owner and -1 for the neighbour (n_j = -n_l).
inline CMatrix interface_rows(const PWBasis& basis, cplx eps, const QuadRule& rule, const Vec3& n_owner,
                              double sign, double omega, const PenaltyWeights& w, JumpForm form) {
  const int m = basis.size();
  const Eigen::Index npts = static_cast<Eigen::Index>(rule.points.size());
  const bool with_theta = form == JumpForm::general && w.theta > 0.0;
  const Eigen::Index per_point = form == JumpForm::combined ? 6 : (with_theta ? 7 : 6);
  CMatrix S(per_point * npts, m);
  const cplx inv_iwm = 1.0 / (I_unit * omega * basis.mu());
  CMatrix3X E, C;
  for (Eigen::Index qp = 0; qp < npts; ++qp) {
    const auto& pt = rule.points[static_cast<size_t>(qp)];
    basis.eval_all(pt.x, E, &C);
    const double sa = sign * std::sqrt(w.alpha * pt.w);
    const double sb = sign * std::sqrt(w.beta * pt.w);
    const double st = sign * std::sqrt(w.theta * pt.w);
    const Eigen::Index r0 = per_point * qp;
    for (int a = 0; a < m; ++a) {
      const CVec3 e = E.col(a);
      if (form == JumpForm::combined) {
        S.block<3, 1>(r0, a) = sa * e;
      } else {
        S.block<3, 1>(r0, a) = sa * cross(e, n_owner);
      }
      S.block<3, 1>(r0 + 3, a) = (sb * inv_iwm) * cross(C.col(a), n_owner);
      if (with_theta) S(r0 + 6, a) = st * eps * dot(e, n_owner);
    }
  }
  return S;
}

}  // namespace detail

/// Assembles the least-squares normal equations: one Hermitian diagonal block
/// per element, one upper off-diagonal block per interior face (in face id
/// order) and the right-hand side from g.
inline HermitianBlockSystem assemble_system(const Mesh& mesh, const MaterialField& field,
                                            const std::vector<PWBasis>& bases, double omega,
                                            const PenaltyWeights& weights, const BoundaryData& g, int n1d,
                                            JumpForm form = JumpForm::general) {
  detail::check_bases(field, bases);
  if (field.size() != mesh.num_elements()) throw Error("assembly: material/mesh size mismatch");
  if (form == JumpForm::combined && !field.is_homogeneous())
    throw Error("assembly: combined jump form requires homogeneous epsilon");
  const int m = bases.front().size();
  HermitianBlockSystem sys(mesh.num_elements(), m);

  for (const Face& f : mesh.boundary_faces()) {
    const QuadRule rule = face_quadrature(f, n1d);
    const PWBasis& basis = bases[static_cast<size_t>(f.owner)];
    const CMatrix R = detail::boundary_rows(basis, rule, f.normal, omega, field.sigma(f.owner), weights.delta);
    detail::add_gram(sys.diagonal(f.owner), R);
    if (g) {
      CVector G(R.rows());
      for (size_t qp = 0; qp < rule.points.size(); ++qp) {
        const auto& pt = rule.points[qp];
        G.segment<3>(3 * static_cast<Eigen::Index>(qp)) = std::sqrt(weights.delta * pt.w) * g(pt.x, f.normal, f.owner);
      }
      sys.segment(sys.rhs(), f.owner).noalias() += R.adjoint() * G;
    }
  }

  auto& off = sys.off_diagonal();
  off.reserve(mesh.interior_faces().size());
  for (const Face& f : mesh.interior_faces()) {
    const int l = f.owner;
    const int j = *f.neighbor;
    const QuadRule rule = face_quadrature(f, n1d);
    const CMatrix Sl = detail::interface_rows(bases[static_cast<size_t>(l)], field.epsilon(l), rule, f.normal,
                                              +1.0, omega, weights, form);
    const CMatrix Sj = detail::interface_rows(bases[static_cast<size_t>(j)], field.epsilon(j), rule, f.normal,
                                              -1.0, omega, weights, form);
    detail::add_gram(sys.diagonal(l), Sl);
    detail::add_gram(sys.diagonal(j), Sj);
    off.push_back({l, j, Sl.adjoint() * Sj});
  }

  for (int k = 0; k < sys.num_elements(); ++k) {
    CMatrix& D = sys.diagonal(k);
    for (int a = 0; a < m; ++a) D(a, a) = D(a, a).real();
    const CMatrix full = D.selfadjointView<Eigen::Lower>();
    D = full;
  }
  return sys;
}

/// Least-squares functional evaluated by direct quadrature of the residuals
/// of the field with coefficients `coeffs` (independent of the assembled
/// matrix).
inline double functional_J(const CVector& coeffs, const Mesh& mesh, const MaterialField& field,
                           const std::vector<PWBasis>& bases, double omega, const PenaltyWeights& w,
                           const BoundaryData& g, int n1d) {
  detail::check_bases(field, bases);
  const int m = bases.front().size();
  if (coeffs.size() != static_cast<Eigen::Index>(m) * field.size()) throw Error("functional: coefficient length");
  auto field_at = [&](int k, const Vec3& x, CVec3& E, CVec3& C) {
    const PWBasis& b = bases[static_cast<size_t>(k)];
    E.setZero();
    C.setZero();
    for (int a = 0; a < m; ++a) {
      const cplx c = coeffs[static_cast<Eigen::Index>(k) * m + a];
      E += c * b.eval_E(a, x);
      C += c * b.eval_curl_E(a, x);
    }
  };
  const double mu = field.mu();
  double J = 0.0;
  CVec3 E, C, E2, C2;
  for (const Face& f : mesh.boundary_faces()) {
    for (const auto& pt : face_quadrature(f, n1d).points) {
      field_at(f.owner, pt.x, E, C);
      const auto t = trace_quantities(E, C, f.normal, omega, mu, field.sigma(f.owner), field.epsilon(f.owner));
      CVec3 r = -t.e_cross_n + t.phi_cross_n;
      if (g) r -= g(pt.x, f.normal, f.owner);
      J += w.delta * pt.w * r.squaredNorm();
    }
  }
  for (const Face& f : mesh.interior_faces()) {
    const int l = f.owner, j = *f.neighbor;
    for (const auto& pt : face_quadrature(f, n1d).points) {
      field_at(l, pt.x, E, C);
      field_at(j, pt.x, E2, C2);
      const auto tl = trace_quantities(E, C, f.normal, omega, mu, 0.0, field.epsilon(l));
      const auto tj = trace_quantities(E2, C2, -f.normal, omega, mu, 0.0, field.epsilon(j));
      J += pt.w * (w.alpha * (tl.e_cross_n + tj.e_cross_n).squaredNorm() +
                   w.beta * (tl.psi_cross_n + tj.psi_cross_n).squaredNorm() +
                   w.theta * std::norm(tl.eps_e_dot_n + tj.eps_e_dot_n));
    }
  }
  return J;
}

/// delta * sum of boundary integrals of |g|^2 (the constant term of J).
inline double boundary_data_energy(const Mesh& mesh, const BoundaryData& g, double delta, int n1d) {
  double s = 0.0;
  if (!g) return s;
  for (const Face& f : mesh.boundary_faces())
    for (const auto& pt : face_quadrature(f, n1d).points) s += pt.w * g(pt.x, f.normal, f.owner).squaredNorm();
  return delta * s;
}

}  // namespace pwls
