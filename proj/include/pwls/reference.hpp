#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pwls/assembly.hpp"
#include "pwls/mesh.hpp"
#include "pwls/planewave.hpp"
#include "pwls/quadrature.hpp"

namespace pwls {

enum class FieldKind { dipole, trig, custom };

/// Analytic (or stored) electric field with its curl.
struct ExactField {
  std::function<CVec3(const Vec3&)> eval;
  std::function<CVec3(const Vec3&)> eval_curl;
  FieldKind kind = FieldKind::custom;
};

// Default moment is the normalized diagonal. a = e_z is the other natural
// choice but gives errors about half the size of the reference values.
struct DipoleParams {
  Vec3 x0{0.6, 0.6, 0.6};
  Vec3 a = Vec3::Ones().normalized();
  double current = 1.0;
  double omega = 4.0 * pi;
  cplx epsilon{1.0, 1.0};
  double mu = 1.0;
};

// Radiating field of a point dipole,
//   E = -i w I phi a + I/(i w mu eps) grad(grad phi . a),
//   phi = exp(i k r)/(4 pi r), k = w sqrt(mu eps),
// with curl E = -i w I grad phi x a (the gradient term is curl free).
inline std::pair<CVec3, CVec3> dipole_field(const Vec3& x, const DipoleParams& prm) {
  const Vec3 dx = x - prm.x0;
  const double r = dx.norm();
  if (!(r > 0.0)) throw Error("dipole: evaluation at the source point");
  const Vec3 u = dx / r;
  const cplx k = prm.omega * std::sqrt(prm.mu * prm.epsilon);
  const cplx ik = I_unit * k;
  const cplx phi = std::exp(ik * r) / (4.0 * pi * r);
  const cplx s = ik - 1.0 / r;
  const cplx dphi = phi * s;                           // phi'(r)
  const cplx d2phi = phi * (s * s + 1.0 / (r * r));    // phi''(r)
  // Hessian(phi) a = (phi'' - phi'/r)(u.a) u + (phi'/r) a
  const double ua = u.dot(prm.a);
  const CVec3 hess_a = ((d2phi - dphi / r) * ua) * to_complex(u) + (dphi / r) * to_complex(prm.a);
  const cplx c1 = -I_unit * prm.omega * prm.current;
  const cplx c2 = prm.current / (I_unit * prm.omega * prm.mu * prm.epsilon);
  const CVec3 E = c1 * phi * to_complex(prm.a) + c2 * hess_a;
  const CVec3 grad_phi = dphi * to_complex(u);
  const CVec3 curlE = c1 * cross(grad_phi, prm.a);
  return {E, curlE};
}

// E = (k x z cos(k y), -z sin(k y), -cos(k x)), k = w sqrt(mu eps).
inline std::pair<CVec3, CVec3> trig_field(const Vec3& x, double omega, cplx epsilon, double mu = 1.0) {
  const cplx k = omega * std::sqrt(mu * epsilon);
  const double X = x.x(), Y = x.y(), Z = x.z();
  const cplx cky = std::cos(k * Y), sky = std::sin(k * Y);
  const cplx ckx = std::cos(k * X), skx = std::sin(k * X);
  CVec3 E(k * X * Z * cky, -Z * sky, -ckx);
  CVec3 C(sky, k * X * cky - k * skx, k * k * X * Z * sky);
  return {E, C};
}

inline ExactField make_dipole(const DipoleParams& prm) {
  ExactField f;
  f.kind = FieldKind::dipole;
  f.eval = [prm](const Vec3& x) { return dipole_field(x, prm).first; };
  f.eval_curl = [prm](const Vec3& x) { return dipole_field(x, prm).second; };
  return f;
}

inline ExactField make_trig(double omega, cplx epsilon, double mu = 1.0) {
  ExactField f;
  f.kind = FieldKind::trig;
  f.eval = [=](const Vec3& x) { return trig_field(x, omega, epsilon, mu).first; };
  f.eval_curl = [=](const Vec3& x) { return trig_field(x, omega, epsilon, mu).second; };
  return f;
}

// One basis wave (index l of the q-direction set) as an exact field; it lies
// in the discrete space of any homogeneous mesh with the same q and kappa.
inline ExactField make_plane_wave(cplx kappa, double mu, int q, int l) {
  auto basis = std::make_shared<PWBasis>(0, kappa, mu, direction_set(q));
  if (l < 0 || l >= basis->size())
    throw Error("plane wave: index " + std::to_string(l) + " outside [0, " + std::to_string(basis->size()) + ")");
  ExactField f;
  f.eval = [basis, l](const Vec3& x) { return basis->eval_E(l, x); };
  f.eval_curl = [basis, l](const Vec3& x) { return basis->eval_curl_E(l, x); };
  return f;
}

/// Central-difference curl of f with step h.
inline CVec3 finite_difference_curl(const std::function<CVec3(const Vec3&)>& f, const Vec3& x, double h) {
  Eigen::Matrix3cd J;  // J(i, j) = d f_i / d x_j
  for (int j = 0; j < 3; ++j) {
    const Vec3 dx = h * Vec3::Unit(j);
    J.col(j) = (f(x + dx) - f(x - dx)) / (2.0 * h);
  }
  return CVec3(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1));
}

/// |curl curl E - w^2 mu eps E| / (w^2 |mu eps| |E|) at x, with curl curl E =
/// grad div E - lap E from second differences of E alone.
inline double maxwell_residual(const std::function<CVec3(const Vec3&)>& E, const Vec3& x, double omega, cplx eps,
                               double mu = 1.0, double h = 1e-4) {
  const CVec3 e0 = E(x);
  // H[j](i) = d^2 E_i / dx_j^2 ; mixed(i, j) = d^2 E_i / (dx_i dx_j)
  CVec3 lap = CVec3::Zero();
  CVec3 grad_div = CVec3::Zero();
  for (int j = 0; j < 3; ++j) {
    const Vec3 dj = h * Vec3::Unit(j);
    const CVec3 second = (E(x + dj) - 2.0 * e0 + E(x - dj)) / (h * h);
    lap += second;
    grad_div[j] += second[j];
    for (int i = 0; i < 3; ++i) {
      if (i == j) continue;
      const Vec3 di = h * Vec3::Unit(i);
      const cplx mixed = (E(x + di + dj)[i] - E(x + di - dj)[i] - E(x - di + dj)[i] + E(x - di - dj)[i]) / (4.0 * h * h);
      grad_div[j] += mixed;
    }
  }
  const cplx k2 = omega * omega * mu * eps;
  const double scale = std::abs(k2) * e0.norm();
  if (!(scale > 0.0)) throw Error("maxwell_residual: field vanishes at the sample point");
  return (grad_div - lap - k2 * e0).norm() / scale;
}

/// g = -E x n + sigma/(i w mu) ((curl E) x n) x n
inline CVec3 impedance_trace_g(const ExactField& exact, const Vec3& x, const Vec3& n, double omega, double mu,
                               double sigma) {
  const CVec3 E = exact.eval(x);
  const CVec3 C = exact.eval_curl(x);
  return -cross(E, n) + (sigma / (I_unit * omega * mu)) * cross(cross(C, n), n);
}

/// Boundary data generated by an exact field, sigma taken from the adjacent
/// element.
inline BoundaryData boundary_data_from(const ExactField& exact, const MaterialField& field, double omega) {
  return [exact, &field, omega](const Vec3& x, const Vec3& n, int k) {
    return impedance_trace_g(exact, x, n, omega, field.mu(), field.sigma(k));
  };
}

// Piecewise plane-wave field E_h given by coefficients on a mesh.
class DiscreteField {
 public:
  DiscreteField(const Mesh& mesh, const std::vector<PWBasis>& bases, const CVector& X)
      : mesh_(&mesh), bases_(&bases), X_(&X) {
    const auto m = static_cast<Eigen::Index>(bases.front().size());
    if (X.size() != m * mesh.num_elements()) throw Error("discrete field: coefficient length mismatch");
  }

  CVec3 eval_on(int k, const Vec3& x) const {
    const PWBasis& b = (*bases_)[static_cast<size_t>(k)];
    const auto m = static_cast<Eigen::Index>(b.size());
    return b.combine(X_->segment(k * m, m), x);
  }

  CVec3 curl_on(int k, const Vec3& x) const {
    const PWBasis& b = (*bases_)[static_cast<size_t>(k)];
    const auto m = static_cast<Eigen::Index>(b.size());
    CVec3 out = CVec3::Zero();
    for (int l = 0; l < b.size(); ++l) out += (*X_)[k * m + l] * b.eval_curl_E(l, x);
    return out;
  }

  CVec3 eval(const Vec3& x) const { return eval_on(mesh_->locate(x), x); }

 private:
  const Mesh* mesh_;
  const std::vector<PWBasis>* bases_;
  const CVector* X_;
};

/// ||E_ex - E_h||_{L2} / ||E_ex||_{L2} with an n1d^3 Gauss rule per element.
inline double relative_l2_error(const Mesh& mesh, const CVector& X, const std::vector<PWBasis>& bases,
                                const ExactField& exact, int n1d) {
  const DiscreteField Eh(mesh, bases, X);
  double num = 0.0, den = 0.0;
  for (const auto& el : mesh.elements()) {
    for (const auto& pt : box_quadrature(el.bounds, n1d).points) {
      const CVec3 e = exact.eval(pt.x);
      num += pt.w * (e - Eh.eval_on(el.index, pt.x)).squaredNorm();
      den += pt.w * e.squaredNorm();
    }
  }
  if (!(den > 0.0)) throw Error("relative_l2_error: exact field has zero norm");
  return std::sqrt(num / den);
}

/// Discrete relative error over mesh vertices; a vertex shared by several
/// elements uses E_h from the element with the smallest index.
inline double vertex_error(const Mesh& mesh, const CVector& X, const std::vector<PWBasis>& bases,
                           const ExactField& exact) {
  const DiscreteField Eh(mesh, bases, X);
  const int n = mesh.subdivisions();
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k) {
        const Vec3 v = mesh.lattice_point(i, j, k);
        const int owner = mesh.element_index(std::max(i - 1, 0), std::max(j - 1, 0), std::max(k - 1, 0));
        const CVec3 e = exact.eval(v);
        num += (e - Eh.eval_on(owner, v)).squaredNorm();
        den += e.squaredNorm();
      }
  if (!(den > 0.0)) throw Error("vertex_error: exact field vanishes at all vertices");
  return std::sqrt(num / den);
}

}  // namespace pwls
