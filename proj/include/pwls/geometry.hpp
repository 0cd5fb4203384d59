#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pwls {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cplx I_unit{0.0, 1.0};
inline constexpr double pi = 3.14159265358979323846;

/// Thrown for every recoverable failure in the library (bad input, failed
/// factorization, metadata mismatch, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Box {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Ones();

  Vec3 extent() const { return max_corner - min_corner; }
  Vec3 center() const { return 0.5 * (min_corner + max_corner); }
  double volume() const { return extent().prod(); }

  bool contains(const Vec3& x, double tol = 0.0) const {
    return (x.array() >= min_corner.array() - tol).all() &&
           (x.array() <= max_corner.array() + tol).all();
  }

  bool non_degenerate() const {
    return (max_corner.array() > min_corner.array()).all();
  }
};

inline CVec3 to_complex(const Vec3& v) { return v.cast<cplx>(); }

// Bilinear cross product. Eigen's MatrixBase::cross conjugates the result for
// complex scalars, which breaks every trace formula here.
template <class A, class B>
inline CVec3 cross(const A& a, const B& b) {
  return CVec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

// Bilinear dot product (no conjugation).
template <class A, class B>
inline cplx dot(const A& a, const B& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace pwls
