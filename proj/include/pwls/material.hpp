#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "pwls/geometry.hpp"
#include "pwls/mesh.hpp"

namespace pwls {

struct EpsilonRegion {
  Box box;
  cplx value;
};

// Either one global permittivity or a list of axis-aligned regions. Elements
// take the value of the first region containing their center.
struct EpsilonSpec {
  std::variant<cplx, std::vector<EpsilonRegion>> data = cplx{1.0, 0.0};

  static EpsilonSpec constant(cplx eps) { return EpsilonSpec{eps}; }
  static EpsilonSpec regions(std::vector<EpsilonRegion> r) { return EpsilonSpec{std::move(r)}; }

  bool is_constant() const { return std::holds_alternative<cplx>(data); }
};

enum class Variant { new_pwls, old_pwls };

inline const char* to_string(Variant v) { return v == Variant::new_pwls ? "new" : "old"; }

struct PenaltyWeights {
  double delta = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double theta = 0.0;
};

class MaterialField {
 public:
  MaterialField(double mu, std::vector<cplx> eps) : mu_(mu), eps_(std::move(eps)) {
    if (!(mu > 0.0)) throw Error("material: mu must be positive");
    if (eps_.empty()) throw Error("material: no elements");
    eps_abs_max_ = 0.0;
    eps_abs_min_ = std::abs(eps_.front());
    for (size_t k = 0; k < eps_.size(); ++k) {
      const double a = std::abs(eps_[k]);
      if (!(a > 0.0)) throw Error("material: epsilon vanishes on element " + std::to_string(k));
      eps_abs_max_ = std::max(eps_abs_max_, a);
      eps_abs_min_ = std::min(eps_abs_min_, a);
    }
  }

  static MaterialField from_spec(const Mesh& mesh, const EpsilonSpec& spec, double mu = 1.0) {
    std::vector<cplx> eps(static_cast<size_t>(mesh.num_elements()));
    if (spec.is_constant()) {
      std::fill(eps.begin(), eps.end(), std::get<cplx>(spec.data));
    } else {
      const auto& regions = std::get<std::vector<EpsilonRegion>>(spec.data);
      for (const auto& e : mesh.elements()) {
        auto it = std::find_if(regions.begin(), regions.end(),
                               [&](const EpsilonRegion& r) { return r.box.contains(e.center); });
        if (it == regions.end()) {
          throw Error("material: element " + std::to_string(e.index) + " (center " +
                      std::to_string(e.center.x()) + ", " + std::to_string(e.center.y()) + ", " +
                      std::to_string(e.center.z()) + ") is not covered by any epsilon region");
        }
        eps[static_cast<size_t>(e.index)] = it->value;
      }
    }
    return MaterialField(mu, std::move(eps));
  }

  double mu() const { return mu_; }
  int size() const { return static_cast<int>(eps_.size()); }
  double eps_abs_max() const { return eps_abs_max_; }
  double eps_abs_min() const { return eps_abs_min_; }
  bool is_homogeneous() const {
    return std::all_of(eps_.begin(), eps_.end(), [&](cplx e) { return e == eps_.front(); });
  }

  cplx epsilon(int k) const {
    if (k < 0 || k >= size()) throw Error("material: element index " + std::to_string(k) + " out of range");
    return eps_[static_cast<size_t>(k)];
  }

  // Boundary impedance sigma = sqrt(mu/|eps_k|).
  double sigma(int k) const { return std::sqrt(mu_ / std::abs(epsilon(k))); }

 private:
  double mu_;
  std::vector<cplx> eps_;
  double eps_abs_max_ = 0.0;
  double eps_abs_min_ = 0.0;
};

inline cplx epsilon_of(const MaterialField& field, int k) { return field.epsilon(k); }

/// Element wavenumber omega*sqrt(mu*eps_k) on the principal branch; for eps
/// with positive real and imaginary parts both parts of kappa are positive.
inline cplx kappa_of(const MaterialField& field, int k, double omega) {
  if (!(omega > 0.0)) throw Error("material: omega must be positive");
  const cplx eps = field.epsilon(k);
  return omega * std::sqrt(field.mu() * eps);
}

inline PenaltyWeights penalty_parameters(const MaterialField& field, Variant variant) {
  const double emax = field.eps_abs_max();
  const double emin = field.eps_abs_min();
  // |eps|max^4/|eps|min^4, |eps|max^4/|eps|min^5, |eps|max^2/|eps|min^4 written
  // through the contrast ratio so the homogeneous case reduces to 1, 1/|eps|,
  // 1/|eps|^2 without rounding drift.
  const double r = emax / emin;
  const double r2 = r * r;
  PenaltyWeights w;
  w.delta = r2 * r2;
  w.alpha = w.delta;
  w.beta = r2 * r2 / emin;
  w.theta = variant == Variant::new_pwls ? r2 / (emin * emin) : 0.0;
  return w;
}

}  // namespace pwls
