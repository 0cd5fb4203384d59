#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>

#include "pwls/block_system.hpp"
#include "pwls/cholmod_factor.hpp"

namespace pwls {

enum class SolveMethod { direct, pcg };

struct SolveOptions {
  SolveMethod method = SolveMethod::direct;
  double pcg_tol = 1e-10;
  int pcg_max_iter = 5000;
  double reg_initial = 1e-12;
  double reg_max = 1e-6;
};

struct SolveReport {
  CVector X;
  double relative_residual = 0.0;
  int iterations = 0;
  double regularization_used = 0.0;  // shift relative to max |diag|, 0 if none
};

/// ||A X - b|| / max(||b||, tiny)
inline double residual_norm(const HermitianBlockSystem& sys, const CVector& X) {
  const double bn = sys.rhs().norm();
  return (sys.apply(X) - sys.rhs()).norm() / std::max(bn, std::numeric_limits<double>::min());
}

namespace detail {

inline SolveReport solve_direct(const HermitianBlockSystem& sys, const SolveOptions& opts) {
  CholmodFactor factor(sys);
  SolveReport rep;
  if (!factor.factorize(0.0)) {
    const double dmax = sys.max_abs_diagonal();
    double tau = opts.reg_initial;
    bool ok = false;
    while (tau <= opts.reg_max * (1.0 + 1e-12)) {
      if (factor.factorize(tau * dmax)) {
        ok = true;
        break;
      }
      tau *= 2.0;
    }
    if (!ok) {
      std::ostringstream os;
      os << "solver: Hermitian factorization failed; final relative shift " << tau / 2.0 << " (absolute "
         << tau / 2.0 * dmax << ")";
      throw Error(os.str());
    }
    rep.regularization_used = tau;
  }
  rep.X = factor.solve(sys.rhs());
  return rep;
}

// Block-Jacobi preconditioned conjugate gradients.
inline SolveReport solve_pcg(const HermitianBlockSystem& sys, const SolveOptions& opts) {
  const int N = sys.num_elements();
  const int m = sys.block_size();
  std::vector<Eigen::LLT<CMatrix>> precond(static_cast<size_t>(N));
  double max_reg = 0.0;
  for (int k = 0; k < N; ++k) {
    const CMatrix& D = sys.diagonal(k);
    const double dmax = D.diagonal().cwiseAbs().maxCoeff();
    auto& llt = precond[static_cast<size_t>(k)];
    llt.compute(D);
    double tau = opts.reg_initial;
    while (llt.info() != Eigen::Success) {
      if (tau > opts.reg_max * (1.0 + 1e-12))
        throw Error("solver: diagonal block " + std::to_string(k) + " not invertible up to relative shift " +
                    std::to_string(opts.reg_max));
      llt.compute(D + CMatrix::Identity(m, m) * (tau * std::max(dmax, 1e-300)));
      max_reg = std::max(max_reg, tau);
      tau *= 2.0;
    }
  }
  auto apply_precond = [&](const CVector& r) {
    CVector z(r.size());
    for (int k = 0; k < N; ++k) sys.segment(z, k) = precond[static_cast<size_t>(k)].solve(sys.segment(r, k));
    return z;
  };

  const CVector& b = sys.rhs();
  const double bn = b.norm();
  SolveReport rep;
  rep.regularization_used = max_reg;
  CVector x = CVector::Zero(sys.dimension());
  CVector r = b;
  CVector z = apply_precond(r);
  CVector p = z;
  cplx rz = r.dot(z);
  std::vector<double> history;
  for (int it = 1; it <= opts.pcg_max_iter; ++it) {
    const CVector Ap = sys.apply(p);
    const cplx alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    const double rel = r.norm() / bn;
    history.push_back(rel);
    if (rel <= opts.pcg_tol) {
      rep.X = std::move(x);
      rep.iterations = it;
      return rep;
    }
    z = apply_precond(r);
    const cplx rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  std::ostringstream os;
  os << "solver: PCG did not reach " << opts.pcg_tol << " in " << opts.pcg_max_iter << " iterations; residuals";
  for (size_t i : {size_t{0}, history.size() / 4, history.size() / 2, 3 * history.size() / 4, history.size() - 1})
    if (i < history.size()) os << " [" << i + 1 << "] " << history[i];
  throw Error(os.str());
}

}  // namespace detail

inline SolveReport solve(const HermitianBlockSystem& sys, const SolveOptions& opts = {}) {
  if (!(opts.pcg_tol > 0.0) || !(opts.reg_initial > 0.0) || opts.reg_initial > opts.reg_max)
    throw Error("solver: invalid options");
  SolveReport rep;
  if (sys.rhs().norm() == 0.0) {
    rep.X = CVector::Zero(sys.dimension());
  } else if (opts.method == SolveMethod::direct) {
    rep = detail::solve_direct(sys, opts);
  } else {
    rep = detail::solve_pcg(sys, opts);
  }
  rep.relative_residual = residual_norm(sys, rep.X);
  return rep;
}

}  // namespace pwls
