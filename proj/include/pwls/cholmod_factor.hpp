#pragma once

#include <cholmod.h>

#include <algorithm>
#include <complex>
#include <vector>

#include "pwls/block_system.hpp"

namespace pwls {

// RAII handle around a CHOLMOD (LL^H) factorization of the upper triangle of
// a HermitianBlockSystem. Not copyable; one factorization at a time.
class CholmodFactor {
 public:
  explicit CholmodFactor(const HermitianBlockSystem& sys) : block_size_(sys.block_size()) {
    cholmod_l_start(&common_);
    common_.print = 0;
    common_.supernodal = CHOLMOD_SUPERNODAL;
    A_ = upper_csc(sys);
  }

  ~CholmodFactor() {
    if (L_) cholmod_l_free_factor(&L_, &common_);
    if (A_) cholmod_l_free_sparse(&A_, &common_);
    cholmod_l_finish(&common_);
  }

  CholmodFactor(const CholmodFactor&) = delete;
  CholmodFactor& operator=(const CholmodFactor&) = delete;

  // Factorizes A + shift*I; false if the matrix is not numerically positive
  // definite.
  bool factorize(double shift = 0.0) {
    if (!L_) {
      L_ = cholmod_l_analyze(A_, &common_);
      if (!L_) throw Error("cholmod: symbolic analysis failed (status " + std::to_string(common_.status) + ")");
    }
    double beta[2] = {shift, 0.0};
    const int ok = cholmod_l_factorize_p(A_, beta, nullptr, 0, L_, &common_);
    if (common_.status == CHOLMOD_OUT_OF_MEMORY) throw Error("cholmod: out of memory during factorization");
    return ok && common_.status == CHOLMOD_OK && L_->minor == L_->n;
  }

  CVector solve(const CVector& b) {
    cholmod_dense* B = cholmod_l_allocate_dense(b.size(), 1, b.size(), CHOLMOD_COMPLEX, &common_);
    std::copy(b.data(), b.data() + b.size(), static_cast<std::complex<double>*>(B->x));
    cholmod_dense* X = cholmod_l_solve(CHOLMOD_A, L_, B, &common_);
    cholmod_l_free_dense(&B, &common_);
    if (!X) throw Error("cholmod: solve failed");
    CVector x(b.size());
    const auto* xp = static_cast<const std::complex<double>*>(X->x);
    std::copy(xp, xp + b.size(), x.data());
    cholmod_l_free_dense(&X, &common_);
    return x;
  }

  // Dense P^T L L^H P of the current factorization; for verification on small
  // systems.
  CMatrix reconstruct_dense() {
    cholmod_factor* F = cholmod_l_copy_factor(L_, &common_);
    cholmod_l_change_factor(CHOLMOD_COMPLEX, 1, 0, 1, 1, F, &common_);
    cholmod_sparse* Ls = cholmod_l_factor_to_sparse(F, &common_);
    const auto n = static_cast<Eigen::Index>(Ls->nrow);
    CMatrix L = CMatrix::Zero(n, n);
    const auto* cp = static_cast<const SuiteSparse_long*>(Ls->p);
    const auto* ri = static_cast<const SuiteSparse_long*>(Ls->i);
    const auto* vx = static_cast<const std::complex<double>*>(Ls->x);
    for (Eigen::Index j = 0; j < n; ++j)
      for (SuiteSparse_long k = cp[j]; k < cp[j + 1]; ++k) L(ri[k], j) = vx[k];
    const auto* perm = static_cast<const SuiteSparse_long*>(F->Perm);
    const CMatrix LLh = L * L.adjoint();
    CMatrix A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) A(perm[i], perm[j]) = LLh(i, j);
    cholmod_l_free_sparse(&Ls, &common_);
    cholmod_l_free_factor(&F, &common_);
    return A;
  }

  size_t factor_nonzeros() const {
    if (!L_) return 0;
    return L_->is_super ? L_->xsize : static_cast<size_t>(L_->nzmax);
  }

 private:
  cholmod_sparse* upper_csc(const HermitianBlockSystem& sys) {
    const int N = sys.num_elements();
    const int m = block_size_;
    const auto& off = sys.off_diagonal();
    std::vector<std::vector<size_t>> by_col(static_cast<size_t>(N));
    for (size_t b = 0; b < off.size(); ++b) by_col[static_cast<size_t>(off[b].col)].push_back(b);
    for (auto& v : by_col)
      std::sort(v.begin(), v.end(), [&](size_t a, size_t b) { return off[a].row < off[b].row; });

    size_t nnz = static_cast<size_t>(N) * m * (m + 1) / 2 + off.size() * m * m;
    const auto dim = static_cast<size_t>(sys.dimension());
    cholmod_sparse* A = cholmod_l_allocate_sparse(dim, dim, nnz, 1, 1, 1, CHOLMOD_COMPLEX, &common_);
    if (!A) throw Error("cholmod: cannot allocate matrix with " + std::to_string(nnz) + " entries");
    auto* cp = static_cast<SuiteSparse_long*>(A->p);
    auto* ri = static_cast<SuiteSparse_long*>(A->i);
    auto* vx = static_cast<std::complex<double>*>(A->x);
    SuiteSparse_long pos = 0;
    for (int kc = 0; kc < N; ++kc) {
      for (int a = 0; a < m; ++a) {
        cp[static_cast<size_t>(kc) * m + a] = pos;
        for (size_t b : by_col[static_cast<size_t>(kc)]) {
          const auto& blk = off[b];
          for (int r = 0; r < m; ++r) {
            ri[pos] = static_cast<SuiteSparse_long>(blk.row) * m + r;
            vx[pos++] = blk.block(r, a);
          }
        }
        const CMatrix& D = sys.diagonal(kc);
        for (int r = 0; r <= a; ++r) {
          ri[pos] = static_cast<SuiteSparse_long>(kc) * m + r;
          vx[pos++] = D(r, a);
        }
      }
    }
    cp[dim] = pos;
    return A;
  }

  int block_size_;
  cholmod_common common_{};
  cholmod_sparse* A_ = nullptr;
  cholmod_factor* L_ = nullptr;
};

}  // namespace pwls
