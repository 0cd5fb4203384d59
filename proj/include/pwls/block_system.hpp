#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "pwls/geometry.hpp"

namespace pwls {

// Upper-triangular block of the global matrix coupling element `row` (test
// side) with element `col` (trial side), row < col. The mirrored block is its
// conjugate transpose and is never stored.
struct OffDiagonalBlock {
  int row = 0;
  int col = 0;
  CMatrix block;
};

// Block-sparse Hermitian system over N elements with `block_size` unknowns
// each; unknown (k, l) has global index k*block_size + l.
class HermitianBlockSystem {
 public:
  HermitianBlockSystem() = default;
  HermitianBlockSystem(int num_elements, int block_size)
      : n_(num_elements), m_(block_size), diag_(static_cast<size_t>(num_elements)),
        rhs_(CVector::Zero(static_cast<Eigen::Index>(num_elements) * block_size)) {
    for (auto& d : diag_) d = CMatrix::Zero(m_, m_);
  }

  int num_elements() const { return n_; }
  int block_size() const { return m_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(n_) * m_; }

  CMatrix& diagonal(int k) { return diag_[static_cast<size_t>(k)]; }
  const CMatrix& diagonal(int k) const { return diag_[static_cast<size_t>(k)]; }
  std::vector<OffDiagonalBlock>& off_diagonal() { return off_; }
  const std::vector<OffDiagonalBlock>& off_diagonal() const { return off_; }
  CVector& rhs() { return rhs_; }
  const CVector& rhs() const { return rhs_; }

  auto segment(CVector& v, int k) const { return v.segment(static_cast<Eigen::Index>(k) * m_, m_); }
  auto segment(const CVector& v, int k) const { return v.segment(static_cast<Eigen::Index>(k) * m_, m_); }

  CVector apply(const CVector& x) const {
    if (x.size() != dimension()) throw Error("block system: vector length mismatch");
    CVector y = CVector::Zero(dimension());
    for (int k = 0; k < n_; ++k) segment(y, k).noalias() += diagonal(k) * segment(x, k);
    for (const auto& b : off_) {
      segment(y, b.row).noalias() += b.block * segment(x, b.col);
      segment(y, b.col).noalias() += b.block.adjoint() * segment(x, b.row);
    }
    return y;
  }

  CMatrix to_dense() const {
    CMatrix A = CMatrix::Zero(dimension(), dimension());
    for (int k = 0; k < n_; ++k)
      A.block(static_cast<Eigen::Index>(k) * m_, static_cast<Eigen::Index>(k) * m_, m_, m_) = diagonal(k);
    for (const auto& b : off_) {
      A.block(static_cast<Eigen::Index>(b.row) * m_, static_cast<Eigen::Index>(b.col) * m_, m_, m_) += b.block;
      A.block(static_cast<Eigen::Index>(b.col) * m_, static_cast<Eigen::Index>(b.row) * m_, m_, m_) +=
          b.block.adjoint();
    }
    return A;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& d : diag_) s += d.squaredNorm();
    for (const auto& b : off_) s += 2.0 * b.block.squaredNorm();
    return std::sqrt(s);
  }

  double max_abs_diagonal() const {
    double m = 0.0;
    for (const auto& d : diag_) m = std::max(m, d.diagonal().cwiseAbs().maxCoeff());
    return m;
  }

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<CMatrix> diag_;
  std::vector<OffDiagonalBlock> off_;
  CVector rhs_;
};

}  // namespace pwls
