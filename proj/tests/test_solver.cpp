#include <random>

#include <gtest/gtest.h>

#include "pwls/assembly.hpp"
#include "pwls/reference.hpp"
#include "pwls/solver.hpp"

using namespace pwls;

namespace {

CVector random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector v(n);
  for (auto& z : v) z = {nd(rng), nd(rng)};
  return v;
}

// Dipole system on [-0.5,0.5]^3 with eps = 1+i.
HermitianBlockSystem dipole_system(int n, int q) {
  Mesh mesh(Box{Vec3::Constant(-0.5), Vec3::Constant(0.5)}, n);
  MaterialField field = MaterialField::from_spec(mesh, EpsilonSpec::constant({1, 1}));
  const double omega = 4 * pi;
  auto bases = build_bases(field, q, omega);
  DipoleParams prm;
  auto g = boundary_data_from(make_dipole(prm), field, omega);
  const int n1d = default_quadrature_order(q, std::abs(kappa_of(field, 0, omega)), mesh.h());
  return assemble_system(mesh, field, bases, omega, penalty_parameters(field, Variant::new_pwls), g, n1d);
}

}  // namespace

TEST(Solver, ZeroRhs) {
  HermitianBlockSystem sys = dipole_system(2, 1);
  sys.rhs().setZero();
  const auto r = solve(sys);
  EXPECT_EQ(r.X.norm(), 0.0);
  EXPECT_EQ(r.relative_residual, 0.0);
}

TEST(Solver, RecoversKnownSolution) {
  std::mt19937_64 rng(21);
  HermitianBlockSystem sys = dipole_system(2, 3);
  ASSERT_EQ(sys.dimension(), 8 * 32);
  const CVector X0 = random_vector(sys.dimension(), rng);
  sys.rhs() = sys.apply(X0);
  const auto r = solve(sys);
  EXPECT_LE((r.X - X0).norm(), 1e-8 * X0.norm());
  EXPECT_EQ(r.iterations, 0);
}

TEST(Solver, DirectAndPcgAgree) {
  const HermitianBlockSystem sys = dipole_system(2, 3);
  SolveOptions o;
  o.method = SolveMethod::pcg;
  o.pcg_tol = 1e-13;
  const auto a = solve(sys);
  const auto b = solve(sys, o);
  EXPECT_GT(b.iterations, 0);
  EXPECT_LE((a.X - b.X).norm(), 1e-8 * a.X.norm());
}

TEST(Solver, ResidualNorm) {
  const HermitianBlockSystem sys = dipole_system(2, 2);
  EXPECT_EQ(residual_norm(sys, CVector::Zero(sys.dimension())), 1.0);
  const auto r = solve(sys);
  EXPECT_LE(r.relative_residual, 1e-10);
  EXPECT_NEAR(residual_norm(sys, 2.0 * r.X), 1.0, 1e-8);
}

TEST(Solver, GalerkinOrthogonality) {
  std::mt19937_64 rng(22);
  const HermitianBlockSystem sys = dipole_system(4, 3);
  const auto r = solve(sys);
  const CVector res = sys.apply(r.X) - sys.rhs();
  for (int i = 0; i < 20; ++i) {
    const CVector y = random_vector(sys.dimension(), rng);
    EXPECT_LE(std::abs(y.dot(res)), 1e-8 * y.norm() * sys.rhs().norm());
  }
}

TEST(Solver, FactorReconstruction) {
  for (auto [n, q] : {std::pair{2, 3}, std::pair{4, 3}}) {
    const HermitianBlockSystem sys = dipole_system(n, q);
    ASSERT_LE(sys.dimension(), 3200);
    CholmodFactor f(sys);
    ASSERT_TRUE(f.factorize());
    const CMatrix A = sys.to_dense();
    const CMatrix R = f.reconstruct_dense();
    EXPECT_LE((A - R).norm(), 1e-10 * A.norm()) << "n=" << n;
  }
}

TEST(Solver, Deterministic) {
  const HermitianBlockSystem sys = dipole_system(3, 2);
  EXPECT_TRUE(solve(sys).X == solve(sys).X);
}

TEST(Solver, ShiftFallbackIsReported) {
  // rank-one PSD block: plain factorization hits a zero pivot
  HermitianBlockSystem sys(1, 2);
  sys.diagonal(0) << 1.0, 1.0, 1.0, 1.0;
  sys.rhs() << 1.0, 1.0;
  const auto r = solve(sys);
  EXPECT_GT(r.regularization_used, 0.0);
  EXPECT_LE(r.regularization_used, SolveOptions{}.reg_max);
  EXPECT_NEAR(r.X[0].real() + r.X[1].real(), 1.0, 1e-6);
}

TEST(Solver, FailureReportsFinalShift) {
  HermitianBlockSystem sys(1, 2);
  sys.diagonal(0) = -CMatrix::Identity(2, 2);
  sys.rhs() << 1.0, 0.0;
  try {
    solve(sys);
    FAIL() << "expected failure";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("final relative shift"), std::string::npos) << e.what();
  }
}

TEST(Solver, PcgIterationLimit) {
  const HermitianBlockSystem sys = dipole_system(3, 2);
  SolveOptions o;
  o.method = SolveMethod::pcg;
  o.pcg_max_iter = 2;
  o.pcg_tol = 1e-14;
  try {
    solve(sys, o);
    FAIL() << "expected failure";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("residuals"), std::string::npos) << e.what();
  }
}

TEST(Solver, RejectsBadOptions) {
  const HermitianBlockSystem sys = dipole_system(1, 1);
  SolveOptions o;
  o.reg_initial = 1e-3;
  o.reg_max = 1e-6;
  EXPECT_THROW(solve(sys, o), Error);
}
