#include <random>

#include <gtest/gtest.h>

#include "gbdt/poly2.hpp"
#include "gbdt/poly_det.hpp"
#include "oracles.hpp"

using namespace gbdt;

namespace {

CMatrix jordan(Eigen::Index n) {
  CMatrix a = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  return a;
}

MatrixPoly2 random_poly(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, int dx, int dt) {
  MatrixPoly2 p(r, c);
  for (int i = 0; i <= dx; ++i)
    for (int j = 0; j <= dt; ++j) p.add_term(i, j, oracle::random_matrix(rng, r, c));
  return p;
}

}  // namespace

TEST(CmatSolve, IdentityReturnsRhs) {
  std::mt19937_64 rng(1);
  const CMatrix r = oracle::random_matrix(rng, 3, 2);
  EXPECT_EQ(cmat_solve(identity(3), r).x, r);
}

TEST(CmatSolve, DiagonalSolve) {
  CMatrix lhs = CMatrix::Zero(2, 2);
  lhs(0, 0) = 2.0;
  lhs(1, 1) = 4.0;
  CMatrix rhs(2, 1);
  rhs << 2.0, 4.0;
  const auto res = cmat_solve(lhs, rhs);
  EXPECT_NEAR(std::abs(res.x(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(res.x(1, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(res.condition, 2.0, 1e-12);
}

TEST(CmatSolve, RandomRoundTrip) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix lhs = oracle::random_matrix(rng, 5, 5) + 5.0 * identity(5);
    const CMatrix x0 = oracle::random_matrix(rng, 5, 3);
    const CMatrix rhs = lhs * x0;
    const auto res = cmat_solve(lhs, rhs);
    EXPECT_LE(frob(res.x - x0), 1e-10 * frob(x0));
    EXPECT_LE(frob(lhs * res.x - rhs), 1e-12 * (frob(lhs) * frob(res.x) + frob(rhs)));
  }
}

TEST(CmatSolve, SingularRaises) {
  CMatrix lhs = CMatrix::Ones(2, 2);
  try {
    cmat_solve(lhs, identity(2));
    FAIL() << "expected SingularMatrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

TEST(CmatSolve, ShapeMismatch) {
  try {
    cmat_solve(identity(2), CMatrix::Ones(3, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(NilpotentExp, ZeroMatrixGivesConstantOne) {
  const auto p = nilpotent_exp_poly(CMatrix::Zero(1, 1), -kI);
  EXPECT_EQ(p.terms().size(), 1u);
  EXPECT_EQ(p.degree_x(), 0);
  EXPECT_EQ(p.coeff(0, 0)(0, 0), Complex(1.0));
}

TEST(NilpotentExp, JordanTwoTruncates) {
  const CMatrix a = jordan(2);
  const auto p = nilpotent_exp_poly(a, 1.0);
  EXPECT_EQ(p.coeff(0, 0), identity(2));
  EXPECT_EQ(p.coeff(1, 0), a);
  EXPECT_EQ(p.degree_x(), 1);
}

TEST(NilpotentExp, JordanThreeMatchesDenseExponential) {
  const CMatrix a = jordan(3);
  const Complex c(0.0, -2.0);
  const auto p = nilpotent_exp_poly(a, c);
  const CMatrix expected = identity(3) + c * a * 0.7 + c * c * a * a * 0.49 / 2.0;
  EXPECT_LE(frob(p.eval(0.7, 0.0) - expected), 1e-14);
  EXPECT_LE(frob(p.eval(0.7, 0.0) - oracle::expm(c * a * 0.7)), 1e-12);
}

TEST(NilpotentExp, RandomNilpotentMatchesOracleAndGroupProperty) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 5; ++n) {
    const CMatrix a = oracle::random_nilpotent(rng, n);
    const Complex c(0.3, -1.1);
    const auto p = nilpotent_exp_poly(a, c);
    for (double x : {-1.3, 0.2, 0.9}) {
      EXPECT_LE(frob(p.eval(x, 0.0) - oracle::expm(c * a * x)), 1e-11);
      EXPECT_LE(frob(p.eval(x, 0.0) * p.eval(-x, 0.0) - identity(n)), 1e-11);
    }
  }
}

TEST(NilpotentExp, TimeVariable) {
  const auto p = nilpotent_exp_poly(jordan(2), 2.0, Variable::t);
  EXPECT_EQ(p.degree_x(), 0);
  EXPECT_EQ(p.degree_t(), 1);
}

TEST(NilpotentExp, RejectsNonNilpotent) {
  try {
    nilpotent_exp_poly(identity(2), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotNilpotent);
  }
}

TEST(Poly2, NilpotentCancellation) {
  const CMatrix a = jordan(2);
  MatrixPoly2 p = identity_poly(2), q = identity_poly(2);
  p.add_term(1, 0, a);
  q.add_term(1, 0, -a);
  const auto prod = p * q;
  EXPECT_EQ(prod.terms().size(), 1u);
  EXPECT_EQ(prod.coeff(0, 0), identity(2));
}

TEST(Poly2, IntegrateConstant) {
  std::mt19937_64 rng(4);
  const CMatrix c = oracle::random_matrix(rng, 2, 2);
  const CMatrix s0 = oracle::random_matrix(rng, 2, 2);
  const auto p = MatrixPoly2::constant(c).integrate_x(MatrixPoly2::constant(s0));
  EXPECT_EQ(p.coeff(0, 0), s0);
  EXPECT_EQ(p.coeff(1, 0), c);
}

TEST(Poly2, IntegrateDividesByNewDegree) {
  MatrixPoly2 p(1, 1);
  p.add_term(2, 1, CMatrix::Constant(1, 1, 6.0));
  const auto q = p.integrate_t(MatrixPoly2(1, 1));
  EXPECT_EQ(q.coeff(2, 2)(0, 0), Complex(3.0));
}

TEST(Poly2, IntegrationConstantMustNotDependOnVariable) {
  MatrixPoly2 c(1, 1);
  c.add_term(1, 0, CMatrix::Ones(1, 1));
  EXPECT_THROW(MatrixPoly2::constant(CMatrix::Ones(1, 1)).integrate_x(c), Error);
}

TEST(Poly2, EvalMatchesDirectSummation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto p = random_poly(rng, 2, 3, 3, 2);
  for (int k = 0; k < 20; ++k) {
    const double x = u(rng), t = u(rng);
    const CMatrix direct = oracle::direct_eval(p, x, t);
    EXPECT_LE(frob(p.eval(x, t) - direct), 1e-13 * std::max(1.0, frob(direct)));
  }
}

TEST(Poly2, ProductEvaluatesToMatrixProduct) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto p = random_poly(rng, 2, 3, 2, 2);
  const auto q = random_poly(rng, 3, 2, 1, 3);
  const auto pq = p * q;
  for (int k = 0; k < 10; ++k) {
    const double x = u(rng), t = u(rng);
    const CMatrix expected = p.eval(x, t) * q.eval(x, t);
    EXPECT_LE(frob(pq.eval(x, t) - expected), 1e-12 * std::max(1.0, frob(expected)));
  }
}

TEST(Poly2, AdjointConjugatesCoefficients) {
  std::mt19937_64 rng(7);
  const auto p = random_poly(rng, 2, 3, 2, 1);
  const auto pa = p.adjoint();
  EXPECT_EQ(pa.rows(), 3);
  EXPECT_EQ(pa.cols(), 2);
  EXPECT_LE(frob(pa.eval(0.4, -0.3) - p.eval(0.4, -0.3).adjoint()), 1e-13);
}

TEST(Poly2, ShapeMismatchThrows) {
  MatrixPoly2 a(2, 2), b(3, 3);
  try {
    a += b;
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
  EXPECT_THROW(MatrixPoly2(2, 2) * MatrixPoly2(3, 3), Error);
}

TEST(Poly2, ZeroCoefficientsAreNotStored) {
  MatrixPoly2 p(2, 2);
  p.add_term(1, 1, CMatrix::Zero(2, 2));
  EXPECT_TRUE(p.is_zero());
  p.add_term(1, 0, identity(2));
  p.add_term(1, 0, -identity(2));
  EXPECT_TRUE(p.is_zero());
}

TEST(PolyDetAdj, IdentityConstant) {
  const auto r = poly_det_adj(identity_poly(2));
  EXPECT_EQ(r.det.terms().size(), 1u);
  EXPECT_EQ(r.det.coeff(0, 0), Complex(1.0));
  EXPECT_EQ(r.adj.eval(0.3, 0.2), identity(2));
}

TEST(PolyDetAdj, Diagonal) {
  MatrixPoly2 p = identity_poly(2);
  CMatrix e = CMatrix::Zero(2, 2);
  e(0, 0) = 2.0;
  p.add_term(1, 0, e);
  const auto r = poly_det_adj(p);
  EXPECT_EQ(r.det.coeff(0, 0), Complex(1.0));
  EXPECT_EQ(r.det.coeff(1, 0), Complex(2.0));
  EXPECT_EQ(r.det.degree_x(), 1);
  EXPECT_EQ(r.adj.coeff(0, 0), identity(2));
  CMatrix adj1 = CMatrix::Zero(2, 2);
  adj1(1, 1) = 2.0;
  EXPECT_EQ(r.adj.coeff(1, 0), adj1);
}

TEST(PolyDetAdj, RandomThreeByThreeAgainstNumericDeterminant) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto p = random_poly(rng, 3, 3, 1, 1);
  for (auto method : {DetMethod::cofactor, DetMethod::berkowitz}) {
    const auto r = poly_det_adj(p, method);
    for (int k = 0; k < 10; ++k) {
      const double x = u(rng), t = u(rng);
      const CMatrix m = p.eval(x, t);
      const Complex det = m.determinant();
      EXPECT_LE(std::abs(r.det.eval(x, t) - det), 1e-10 * std::max(1.0, std::abs(det)));
      EXPECT_LE(frob(m * r.adj.eval(x, t) - r.det.eval(x, t) * identity(3)),
                1e-10 * std::max(1.0, frob(m) * frob(r.adj.eval(x, t))));
    }
  }
}

TEST(PolyDetAdj, BerkowitzAgreesWithCofactorAboveFour) {
  std::mt19937_64 rng(9);
  const auto p = random_poly(rng, 5, 5, 1, 0);
  const auto auto_r = poly_det_adj(p);
  const auto cof = poly_det_adj(p, DetMethod::cofactor);
  for (double x : {-0.5, 0.1, 0.8}) {
    const Complex det = p.eval(x, 0.0).determinant();
    EXPECT_LE(std::abs(auto_r.det.eval(x, 0.0) - det), 1e-9 * std::max(1.0, std::abs(det)));
    EXPECT_LE(std::abs(cof.det.eval(x, 0.0) - det), 1e-9 * std::max(1.0, std::abs(det)));
    EXPECT_LE(frob(auto_r.adj.eval(x, 0.0) - cof.adj.eval(x, 0.0)),
              1e-9 * std::max(1.0, frob(cof.adj.eval(x, 0.0))));
  }
}

TEST(PolyDetAdj, ProductWithAdjugateIsDeterminantTimesIdentity) {
  std::mt19937_64 rng(10);
  for (int n = 1; n <= 4; ++n) {
    const auto p = random_poly(rng, n, n, 2, 1);
    const auto r = poly_det_adj(p);
    const auto defect = p * r.adj - r.det * identity_poly(n);
    EXPECT_LE(defect.max_coeff_norm(), 1e-10 * std::max(1.0, r.det.max_coeff_norm()));
  }
}

TEST(PolyDetAdj, NonSquareRejected) {
  try {
    poly_det_adj(MatrixPoly2(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(MatrixCore, NilpotencyToleranceIsRelative) {
  CMatrix a = jordan(3) * 100.0;
  EXPECT_TRUE(is_nilpotent(a));
  a(2, 0) = 1e-3;
  EXPECT_FALSE(is_nilpotent(a));
}

TEST(MatrixCore, ResolventGuard) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  EXPECT_THROW(check_resolvent(a, 1.0), Error);
  EXPECT_NO_THROW(check_resolvent(a, 0.5));
}
