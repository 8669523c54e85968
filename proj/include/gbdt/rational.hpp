#pragma once

// Exact polynomial realization of the transformation for rho = 0 and
// nilpotent A: Pi(x,t), S(x,t) are matrix polynomials, rho~ = p / det S and
// w_A = P(x,t,1/z) / det S.

#include <string>
#include <vector>

#include "gbdt/engine.hpp"
#include "gbdt/poly_det.hpp"

namespace gbdt {

struct RationalSolution {
  MatrixPoly2 Pi;     // n x m
  MatrixPoly2 S;      // n x n
  ScalarPoly2 detS;
  MatrixPoly2 adjS;   // S * adjS = detS * I
  MatrixPoly2 numer;  // m x m, rho~ = numer / detS

  CMatrix rho(double x, double t) const {
    const Complex det = detS.eval(x, t);
    if (det == Complex{}) fail(ErrorKind::SingularMatrix, "det S vanishes");
    return numer.eval(x, t) / det;
  }
};

/// A S - S A* - i Pi B Pi* as a polynomial; identically zero for valid data.
inline MatrixPoly2 displacement_polynomial(const RationalSolution& sol, const CMatrix& a,
                                           const CMatrix& b) {
  return a * sol.S - sol.S * CMatrix(a.adjoint()) - (sol.Pi * b * sol.Pi.adjoint()).scaled(kI);
}

namespace detail {

inline void require_nilpotent_zero_seed(const GBDTParams& p, const SeedSpec& spec) {
  if (!spec.is_zero_seed()) fail(ErrorKind::InvalidArgument, "rational extensions need rho = 0");
  require_square(p.A, "A");
  if (!is_nilpotent(p.A)) fail(ErrorKind::NotNilpotent, "A must be nilpotent");
}

/// Pi(x,t) with column k equal to exp(-i(x d_k + t d^_k) A) Pi0_k.
inline MatrixPoly2 pi_polynomial(const CMatrix& a, const CMatrix& pi0, const SeedSpec& spec) {
  const auto n = a.rows();
  const auto m = spec.m();
  MatrixPoly2 pi(n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const MatrixPoly2 ex = nilpotent_exp_poly(a, -kI * spec.d()(k), Variable::x);
    const MatrixPoly2 et = nilpotent_exp_poly(a, -kI * spec.dhat()(k), Variable::t);
    CMatrix select = CMatrix::Zero(m, m);
    select(k, k) = 1.0;
    // (e_x e_t Pi0_k) e_k^T keeps column k only.
    pi += (ex * et) * CMatrix(pi0 * select);
  }
  return pi;
}

}  // namespace detail

inline RationalSolution build_rational_solution(const GBDTParams& p, const SeedSpec& spec,
                                                double identity_tol = 1e-10) {
  detail::require_nilpotent_zero_seed(p, spec);
  require_admissible(p, spec, identity_tol);

  const CMatrix b = spec.B();
  RationalSolution sol;
  sol.Pi = detail::pi_polynomial(p.A, p.Pi0, spec);

  // x-part at t = 0, then the t-part at fixed x.
  const MatrixPoly2 pi_t0 = sol.Pi.substitute(Variable::t, 0.0);
  const MatrixPoly2 sx = (pi_t0 * CMatrix(spec.D() * b) * pi_t0.adjoint())
                             .integrate_x(MatrixPoly2::constant(p.S0));
  const MatrixPoly2 st_integrand = sol.Pi * CMatrix(spec.Dhat() * b) * sol.Pi.adjoint();
  sol.S = st_integrand.integrate_t(sx);

  const MatrixPoly2 residual = displacement_polynomial(sol, p.A, b);
  const double scale =
      std::max(1.0, frob(p.A) * sol.S.max_coeff_norm() + std::pow(sol.Pi.max_coeff_norm(), 2));
  if (residual.max_coeff_norm() > identity_tol * scale)
    fail(ErrorKind::IdentityViolated, "polynomial displacement identity fails");

  auto da = poly_det_adj(sol.S);
  sol.detS = std::move(da.det);
  sol.adjS = std::move(da.adj);
  sol.numer = (CMatrix(-b) * sol.Pi.adjoint()) * sol.adjS * sol.Pi;
  return sol;
}

/// w_A(x,t,z) = I - (sum_k z^{-k} Q_k(x,t)) / det S with
/// Q_k = -i B Pi* adj(S) A^{k-1} Pi, from the finite Neumann series
/// (A - zI)^{-1} = -sum_{k<n} z^{-k-1} A^k.
struct DarbouxRational {
  std::vector<MatrixPoly2> Q;  // Q[k-1] multiplies z^{-k}
  ScalarPoly2 detS;
  Eigen::Index m = 0;

  /// P(x,t,z) = det S * I - sum_k z^{-k} Q_k
  CMatrix numerator(double x, double t, Complex z) const {
    if (z == Complex{}) fail(ErrorKind::SpectralCollision, "z = 0 is the pole of the 1/z form");
    CMatrix acc = detS.eval(x, t) * identity(m);
    Complex zinv_k{1.0, 0.0};
    for (const auto& q : Q) {
      zinv_k /= z;
      acc -= zinv_k * q.eval(x, t);
    }
    return acc;
  }

  CMatrix eval(double x, double t, Complex z) const {
    const Complex det = detS.eval(x, t);
    if (det == Complex{}) fail(ErrorKind::SingularMatrix, "det S vanishes");
    return numerator(x, t, z) / det;
  }
};

inline DarbouxRational darboux_rational(const RationalSolution& sol, const CMatrix& a,
                                        const CMatrix& b) {
  require_square(a, "A");
  if (!is_nilpotent(a)) fail(ErrorKind::NotNilpotent, "A must be nilpotent");
  DarbouxRational dr;
  dr.detS = sol.detS;
  dr.m = sol.Pi.cols();
  const MatrixPoly2 left = (CMatrix(-kI * b) * sol.Pi.adjoint()) * sol.adjS;
  CMatrix a_power = identity(a.rows());
  for (Eigen::Index k = 1; k <= a.rows(); ++k) {
    dr.Q.push_back(left * a_power * sol.Pi);
    a_power = a_power * a;
  }
  return dr;
}

/// ||(A - lambda I)^n|| small relative to ||A - lambda I||^n.
inline bool has_singleton_spectrum(const CMatrix& a, Complex lambda,
                                   double tol = kNilpotencyTolerance) {
  return is_nilpotent(a - lambda * identity(a.rows()), tol);
}

/// Estimated single eigenvalue trace(A)/n when sigma(A) is a singleton.
inline Complex singleton_eigenvalue(const CMatrix& a) {
  require_square(a, "A");
  const Complex lambda = a.trace() / static_cast<double>(a.rows());
  if (!has_singleton_spectrum(a, lambda))
    fail(ErrorKind::SpectrumNotSingleton, "sigma(A) is not concentrated at one point");
  return lambda;
}

struct ShiftedForm {
  MatrixPoly2 P;       // Pi(x) e^{i lambda x D}, polynomial in x
  MatrixPoly2 Stilde;  // S(x), polynomial in x
};

/// t = 0 slice for rho = 0 and sigma(A) = {lambda}, lambda real:
/// (Pi e^{i lambda x D})_x = -i (A - lambda I)(Pi e^{i lambda x D}) D and
/// S_x = P D B P*.
inline ShiftedForm shifted_polynomial_form(const GBDTParams& p, const SeedSpec& spec,
                                           Complex lambda) {
  if (!spec.is_zero_seed()) fail(ErrorKind::InvalidArgument, "shifted form needs rho = 0");
  if (lambda.imag() != 0.0) fail(ErrorKind::LambdaNotReal, "lambda must be real");
  require_square(p.A, "A");
  const auto n = p.n();
  const auto m = spec.m();
  const CMatrix shifted = p.A - lambda * identity(n);
  if (!is_nilpotent(shifted))
    fail(ErrorKind::SpectrumNotSingleton, "sigma(A) is not {lambda}");
  require_admissible(p, spec);

  ShiftedForm f;
  f.P = MatrixPoly2(n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    CMatrix select = CMatrix::Zero(m, m);
    select(k, k) = 1.0;
    f.P += nilpotent_exp_poly(shifted, -kI * spec.d()(k), Variable::x) * CMatrix(p.Pi0 * select);
  }
  f.Stilde = (f.P * CMatrix(spec.D() * spec.B()) * f.P.adjoint())
                 .integrate_x(MatrixPoly2::constant(p.S0));
  return f;
}

}  // namespace gbdt
