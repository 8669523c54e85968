#pragma once

// Differential operators in the spectral variable z for rho = 0 and
// sigma(A) = {lambda}. All z-derivatives act analytically on the partial
// fractions (A - zI)^{-1} = -sum_{k=1}^n (z - lambda)^{-k} (A - lambda I)^{k-1}.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbdt/engine.hpp"
#include "gbdt/rational.hpp"

namespace gbdt {

/// Rising factorial k (k+1) ... (k+s-1); also valid for negative k.
inline double rising_factorial(double k, int s) {
  double r = 1.0;
  for (int i = 0; i < s; ++i) r *= k + i;
  return r;
}

/// p (p-1) ... (p-r+1)
inline double falling_factorial(double p, int r) {
  double f = 1.0;
  for (int i = 0; i < r; ++i) f *= p - i;
  return f;
}

/// B(z) = sum_{s=1}^{n+1} c_s (z - lambda)^s d^s/dz^s.
struct BispectralOperator {
  Complex lambda;
  std::vector<double> c;  // c[s-1] = c_s

  int order() const { return static_cast<int>(c.size()); }

  /// B(z) (z - lambda)^{-k} = factor(k) (z - lambda)^{-k}, with
  /// factor(k) = sum_s c_s (-1)^s k (k+1) ... (k+s-1).
  double pole_factor(int k) const {
    double acc = 0.0;
    for (int s = 1; s <= order(); ++s)
      acc += c[static_cast<std::size_t>(s - 1)] * (s % 2 == 0 ? 1.0 : -1.0) * rising_factorial(k, s);
    return acc;
  }

  /// Top-order coefficient not identically zero.
  bool non_degenerate() const { return !c.empty() && c.back() != 0.0; }
};

/// Nonzero solution of the n x (n+1) system pole_factor(k) = 0, k = 1..n,
/// normalized by c_{n+1} = 1.
inline BispectralOperator bispectral_operator(int n, Complex lambda) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "bispectral operator needs n >= 1");
  Eigen::MatrixXd system(n, n + 1);
  for (int k = 1; k <= n; ++k)
    for (int s = 1; s <= n + 1; ++s)
      system(k - 1, s - 1) = (s % 2 == 0 ? 1.0 : -1.0) * rising_factorial(k, s);

  Eigen::FullPivLU<Eigen::MatrixXd> rank_check(system);
  if (rank_check.rank() != n)
    throw std::logic_error("bispectral system must have a one-dimensional nullspace");

  // Move the c_{n+1} = 1 column to the right-hand side.
  const Eigen::MatrixXd lhs = system.leftCols(n);
  const Eigen::VectorXd rhs = -system.col(n);
  const Eigen::VectorXd head = lhs.fullPivLu().solve(rhs);

  BispectralOperator op{lambda, {}};
  for (int s = 0; s < n; ++s) op.c.push_back(head(s));
  op.c.push_back(1.0);
  return op;
}

namespace detail {

/// M_k = i B Pi* S^{-1} (A - lambda I)^{k-1} Pi, so that
/// w_A = I + sum_k (z - lambda)^{-k} M_k.
inline std::vector<CMatrix> darboux_pole_terms(const GBDTParams& p, const GBDTState& state,
                                               const SeedSpec& spec, Complex lambda) {
  const auto n = p.n();
  const CMatrix shifted = p.A - lambda * identity(n);
  const CMatrix left = kI * spec.B() * state.Pi.adjoint();
  std::vector<CMatrix> terms;
  CMatrix power_pi = state.Pi;
  for (Eigen::Index k = 1; k <= n; ++k) {
    terms.push_back(left * solve_s(state, power_pi));
    power_pi = shifted * power_pi;
  }
  return terms;
}

inline void require_bispectral_setting(const GBDTParams& p, const SeedSpec& spec,
                                       Complex lambda) {
  if (!spec.is_zero_seed()) fail(ErrorKind::InvalidArgument, "bispectrality needs rho = 0");
  if (!has_singleton_spectrum(p.A, lambda))
    fail(ErrorKind::SpectrumNotSingleton, "sigma(A) is not {lambda}");
}

inline void guard_lambda(Complex z, Complex lambda, double guard) {
  if (std::abs(z - lambda) <= guard * std::max(1.0, std::abs(lambda)))
    fail(ErrorKind::SpectralCollision, "z lies within the guard distance of lambda");
}

}  // namespace detail

inline constexpr double kLambdaGuard = 1e-8;

/// max_z ||B(z) w_A(x,t,z)||, evaluated analytically term by term.
inline double bispectral_residual(const BispectralOperator& op, const GBDTParams& p,
                                  const SeedSpec& spec, const GBDTState& state,
                                  const std::vector<Complex>& zs) {
  detail::require_bispectral_setting(p, spec, op.lambda);
  const auto terms = detail::darboux_pole_terms(p, state, spec, op.lambda);
  double worst = 0.0;
  for (Complex z : zs) {
    detail::guard_lambda(z, op.lambda, kLambdaGuard);
    CMatrix acc = CMatrix::Zero(spec.m(), spec.m());
    for (std::size_t k = 1; k <= terms.size(); ++k)
      acc += op.pole_factor(static_cast<int>(k)) * ipow(z - op.lambda, -static_cast<int>(k)) *
             terms[k - 1];
    worst = std::max(worst, frob(acc));
  }
  return worst;
}

inline double bispectral_residual(const BispectralOperator& op, const GBDTParams& p,
                                  const SeedSpec& spec, double x, const std::vector<Complex>& zs,
                                  const PropagateOptions& opts = {}) {
  detail::require_bispectral_setting(p, spec, op.lambda);
  return bispectral_residual(op, p, spec, propagate(p, spec, x, 0.0, opts), zs);
}

struct RightActionReport {
  CVector value;          // left side of the right-action relation for column k
  double residual = 0.0;  // ||value||
  bool degenerate = false;
};

/// Laurent coefficients of
///   f(z) = det P~(x) (z - lambda)^m (I - i B P* P~^{-1} (A - zI)^{-1} P) e_k
/// in powers of (z - lambda), keyed by exponent.
inline std::map<int, CVector> right_action_laurent(const GBDTParams& p, const SeedSpec& spec,
                                                   Complex lambda, double x, Eigen::Index k) {
  const auto m = spec.m();
  if (k < 0 || k >= m) fail(ErrorKind::InvalidArgument, "column index out of range");
  const ShiftedForm form = shifted_polynomial_form(p, spec, lambda);
  const CMatrix pm = form.P.eval(x, 0.0);
  const CMatrix ptilde = form.Stilde.eval(x, 0.0);
  const Complex det = ptilde.determinant();
  const auto n = p.n();
  const CMatrix shifted = p.A - lambda * identity(n);
  const CMatrix left = kI * spec.B() * pm.adjoint();

  std::map<int, CVector> coeffs;
  CVector ek = CVector::Zero(m);
  ek(k) = 1.0;
  coeffs[static_cast<int>(m)] = det * ek;
  CVector power_col = pm.col(k);
  for (Eigen::Index j = 1; j <= n; ++j) {
    // -(A - zI)^{-1} contributes +(z - lambda)^{-j} (A - lambda I)^{j-1}.
    const CVector v = det * (left * cmat_solve(ptilde, power_col).x);
    auto [it, inserted] = coeffs.try_emplace(static_cast<int>(m - j), v);
    if (!inserted) it->second += v;
    power_col = shifted * power_col;
  }
  return coeffs;
}

/// sum_l c_l (d/dz + i d_k x)^l f(z) with f as above; `coeffs[l-1]` holds
/// c_{lk} sampled at z. Only evaluates candidates, it does not search for them.
inline RightActionReport right_action_residual(const std::vector<Complex>& coeffs,
                                               const GBDTParams& p, const SeedSpec& spec,
                                               Complex lambda, double x, Complex z,
                                               Eigen::Index k) {
  detail::guard_lambda(z, lambda, kLambdaGuard);
  const auto laurent = right_action_laurent(p, spec, lambda, x, k);
  const Complex alpha = kI * spec.d()(k) * x;
  const Complex w = z - lambda;

  // D^r f(z) = sum_p a_p p(p-1)...(p-r+1) w^{p-r}
  auto derivative = [&](int r) {
    CVector acc = CVector::Zero(spec.m());
    for (const auto& [power, a] : laurent)
      acc += falling_factorial(power, r) * ipow(w, power - r) * a;
    return acc;
  };

  RightActionReport report;
  report.value = CVector::Zero(spec.m());
  report.degenerate = true;
  for (std::size_t l = 1; l <= coeffs.size(); ++l) {
    if (coeffs[l - 1] != Complex{}) report.degenerate = false;
    // (D + alpha)^l = sum_r binom(l, r) alpha^{l-r} D^r
    CVector term = CVector::Zero(spec.m());
    double binom = 1.0;
    for (int r = 0; r <= static_cast<int>(l); ++r) {
      term += binom * ipow(alpha, static_cast<int>(l) - r) * derivative(r);
      binom = binom * static_cast<double>(static_cast<int>(l) - r) / static_cast<double>(r + 1);
    }
    report.value += coeffs[l - 1] * term;
  }
  report.residual = report.value.norm();
  return report;
}

}  // namespace gbdt
