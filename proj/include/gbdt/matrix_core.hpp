#pragma once

// Dense complex matrix helpers shared by every module.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "gbdt/error.hpp"

namespace gbdt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Condition estimate above which a linear solve is treated as singular.
inline constexpr double kDefaultConditionLimit = 1e12;
/// Relative tolerance for declaring a matrix nilpotent.
inline constexpr double kNilpotencyTolerance = 1e-12;

inline double frob(const CMatrix& m) { return m.norm(); }

inline bool all_finite(const CMatrix& m) { return m.allFinite(); }

inline void require_finite(const CMatrix& m, const std::string& what) {
  if (!all_finite(m)) fail(ErrorKind::NonFinite, what + " has non-finite entries");
}

inline void require_square(const CMatrix& m, const std::string& what) {
  if (m.rows() != m.cols())
    fail(ErrorKind::ShapeMismatch, what + " must be square, got " + std::to_string(m.rows()) + "x" +
                                       std::to_string(m.cols()));
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

inline CMatrix diag_matrix(const RVector& d) {
  return d.cast<Complex>().asDiagonal().toDenseMatrix();
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

/// Hermitian part (S + S*)/2.
inline CMatrix hermitian_part(const CMatrix& s) { return (s + s.adjoint()) * 0.5; }

inline double hermiticity_defect(const CMatrix& s) { return frob(s - s.adjoint()); }

/// Integer power, exact for zero base and zero exponent.
inline Complex ipow(Complex base, int e) {
  Complex r{1.0, 0.0};
  const bool invert = e < 0;
  for (int i = 0; i < (invert ? -e : e); ++i) r *= base;
  return invert ? Complex{1.0, 0.0} / r : r;
}

inline CMatrix matrix_power(const CMatrix& a, int k) {
  CMatrix result = identity(a.rows());
  for (int i = 0; i < k; ++i) result = result * a;
  return result;
}

struct SolveResult {
  CMatrix x;
  double condition = 0.0;  // 1-norm condition estimate of lhs
};

/// Solves lhs * X = rhs by LU with partial pivoting. A condition estimate above
/// `condition_limit` raises SingularMatrix; for S(x,t) this marks a zero of
/// det S, i.e. a pole of the transformed potential.
///
/// `reference_norm` is the size of the quantities lhs was assembled from. When
/// lhs is much smaller than that (a 1x1 S passing through zero, say) the
/// estimate is scaled by reference_norm / ||lhs||, since plain 1/rcond cannot
/// see cancellation in a scalar.
inline SolveResult cmat_solve(const CMatrix& lhs, const CMatrix& rhs,
                              double condition_limit = kDefaultConditionLimit,
                              double reference_norm = 0.0) {
  require_square(lhs, "cmat_solve lhs");
  if (rhs.rows() != lhs.rows())
    fail(ErrorKind::ShapeMismatch, "cmat_solve rhs has " + std::to_string(rhs.rows()) +
                                       " rows, expected " + std::to_string(lhs.rows()));
  if (lhs.rows() == 0) return {CMatrix(0, rhs.cols()), 1.0};

  Eigen::PartialPivLU<CMatrix> lu(lhs);
  const double rcond = lu.rcond();
  const double size = frob(lhs);
  const double inflation = size > 0.0 ? std::max(1.0, reference_norm / size) : 1.0;
  const double condition = rcond > 0.0 && std::isfinite(rcond)
                               ? inflation / rcond
                               : std::numeric_limits<double>::infinity();
  if (!(condition <= condition_limit))
    fail(ErrorKind::SingularMatrix,
         "condition estimate " + std::to_string(condition) + " exceeds limit");
  return {lu.solve(rhs), condition};
}

/// ||A^n|| / max(1, ||A||^n); zero for an exactly nilpotent matrix.
inline double nilpotency_defect(const CMatrix& a) {
  require_square(a, "nilpotency check");
  const auto n = static_cast<int>(a.rows());
  const double scale = std::max(1.0, std::pow(frob(a), n));
  return frob(matrix_power(a, n)) / scale;
}

inline bool is_nilpotent(const CMatrix& a, double tol = kNilpotencyTolerance) {
  return nilpotency_defect(a) <= tol;
}

/// Guard for the resolvent (A - zI)^{-1}: throws SpectralCollision when z sits
/// numerically on the spectrum of A.
inline void check_resolvent(const CMatrix& a, Complex z, double rel_threshold = 1e-12) {
  const auto n = a.rows();
  const CMatrix shifted = a - z * identity(n);
  const double scale = std::pow(std::max(1.0, frob(shifted)), static_cast<double>(n));
  if (std::abs(shifted.determinant()) <= rel_threshold * scale)
    fail(ErrorKind::SpectralCollision, "spectral parameter lies on sigma(A)");
}

}  // namespace gbdt
