#pragma once

// Sparse polynomials in two real variables (x, t) with complex scalar or
// complex matrix coefficients. Coefficients are kept exactly as produced by
// the arithmetic; only exactly-zero coefficients are dropped.

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "gbdt/matrix_core.hpp"

namespace gbdt {

template <class Coeff>
struct CoeffTraits;

template <>
struct CoeffTraits<Complex> {
  static Complex zero(Eigen::Index, Eigen::Index) { return Complex{}; }
  static bool is_zero(const Complex& c) { return c == Complex{}; }
  static double norm(const Complex& c) { return std::abs(c); }
  static Complex adjoint(const Complex& c) { return std::conj(c); }
  static Eigen::Index rows(const Complex&) { return 1; }
  static Eigen::Index cols(const Complex&) { return 1; }
};

template <>
struct CoeffTraits<CMatrix> {
  static CMatrix zero(Eigen::Index r, Eigen::Index c) { return CMatrix::Zero(r, c); }
  static bool is_zero(const CMatrix& m) { return (m.array() == Complex{}).all(); }
  static double norm(const CMatrix& m) { return m.norm(); }
  static CMatrix adjoint(const CMatrix& m) { return m.adjoint(); }
  static Eigen::Index rows(const CMatrix& m) { return m.rows(); }
  static Eigen::Index cols(const CMatrix& m) { return m.cols(); }
};

enum class Variable { x, t };

template <class Coeff>
class Poly2 {
 public:
  using Traits = CoeffTraits<Coeff>;
  using Exponent = std::pair<int, int>;  // (power of x, power of t)
  using TermMap = std::map<Exponent, Coeff>;

  Poly2() = default;
  Poly2(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}

  static Poly2 constant(const Coeff& c) { return monomial(c, 0, 0); }

  static Poly2 monomial(const Coeff& c, int px, int pt) {
    Poly2 p(Traits::rows(c), Traits::cols(c));
    p.add_term(px, pt, c);
    return p;
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(int px, int pt, const Coeff& c) {
    if (px < 0 || pt < 0) fail(ErrorKind::InvalidArgument, "negative exponent");
    if (Traits::rows(c) != rows_ || Traits::cols(c) != cols_)
      fail(ErrorKind::ShapeMismatch, "coefficient shape does not match polynomial shape");
    auto [it, inserted] = terms_.try_emplace({px, pt}, c);
    if (!inserted) it->second = it->second + c;
    if (Traits::is_zero(it->second)) terms_.erase(it);
  }

  Coeff coeff(int px, int pt) const {
    auto it = terms_.find({px, pt});
    return it == terms_.end() ? Traits::zero(rows_, cols_) : it->second;
  }

  /// Highest power of x (or t) present; -1 for the zero polynomial.
  int degree(Variable v) const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, v == Variable::x ? e.first : e.second);
    return d;
  }
  int degree_x() const { return degree(Variable::x); }
  int degree_t() const { return degree(Variable::t); }

  double max_coeff_norm() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, Traits::norm(c));
    return m;
  }

  Coeff eval(double x, double t) const {
    Coeff acc = Traits::zero(rows_, cols_);
    if (terms_.empty()) return acc;
    const int dx = degree_x();
    const int dt = degree_t();
    std::vector<double> xp(static_cast<std::size_t>(dx + 1), 1.0);
    std::vector<double> tp(static_cast<std::size_t>(dt + 1), 1.0);
    for (int i = 1; i <= dx; ++i) xp[i] = xp[i - 1] * x;
    for (int j = 1; j <= dt; ++j) tp[j] = tp[j - 1] * t;
    for (const auto& [e, c] : terms_) acc = acc + c * Complex(xp[e.first] * tp[e.second]);
    return acc;
  }

  Poly2 operator-() const {
    Poly2 r(rows_, cols_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }

  Poly2& operator+=(const Poly2& rhs) {
    require_same_shape(rhs);
    for (const auto& [e, c] : rhs.terms_) add_term(e.first, e.second, c);
    return *this;
  }
  Poly2& operator-=(const Poly2& rhs) { return *this += -rhs; }

  friend Poly2 operator+(Poly2 lhs, const Poly2& rhs) { return lhs += rhs; }
  friend Poly2 operator-(Poly2 lhs, const Poly2& rhs) { return lhs -= rhs; }

  friend Poly2 operator*(const Poly2& lhs, const Poly2& rhs) {
    if (lhs.cols_ != rhs.rows_)
      fail(ErrorKind::ShapeMismatch, "polynomial product: inner dimensions differ");
    Poly2 r(lhs.rows_, rhs.cols_);
    for (const auto& [el, cl] : lhs.terms_)
      for (const auto& [er, cr] : rhs.terms_)
        r.add_term(el.first + er.first, el.second + er.second, cl * cr);
    return r;
  }

  Poly2 scaled(Complex s) const {
    Poly2 r(rows_, cols_);
    if (s == Complex{}) return r;
    for (const auto& [e, c] : terms_) r.add_term(e.first, e.second, c * s);
    return r;
  }

  /// Conjugate transpose; x and t are real so only coefficients are conjugated.
  Poly2 adjoint() const {
    Poly2 r(cols_, rows_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, Traits::adjoint(c));
    return r;
  }

  /// Antiderivative in `v` vanishing at v = 0, plus `constant`, which must not
  /// depend on `v`.
  Poly2 integrate(Variable v, const Poly2& constant) const {
    require_same_shape(constant);
    if (constant.degree(v) > 0)
      fail(ErrorKind::InvalidArgument, "integration constant depends on the integration variable");
    Poly2 r = constant;
    for (const auto& [e, c] : terms_) {
      if (v == Variable::x)
        r.add_term(e.first + 1, e.second, c * Complex(1.0 / (e.first + 1)));
      else
        r.add_term(e.first, e.second + 1, c * Complex(1.0 / (e.second + 1)));
    }
    return r;
  }
  Poly2 integrate_x(const Poly2& constant) const { return integrate(Variable::x, constant); }
  Poly2 integrate_t(const Poly2& constant) const { return integrate(Variable::t, constant); }

  /// Substitutes a value for one variable, leaving a polynomial in the other.
  Poly2 substitute(Variable v, double value) const {
    Poly2 r(rows_, cols_);
    for (const auto& [e, c] : terms_) {
      if (v == Variable::x)
        r.add_term(0, e.second, c * Complex(std::pow(value, e.first)));
      else
        r.add_term(e.first, 0, c * Complex(std::pow(value, e.second)));
    }
    return r;
  }

  Poly2 swap_variables() const {
    Poly2 r(rows_, cols_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(Exponent{e.second, e.first}, c);
    return r;
  }

  /// Drops coefficients whose norm is at most `abs_tol`.
  Poly2 pruned(double abs_tol) const {
    Poly2 r(rows_, cols_);
    for (const auto& [e, c] : terms_)
      if (Traits::norm(c) > abs_tol) r.terms_.emplace(e, c);
    return r;
  }

 private:
  void require_same_shape(const Poly2& other) const {
    if (other.rows_ != rows_ || other.cols_ != cols_)
      fail(ErrorKind::ShapeMismatch, "polynomial shapes differ");
  }

  Eigen::Index rows_ = 1;
  Eigen::Index cols_ = 1;
  TermMap terms_;
};

using ScalarPoly2 = Poly2<Complex>;
using MatrixPoly2 = Poly2<CMatrix>;

inline MatrixPoly2 identity_poly(Eigen::Index n) { return MatrixPoly2::constant(identity(n)); }

inline MatrixPoly2 operator*(const CMatrix& lhs, const MatrixPoly2& rhs) {
  return MatrixPoly2::constant(lhs) * rhs;
}

inline MatrixPoly2 operator*(const MatrixPoly2& lhs, const CMatrix& rhs) {
  return lhs * MatrixPoly2::constant(rhs);
}

inline MatrixPoly2 operator*(const ScalarPoly2& lhs, const MatrixPoly2& rhs) {
  MatrixPoly2 r(rhs.rows(), rhs.cols());
  for (const auto& [el, cl] : lhs.terms())
    for (const auto& [er, cr] : rhs.terms()) r.add_term(el.first + er.first, el.second + er.second, cl * cr);
  return r;
}

inline ScalarPoly2 entry(const MatrixPoly2& p, Eigen::Index row, Eigen::Index col) {
  ScalarPoly2 r;
  for (const auto& [e, c] : p.terms()) r.add_term(e.first, e.second, c(row, col));
  return r;
}

/// Assembles a rows x cols matrix polynomial from row-major scalar entries.
inline MatrixPoly2 from_entries(Eigen::Index rows, Eigen::Index cols,
                                const std::vector<ScalarPoly2>& entries) {
  if (static_cast<Eigen::Index>(entries.size()) != rows * cols)
    fail(ErrorKind::ShapeMismatch, "entry count does not match shape");
  MatrixPoly2 r(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      for (const auto& [e, c] : entries[static_cast<std::size_t>(i * cols + j)].terms()) {
        CMatrix unit = CMatrix::Zero(rows, cols);
        unit(i, j) = c;
        r.add_term(e.first, e.second, unit);
      }
  return r;
}

/// exp(c A v) as a polynomial in v, for nilpotent A: the series
/// sum_{k<n} (cA)^k v^k / k! terminates because A^n = 0.
inline MatrixPoly2 nilpotent_exp_poly(const CMatrix& a, Complex c, Variable v = Variable::x,
                                      double tol = kNilpotencyTolerance) {
  require_square(a, "nilpotent_exp_poly");
  if (!is_nilpotent(a, tol)) fail(ErrorKind::NotNilpotent, "||A^n|| exceeds nilpotency tolerance");
  const auto n = a.rows();
  MatrixPoly2 r(n, n);
  CMatrix term = identity(n);
  for (int k = 0; k < static_cast<int>(n); ++k) {
    if (k > 0) term = term * (c * a) * Complex(1.0 / k);
    if (v == Variable::x)
      r.add_term(k, 0, term);
    else
      r.add_term(0, k, term);
  }
  return r;
}

}  // namespace gbdt
