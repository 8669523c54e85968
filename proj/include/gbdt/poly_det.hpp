#pragma once

// Determinant and adjugate over a commutative ring (complex scalars or
// ScalarPoly2). Cofactor expansion for small orders, division-free Berkowitz
// beyond that.

#include <cstddef>
#include <vector>

#include "gbdt/poly2.hpp"

namespace gbdt {

template <class Ring>
struct RingTraits;

template <>
struct RingTraits<Complex> {
  static Complex zero() { return Complex{0.0, 0.0}; }
  static Complex one() { return Complex{1.0, 0.0}; }
};

template <>
struct RingTraits<ScalarPoly2> {
  static ScalarPoly2 zero() { return ScalarPoly2{}; }
  static ScalarPoly2 one() { return ScalarPoly2::constant(Complex{1.0, 0.0}); }
};

/// Dense row-major square matrix over a ring.
template <class Ring>
struct RingMatrix {
  std::size_t n = 0;
  std::vector<Ring> a;

  RingMatrix() = default;
  explicit RingMatrix(std::size_t order) : n(order), a(order * order, RingTraits<Ring>::zero()) {}

  Ring& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const Ring& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  RingMatrix minor(std::size_t row, std::size_t col) const {
    RingMatrix m(n - 1);
    for (std::size_t i = 0, mi = 0; i < n; ++i) {
      if (i == row) continue;
      for (std::size_t j = 0, mj = 0; j < n; ++j) {
        if (j == col) continue;
        m(mi, mj++) = (*this)(i, j);
      }
      ++mi;
    }
    return m;
  }
};

template <class Ring>
RingMatrix<Ring> operator*(const RingMatrix<Ring>& l, const RingMatrix<Ring>& r) {
  RingMatrix<Ring> p(l.n);
  for (std::size_t i = 0; i < l.n; ++i)
    for (std::size_t j = 0; j < l.n; ++j) {
      Ring acc = RingTraits<Ring>::zero();
      for (std::size_t k = 0; k < l.n; ++k) acc = acc + l(i, k) * r(k, j);
      p(i, j) = acc;
    }
  return p;
}

template <class Ring>
Ring det_cofactor(const RingMatrix<Ring>& m) {
  if (m.n == 0) return RingTraits<Ring>::one();
  if (m.n == 1) return m(0, 0);
  if (m.n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Ring acc = RingTraits<Ring>::zero();
  for (std::size_t j = 0; j < m.n; ++j) {
    Ring term = m(0, j) * det_cofactor(m.minor(0, j));
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

template <class Ring>
RingMatrix<Ring> adjugate_cofactor(const RingMatrix<Ring>& m) {
  RingMatrix<Ring> adj(m.n);
  if (m.n == 1) {
    adj(0, 0) = RingTraits<Ring>::one();
    return adj;
  }
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      Ring c = det_cofactor(m.minor(j, i));
      adj(i, j) = ((i + j) % 2 == 0) ? c : RingTraits<Ring>::zero() - c;
    }
  return adj;
}

/// Coefficients [1, c1, ..., cn] of det(lambda I - M) by the Berkowitz
/// algorithm; uses only ring operations.
template <class Ring>
std::vector<Ring> berkowitz_charpoly(const RingMatrix<Ring>& m) {
  const Ring zero = RingTraits<Ring>::zero();
  std::vector<Ring> poly{RingTraits<Ring>::one()};
  for (std::size_t k = 0; k < m.n; ++k) {
    // Leading block is m[0..k) x [0..k); column c = m[0..k, k], row r = m[k, 0..k).
    // First column of the Toeplitz factor: 1, -a_kk, -r c, -r M c, ...
    std::vector<Ring> col{RingTraits<Ring>::one(), zero - m(k, k)};
    std::vector<Ring> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = m(i, k);
    for (std::size_t p = 0; p < k; ++p) {
      Ring rv = zero;
      for (std::size_t i = 0; i < k; ++i) rv = rv + m(k, i) * v[i];
      col.push_back(zero - rv);
      std::vector<Ring> next(k, zero);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) next[i] = next[i] + m(i, j) * v[j];
      v = std::move(next);
    }
    std::vector<Ring> out(poly.size() + 1, zero);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < poly.size() && j <= i; ++j)
        if (i - j < col.size()) out[i] = out[i] + col[i - j] * poly[j];
    poly = std::move(out);
  }
  return poly;
}

template <class Ring>
struct DetAdj {
  Ring det;
  RingMatrix<Ring> adj;
};

/// det and adj via Berkowitz + Cayley-Hamilton:
/// adj(M) = (-1)^(n+1) (M^(n-1) + c1 M^(n-2) + ... + c_(n-1) I).
template <class Ring>
DetAdj<Ring> det_adj_berkowitz(const RingMatrix<Ring>& m) {
  const std::size_t n = m.n;
  const auto c = berkowitz_charpoly(m);
  const Ring zero = RingTraits<Ring>::zero();
  Ring det = (n % 2 == 0) ? c[n] : zero - c[n];

  RingMatrix<Ring> q(n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = RingTraits<Ring>::one();
  for (std::size_t k = 1; k < n; ++k) {
    q = q * m;  // Horner: q <- q M + c_k I
    for (std::size_t i = 0; i < n; ++i) q(i, i) = q(i, i) + c[k];
  }
  if (n % 2 == 0)
    for (auto& e : q.a) e = zero - e;
  return {std::move(det), std::move(q)};
}

enum class DetMethod { automatic, cofactor, berkowitz };

struct PolyDetAdj {
  ScalarPoly2 det;
  MatrixPoly2 adj;
};

inline RingMatrix<ScalarPoly2> to_ring_matrix(const MatrixPoly2& p) {
  if (p.rows() != p.cols()) fail(ErrorKind::ShapeMismatch, "poly_det_adj needs a square polynomial");
  RingMatrix<ScalarPoly2> m(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = entry(p, i, j);
  return m;
}

/// Exact determinant and adjugate of a square matrix polynomial:
/// P * adj = det * I as polynomials.
inline PolyDetAdj poly_det_adj(const MatrixPoly2& p, DetMethod method = DetMethod::automatic) {
  const RingMatrix<ScalarPoly2> m = to_ring_matrix(p);
  const bool cofactor =
      method == DetMethod::cofactor || (method == DetMethod::automatic && m.n <= 4);
  DetAdj<ScalarPoly2> da = cofactor ? DetAdj<ScalarPoly2>{det_cofactor(m), adjugate_cofactor(m)}
                                    : det_adj_berkowitz(m);
  const auto n = p.rows();
  return {std::move(da.det), from_entries(n, n, da.adj.a)};
}

}  // namespace gbdt
