#pragma once

// GBDT engine: evolution of Pi(x,t), S(x,t) from (A, Pi(0,0), S(0,0)),
//   Pi_x = -i A Pi D + Pi [D, rho],   S_x = Pi D B Pi*,
//   Pi_t = -i A Pi D^ + Pi [D^, rho], S_t = Pi D^ B Pi*,
// the Darboux matrix w_A = I - i B Pi* S^{-1} (A - zI)^{-1} Pi, the
// transformed potential rho~ = rho - B Pi* S^{-1} Pi and transformed wave
// functions.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "gbdt/matrix_core.hpp"
#include "gbdt/seed.hpp"

namespace gbdt {

struct GBDTParams {
  CMatrix A;
  CMatrix Pi0;
  CMatrix S0;

  Eigen::Index n() const { return A.rows(); }
};

struct ParamDiagnostics {
  double identity_residual = 0.0;   // ||A S0 - S0 A* - i Pi0 B Pi0*||
  double hermiticity_defect = 0.0;  // ||S0 - S0*||
  double scale = 1.0;               // max(1, ||A|| ||S0|| + ||Pi0||^2)

  bool ok(double tol) const {
    return identity_residual <= tol * scale && hermiticity_defect <= tol * scale;
  }
};

inline ParamDiagnostics validate_gbdt_params(const GBDTParams& p, const SeedSpec& spec) {
  const auto n = p.A.rows();
  require_square(p.A, "A");
  if (n == 0) fail(ErrorKind::ShapeMismatch, "transformation order n must be positive");
  if (p.Pi0.rows() != n || p.Pi0.cols() != spec.m())
    fail(ErrorKind::ShapeMismatch, "Pi0 must be n x m");
  if (p.S0.rows() != n || p.S0.cols() != n) fail(ErrorKind::ShapeMismatch, "S0 must be n x n");
  if (spec.b().size() != spec.m()) fail(ErrorKind::ShapeMismatch, "b must have length m");
  require_finite(p.A, "A");
  require_finite(p.Pi0, "Pi0");
  require_finite(p.S0, "S0");

  const CMatrix b = spec.B();
  ParamDiagnostics d;
  d.identity_residual =
      frob(p.A * p.S0 - p.S0 * p.A.adjoint() - kI * p.Pi0 * b * p.Pi0.adjoint());
  d.hermiticity_defect = hermiticity_defect(p.S0);
  d.scale = std::max(1.0, frob(p.A) * frob(p.S0) + p.Pi0.squaredNorm());
  return d;
}

inline void require_admissible(const GBDTParams& p, const SeedSpec& spec, double tol = 1e-10) {
  const auto seed_violations = validate_seed(spec);
  if (!seed_violations.empty())
    fail(ErrorKind::InvalidArgument, "invalid seed: " + seed_violations.front());
  const auto d = validate_gbdt_params(p, spec);
  if (d.hermiticity_defect > tol * d.scale)
    fail(ErrorKind::IdentityViolated, "S0 is not Hermitian");
  if (d.identity_residual > tol * d.scale)
    fail(ErrorKind::IdentityViolated,
         "A S0 - S0 A* != i Pi0 B Pi0*, residual " + std::to_string(d.identity_residual));
}

/// Builds Pi0 with A S0 - S0 A* = i Pi0 B Pi0* by factoring the Hermitian
/// matrix -i(A S0 - S0 A*) over the signature of B.
inline CMatrix admissible_pi0(const CMatrix& a, const CMatrix& s0, const RVector& b,
                              double rel_tol = 1e-12) {
  require_square(a, "A");
  const auto n = a.rows();
  const CMatrix k = hermitian_part(-kI * (a * s0 - s0 * a.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(k);
  const double cutoff = rel_tol * std::max(1.0, frob(k));
  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index i = 0; i < b.size(); ++i) (b(i) > 0 ? plus : minus).push_back(i);
  CMatrix pi0 = CMatrix::Zero(n, b.size());
  std::size_t used_plus = 0, used_minus = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ev = eig.eigenvalues()(i);
    if (std::abs(ev) <= cutoff) continue;
    auto& pool = ev > 0 ? plus : minus;
    auto& used = ev > 0 ? used_plus : used_minus;
    if (used >= pool.size())
      fail(ErrorKind::InvalidArgument, "signature of B cannot carry -i(A S0 - S0 A*)");
    pi0.col(pool[used++]) = eig.eigenvectors().col(i) * std::sqrt(std::abs(ev));
  }
  return pi0;
}

enum class Method { exact, rk4 };
enum class PathOrder { t_then_x, x_then_t };
enum class Axis { x, t };

struct PropagateOptions {
  Method method = Method::exact;
  double h = 1e-3;
  PathOrder order = PathOrder::t_then_x;
  bool allow_negative = false;
  bool estimate_error = true;
  double local_error_tol = 1e-8;
  double identity_tol = 1e-10;
  double condition_limit = kDefaultConditionLimit;
};

struct GBDTState {
  double x = 0.0;
  double t = 0.0;
  CMatrix Pi;
  CMatrix S;
  double local_error = 0.0;  // largest Richardson estimate seen on the rk4 path
};

inline GBDTState initial_state(const GBDTParams& p) { return {0.0, 0.0, p.Pi0, p.S0, 0.0}; }

inline void check_domain(double x, double t, const PropagateOptions& opts) {
  if (!opts.allow_negative && (x < 0.0 || t < 0.0))
    fail(ErrorKind::DomainViolation,
         "negative coordinates require the allow-negative-domain flag");
}

namespace detail {

/// Closed-form leg for rho = 0. Column k of Pi evolves as exp(-i c_k L A) q_k
/// and S gains c_k b_k * int_0^L e^{Fs} q_k q_k* e^{F*s} ds with F = -i c_k A;
/// the integral is the (1,2) block of exp(L [[F, q q*], [0, -F*]]) times
/// exp(L F)*.
inline void exact_leg(const CMatrix& a, const RVector& c, const RVector& b, double length,
                      CMatrix& pi, CMatrix& s) {
  if (length == 0.0) return;
  const auto n = a.rows();
  CMatrix block = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < pi.cols(); ++k) {
    const CMatrix f = -kI * c(k) * a;
    const CVector q = pi.col(k);
    block.topLeftCorner(n, n) = f;
    block.topRightCorner(n, n) = q * q.adjoint();
    block.bottomRightCorner(n, n) = -f.adjoint();
    const CMatrix e = (length * block).exp();
    const CMatrix efl = e.topLeftCorner(n, n);
    s += (c(k) * b(k)) * (e.topRightCorner(n, n) * efl.adjoint());
    pi.col(k) = efl * q;
  }
}

struct Rk4Slope {
  CMatrix pi;
  CMatrix s;
};

inline Rk4Slope rk4_rhs(const CMatrix& a, const CMatrix& c, const CMatrix& cb, const CMatrix& rho,
                        const CMatrix& pi) {
  return {-kI * a * pi * c + pi * commutator(c, rho), pi * cb * pi.adjoint()};
}

}  // namespace detail

/// Moves `state` along one axis to coordinate `target`.
inline GBDTState advance(const GBDTParams& p, const SeedSpec& spec, GBDTState state, Axis axis,
                         double target, const PropagateOptions& opts) {
  const double start = axis == Axis::x ? state.x : state.t;
  const double length = target - start;
  const RVector& coeffs = axis == Axis::x ? spec.d() : spec.dhat();

  if (opts.method == Method::exact) {
    if (!spec.is_zero_seed())
      fail(ErrorKind::InvalidArgument, "exact propagation requires the zero seed");
    detail::exact_leg(p.A, coeffs, spec.b(), length, state.Pi, state.S);
  } else if (length != 0.0) {
    if (!(opts.h > 0.0)) fail(ErrorKind::InvalidArgument, "rk4 step must be positive");
    const CMatrix c = diag_matrix(coeffs);
    const CMatrix cb = c * spec.B();
    const auto steps = static_cast<long>(std::max(1.0, std::ceil(std::abs(length) / opts.h - 1e-9)));
    const double h = length / static_cast<double>(steps);
    const double fixed = axis == Axis::x ? state.t : state.x;
    auto rho_at = [&](double s) { return axis == Axis::x ? spec.rho(s, fixed) : spec.rho(fixed, s); };

    auto step = [&](double s0, const CMatrix& pi, const CMatrix& sm, double dh, CMatrix& pi_out,
                    CMatrix& s_out) {
      const CMatrix r0 = rho_at(s0);
      const CMatrix rm = rho_at(s0 + 0.5 * dh);
      const CMatrix r1 = rho_at(s0 + dh);
      const auto k1 = detail::rk4_rhs(p.A, c, cb, r0, pi);
      const auto k2 = detail::rk4_rhs(p.A, c, cb, rm, pi + 0.5 * dh * k1.pi);
      const auto k3 = detail::rk4_rhs(p.A, c, cb, rm, pi + 0.5 * dh * k2.pi);
      const auto k4 = detail::rk4_rhs(p.A, c, cb, r1, pi + dh * k3.pi);
      pi_out = pi + (dh / 6.0) * (k1.pi + 2.0 * k2.pi + 2.0 * k3.pi + k4.pi);
      s_out = sm + (dh / 6.0) * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    };

    CMatrix pi = state.Pi, sm = state.S, pi1, s1, pih, sh, pi2, s2;
    for (long i = 0; i < steps; ++i) {
      const double s0 = start + static_cast<double>(i) * h;
      step(s0, pi, sm, h, pi1, s1);
      if (opts.estimate_error) {
        step(s0, pi, sm, 0.5 * h, pih, sh);
        step(s0 + 0.5 * h, pih, sh, 0.5 * h, pi2, s2);
        const double scale = std::max(1.0, std::sqrt(pi2.squaredNorm() + s2.squaredNorm()));
        const double err =
            std::sqrt((pi2 - pi1).squaredNorm() + (s2 - s1).squaredNorm()) / 15.0 / scale;
        state.local_error = std::max(state.local_error, err);
        if (err > opts.local_error_tol)
          fail(ErrorKind::StepTooLarge, "rk4 local error estimate " + std::to_string(err) +
                                            " exceeds tolerance");
      }
      pi.swap(pi1);
      sm.swap(s1);
    }
    state.Pi = std::move(pi);
    state.S = std::move(sm);
  }
  state.S = hermitian_part(state.S);
  (axis == Axis::x ? state.x : state.t) = target;
  return state;
}

/// Pi(x,t) and S(x,t). The default path runs the t-leg at x = 0 and then the
/// x-leg at fixed t.
inline GBDTState propagate(const GBDTParams& p, const SeedSpec& spec, double x, double t,
                           const PropagateOptions& opts = {}) {
  check_domain(x, t, opts);
  require_admissible(p, spec, opts.identity_tol);
  GBDTState s = initial_state(p);
  if (opts.order == PathOrder::t_then_x) {
    s = advance(p, spec, std::move(s), Axis::t, t, opts);
    s = advance(p, spec, std::move(s), Axis::x, x, opts);
  } else {
    s = advance(p, spec, std::move(s), Axis::x, x, opts);
    s = advance(p, spec, std::move(s), Axis::t, t, opts);
  }
  return s;
}

namespace detail {

/// States at every target along `axis`, marching outward from `origin` so the
/// rk4 path reuses earlier legs.
inline std::vector<GBDTState> march(const GBDTParams& p, const SeedSpec& spec,
                                    const GBDTState& origin, Axis axis,
                                    const std::vector<double>& targets,
                                    const PropagateOptions& opts) {
  std::vector<GBDTState> out(targets.size());
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const double base = axis == Axis::x ? origin.x : origin.t;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(targets[a] - base) < std::abs(targets[b] - base);
  });
  GBDTState up = origin, down = origin;
  for (std::size_t idx : order) {
    GBDTState& from = targets[idx] >= base ? up : down;
    from = advance(p, spec, from, axis, targets[idx], opts);
    out[idx] = from;
  }
  return out;
}

}  // namespace detail

/// States on the lattice xs x ts, stored t-major (index j * xs.size() + i).
inline std::vector<GBDTState> propagate_grid(const GBDTParams& p, const SeedSpec& spec,
                                             const std::vector<double>& xs,
                                             const std::vector<double>& ts,
                                             const PropagateOptions& opts = {}) {
  for (double x : xs) check_domain(x, 0.0, opts);
  for (double t : ts) check_domain(0.0, t, opts);
  require_admissible(p, spec, opts.identity_tol);
  std::vector<GBDTState> out;
  out.reserve(xs.size() * ts.size());
  const auto rows = detail::march(p, spec, initial_state(p), Axis::t, ts, opts);
  for (const auto& row_start : rows) {
    auto row = detail::march(p, spec, row_start, Axis::x, xs, opts);
    for (auto& s : row) out.push_back(std::move(s));
  }
  return out;
}

/// S(x,t)^{-1} rhs. S is built from S0 and integrals of Pi D B Pi*, so ||Pi||^2
/// is the reference scale against which a vanishing S counts as a pole.
inline CMatrix solve_s(const GBDTState& state, const CMatrix& rhs,
                       double condition_limit = kDefaultConditionLimit) {
  const double ref = std::max(frob(state.S), state.Pi.squaredNorm());
  return cmat_solve(state.S, rhs, condition_limit, ref).x;
}

struct WaveSample {
  Complex z;
  CMatrix value;
};

/// w_A(x,t,z) = I - i B Pi* S^{-1} (A - zI)^{-1} Pi.
inline WaveSample darboux_matrix(const GBDTParams& p, const GBDTState& state, const SeedSpec& spec,
                                 Complex z, double condition_limit = kDefaultConditionLimit) {
  check_resolvent(p.A, z);
  const auto n = p.A.rows();
  const CMatrix resolvent_pi = (p.A - z * identity(n)).partialPivLu().solve(state.Pi);
  const CMatrix x = solve_s(state, resolvent_pi, condition_limit);
  return {z, identity(spec.m()) - kI * spec.B() * state.Pi.adjoint() * x};
}

/// ||rho* - B rho B|| / max(1, ||rho||)
inline double symmetry_defect(const CMatrix& rho, const CMatrix& b) {
  return frob(rho.adjoint() - b * rho * b) / std::max(1.0, frob(rho));
}

/// rho~ = rho - B Pi* S^{-1} Pi at the state's point.
inline CMatrix transformed_potential(const GBDTState& state, const SeedSpec& spec,
                                     double symmetry_tol = 1e-12,
                                     double condition_limit = kDefaultConditionLimit) {
  const CMatrix b = spec.B();
  const CMatrix x = solve_s(state, state.Pi, condition_limit);
  CMatrix rt = spec.rho(state.x, state.t) - b * state.Pi.adjoint() * x;
  const double defect = symmetry_defect(rt, b);
  if (defect > symmetry_tol)
    fail(ErrorKind::SymmetryViolated,
         "rho~* != B rho~ B, relative defect " + std::to_string(defect));
  return rt;
}

/// Seed wave function w(x,t,z) normalized at the origin: exp(iz(xD + tD^))
/// for the zero seed, otherwise the supplied callback or an rk4 integration
/// (t-leg at x = 0, then x-leg).
inline CMatrix seed_wave(const SeedSpec& spec, double x, double t, Complex z,
                         const PropagateOptions& opts = {}) {
  const auto m = spec.m();
  if (spec.is_zero_seed()) {
    CMatrix w = CMatrix::Zero(m, m);
    for (Eigen::Index k = 0; k < m; ++k) w(k, k) = std::exp(kI * z * (x * spec.d()(k) + t * spec.dhat()(k)));
    return w;
  }
  const auto& cs = std::get<CallableSeed>(spec.seed());
  if (cs.wave) return cs.wave(x, t, z);

  auto integrate = [&](CMatrix w, Axis axis, double length, double fixed) {
    if (length == 0.0) return w;
    const auto steps = static_cast<long>(std::max(1.0, std::ceil(std::abs(length) / opts.h - 1e-9)));
    const double h = length / static_cast<double>(steps);
    auto coeff = [&](double s) { return axis == Axis::x ? spec.G(s, fixed, z) : spec.F(fixed, s, z); };
    for (long i = 0; i < steps; ++i) {
      const double s0 = static_cast<double>(i) * h;
      const CMatrix g0 = coeff(s0), gm = coeff(s0 + 0.5 * h), g1 = coeff(s0 + h);
      const CMatrix k1 = g0 * w;
      const CMatrix k2 = gm * (w + 0.5 * h * k1);
      const CMatrix k3 = gm * (w + 0.5 * h * k2);
      const CMatrix k4 = g1 * (w + h * k3);
      w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return w;
  };
  CMatrix w = integrate(identity(m), Axis::t, t, 0.0);
  return integrate(std::move(w), Axis::x, x, t);
}

/// w~(x,t,z) = w_A(x,t,z) w(x,t,z) w_A(0,0,z)^{-1}, with the inverse taken
/// from B-unitarity: w_A(0,0,z)^{-1} = B w_A(0,0,conj z)* B.
inline WaveSample transformed_wave(const GBDTParams& p, const SeedSpec& spec, double x, double t,
                                   Complex z, const PropagateOptions& opts = {}) {
  check_domain(x, t, opts);
  if (x == 0.0 && t == 0.0) {
    require_admissible(p, spec, opts.identity_tol);
    return {z, identity(spec.m())};
  }
  const GBDTState state = propagate(p, spec, x, t, opts);
  const CMatrix b = spec.B();
  const CMatrix wa = darboux_matrix(p, state, spec, z, opts.condition_limit).value;
  const CMatrix wa0bar =
      darboux_matrix(p, initial_state(p), spec, std::conj(z), opts.condition_limit).value;
  const CMatrix inv0 = b * wa0bar.adjoint() * b;
  return {z, wa * seed_wave(spec, x, t, z, opts) * inv0};
}

/// Normalized fundamental solution w~(x,z) of the transformed x-system.
inline WaveSample transformed_fundamental(const GBDTParams& p, const SeedSpec& spec, double x,
                                          Complex z, const PropagateOptions& opts = {}) {
  return transformed_wave(p, spec, x, 0.0, z, opts);
}

enum class DiracKind { selfadjoint, skewselfadjoint };

/// Dirac-type potential v from the upper-right m1 x m2 block of rho~:
/// v = 2i rho~12 (self-adjoint, B = j) or v = -2 rho~12 (skew-self-adjoint,
/// B = I), where D = j = diag(I_m1, -I_m2).
inline CMatrix dirac_view(const CMatrix& rho_t, const SeedSpec& spec, Eigen::Index m1,
                          Eigen::Index m2, DiracKind kind) {
  const auto m = spec.m();
  if (m1 < 1 || m2 < 1 || m1 + m2 != m || rho_t.rows() != m || rho_t.cols() != m)
    fail(ErrorKind::ShapeMismatch, "dirac_view needs m1 + m2 = m and an m x m potential");
  for (Eigen::Index k = 0; k < m; ++k) {
    const double j = k < m1 ? 1.0 : -1.0;
    if (spec.d()(k) != j) fail(ErrorKind::ConventionMismatch, "D must equal j = diag(I, -I)");
    const double expected_b = kind == DiracKind::selfadjoint ? j : 1.0;
    if (spec.b()(k) != expected_b)
      fail(ErrorKind::ConventionMismatch, kind == DiracKind::selfadjoint
                                              ? "self-adjoint view needs B = j"
                                              : "skew-self-adjoint view needs B = I");
  }
  const CMatrix block = rho_t.topRightCorner(m1, m2);
  return kind == DiracKind::selfadjoint ? CMatrix(2.0 * kI * block) : CMatrix(-2.0 * block);
}

}  // namespace gbdt
