#pragma once

// Residual oracles: each identity the transformation is supposed to satisfy,
// evaluated independently of the machinery that produced the data.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbdt/engine.hpp"
#include "gbdt/grid.hpp"

namespace gbdt {

struct ResidualReport {
  ResidualReport() = default;
  ResidualReport(std::string label, std::string lattice)
      : name(std::move(label)), grid(std::move(lattice)) {}

  std::string name;
  std::string grid;  // human-readable description of the sample lattice
  double max_residual = 0.0;
  std::optional<double> convergence_order;  // set only when two steps were run
  std::optional<double> refined_residual;   // residual at h / 2
  double tolerance = 0.0;
  double h = 0.0;  // finite-difference step, 0 for algebraic checks
  bool pass = false;
  std::string details;
  std::vector<std::pair<std::string, std::vector<double>>> extras;  // named auxiliary values

  void judge() { pass = std::isfinite(max_residual) && max_residual <= tolerance; }
};

using RhoField = std::function<CMatrix(double, double)>;

/// ||A S - S A* - i Pi B Pi*|| / max(1, ||A|| ||S||)
inline double identity_drift(const GBDTState& state, const GBDTParams& p, const SeedSpec& spec) {
  const CMatrix r =
      p.A * state.S - state.S * p.A.adjoint() - kI * state.Pi * spec.B() * state.Pi.adjoint();
  return frob(r) / std::max(1.0, frob(p.A) * frob(state.S));
}

/// [D, rho_t] - [D^, rho_x] - [[D, rho], [D^, rho]]
inline CMatrix nwave_pointwise(const CMatrix& rho, const CMatrix& rho_x, const CMatrix& rho_t,
                               const CMatrix& d, const CMatrix& dh) {
  return commutator(d, rho_t) - commutator(dh, rho_x) -
         commutator(commutator(d, rho), commutator(dh, rho));
}

/// G_t - F_x + [G, F] with G = izD - [D, rho], F = izD^ - [D^, rho].
inline CMatrix zero_curvature_pointwise(const CMatrix& rho, const CMatrix& rho_x,
                                        const CMatrix& rho_t, const CMatrix& d,
                                        const CMatrix& dh, Complex z) {
  const CMatrix g = kI * z * d - commutator(d, rho);
  const CMatrix f = kI * z * dh - commutator(dh, rho);
  const CMatrix g_t = -commutator(d, rho_t);
  const CMatrix f_x = -commutator(dh, rho_x);
  return g_t - f_x + commutator(g, f);
}

namespace detail {

inline std::string lattice_label(const Grid<CMatrix>& g) {
  return std::to_string(g.nx) + "x" + std::to_string(g.nt) + " lattice";
}

template <class Pointwise>
ResidualReport grid_report(const std::string& name, const Grid<CMatrix>& g, double tol,
                           const Pointwise& pointwise) {
  g.require_min_size();
  ResidualReport r{name, lattice_label(g)};
  r.h = std::max(g.hx, g.ht);
  r.tolerance = tol;
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i)
      r.max_residual = std::max(
          r.max_residual, frob(pointwise(g.at(i, j), grid_dx(g, i, j), grid_dt(g, i, j))));
  r.judge();
  return r;
}

/// rho_x and rho_t of a field at one point by second-order stencils.
inline std::pair<CMatrix, CMatrix> field_derivatives(const RhoField& rho, double x, double t,
                                                     double h, const StencilDomain& dom) {
  const CMatrix rx = stencil_derivative([&](double s) { return CMatrix(rho(s, t)); }, x, h, dom.x_min);
  const CMatrix rt = stencil_derivative([&](double s) { return CMatrix(rho(x, s)); }, t, h, dom.t_min);
  return {rx, rt};
}

}  // namespace detail

inline ResidualReport nwave_residual(const Grid<CMatrix>& rho, const CMatrix& d, const CMatrix& dh,
                                     double tol) {
  return detail::grid_report("nwave", rho, tol, [&](const CMatrix& r, const CMatrix& rx, const CMatrix& rt) {
    return nwave_pointwise(r, rx, rt, d, dh);
  });
}

inline ResidualReport zero_curvature_residual(const Grid<CMatrix>& rho, const CMatrix& d,
                                              const CMatrix& dh, Complex z, double tol) {
  return detail::grid_report("zero_curvature", rho, tol,
                             [&](const CMatrix& r, const CMatrix& rx, const CMatrix& rt) {
                               return zero_curvature_pointwise(r, rx, rt, d, dh, z);
                             });
}

/// Max over samples of the N-wave residual of a field given as a callable.
inline double nwave_residual_at(const RhoField& rho, const std::vector<SamplePoint>& samples,
                                const CMatrix& d, const CMatrix& dh, double h,
                                const StencilDomain& dom = {}) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const auto [rx, rt] = detail::field_derivatives(rho, s.x, s.t, h, dom);
    worst = std::max(worst, frob(nwave_pointwise(rho(s.x, s.t), rx, rt, d, dh)));
  }
  return worst;
}

inline double zero_curvature_residual_at(const RhoField& rho,
                                         const std::vector<SamplePoint>& samples,
                                         const CMatrix& d, const CMatrix& dh, Complex z, double h,
                                         const StencilDomain& dom = {}) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const auto [rx, rt] = detail::field_derivatives(rho, s.x, s.t, h, dom);
    worst = std::max(worst, frob(zero_curvature_pointwise(rho(s.x, s.t), rx, rt, d, dh, z)));
  }
  return worst;
}

/// Runs `residual_at` at h and h/2 and fills the order estimate.
inline ResidualReport refine_report(std::string name, std::string grid, double tol, double h,
                                    const std::function<double(double)>& residual_at,
                                    bool refine = true) {
  ResidualReport r{std::move(name), std::move(grid)};
  r.h = h;
  r.tolerance = tol;
  r.max_residual = residual_at(h);
  if (refine) {
    r.refined_residual = residual_at(0.5 * h);
    const double order = convergence_order(r.max_residual, *r.refined_residual);
    if (std::isfinite(order)) r.convergence_order = order;
  }
  r.judge();
  return r;
}

/// rho - B Pi* S^{-1} Pi without the symmetry gate.
inline CMatrix rho_tilde_raw(const GBDTState& state, const SeedSpec& spec,
                             double condition_limit = kDefaultConditionLimit) {
  return spec.rho(state.x, state.t) -
         spec.B() * state.Pi.adjoint() * solve_s(state, state.Pi, condition_limit);
}

using MatrixOfX = std::function<CMatrix(double)>;

/// max_x ||d/dx W - (izD - [D, rho_new]) W + W (izD - [D, rho_old])|| for
/// arbitrary callables W(x), rho_new(x), rho_old(x).
inline double darboux_ode_defect(const MatrixOfX& w, const MatrixOfX& rho_new,
                                 const MatrixOfX& rho_old, const CMatrix& d,
                                 const std::vector<double>& xs, Complex z, double h,
                                 const StencilDomain& dom = {}) {
  double worst = 0.0;
  for (double x : xs) {
    const CMatrix wv = w(x);
    const CMatrix wx = stencil_derivative(w, x, h, dom.x_min);
    const CMatrix g_new = kI * z * d - commutator(d, rho_new(x));
    const CMatrix g_old = kI * z * d - commutator(d, rho_old(x));
    worst = std::max(worst, frob(wx - g_new * wv + wv * g_old));
  }
  return worst;
}

/// The Darboux ODE defect of w_A(x, t, z) at fixed t.
inline double darboux_ode_residual_at(const GBDTParams& p, const SeedSpec& spec,
                                      const std::vector<double>& xs, double t, Complex z, double h,
                                      const PropagateOptions& opts = {},
                                      const StencilDomain& dom = {}) {
  auto wa = [&](double x) {
    return darboux_matrix(p, propagate(p, spec, x, t, opts), spec, z, opts.condition_limit).value;
  };
  auto rho_new = [&](double x) {
    return rho_tilde_raw(propagate(p, spec, x, t, opts), spec, opts.condition_limit);
  };
  auto rho_old = [&](double x) { return spec.rho(x, t); };
  return darboux_ode_defect(wa, rho_new, rho_old, spec.D(), xs, z, h, dom);
}

inline ResidualReport darboux_ode_residual(const GBDTParams& p, const SeedSpec& spec,
                                           const std::vector<double>& xs, double t, Complex z,
                                           double h, double tol, const PropagateOptions& opts = {},
                                           const StencilDomain& dom = {}, bool refine = true) {
  return refine_report("darboux_ode", std::to_string(xs.size()) + " x-samples", tol, h,
                       [&](double step) { return darboux_ode_residual_at(p, spec, xs, t, z, step, opts, dom); },
                       refine);
}

/// Right-hand sides of the Pi equations.
inline CMatrix pi_x_rhs(const CMatrix& a, const CMatrix& pi, const CMatrix& d, const CMatrix& rho) {
  return -kI * a * pi * d + pi * commutator(d, rho);
}

struct ConservationResidual {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Both compatibility conditions with Pi_x and Pi_t replaced by their
/// evolution right-hand sides; relative to the size of the left sides.
inline ConservationResidual conservation_pointwise(const GBDTParams& p, const SeedSpec& spec,
                                                   const GBDTState& st) {
  const CMatrix d = spec.D(), dh = spec.Dhat(), b = spec.B();
  const CMatrix rho = spec.rho(st.x, st.t);
  const CMatrix rho_x = spec.rho_x(st.x, st.t);
  const CMatrix rho_t = spec.rho_t(st.x, st.t);
  const CMatrix pix = pi_x_rhs(p.A, st.Pi, d, rho);
  const CMatrix pit = pi_x_rhs(p.A, st.Pi, dh, rho);

  const CMatrix c1_lhs = -kI * p.A * pit * d + pit * commutator(d, rho) + st.Pi * commutator(d, rho_t);
  const CMatrix c1_rhs = -kI * p.A * pix * dh + pix * commutator(dh, rho) + st.Pi * commutator(dh, rho_x);
  const CMatrix c2_lhs = pit * d * b * st.Pi.adjoint() + st.Pi * d * b * pit.adjoint();
  const CMatrix c2_rhs = pix * dh * b * st.Pi.adjoint() + st.Pi * dh * b * pix.adjoint();
  return {frob(c1_lhs - c1_rhs) / std::max(1.0, frob(c1_lhs)),
          frob(c2_lhs - c2_rhs) / std::max(1.0, frob(c2_lhs))};
}

inline std::pair<ResidualReport, ResidualReport> conservation_residual(
    const GBDTParams& p, const SeedSpec& spec, const std::vector<GBDTState>& states, double tol) {
  ResidualReport c1{"conservation_c1", std::to_string(states.size()) + " states"};
  ResidualReport c2{"conservation_c2", c1.grid};
  c1.tolerance = c2.tolerance = tol;
  for (const auto& st : states) {
    const auto r = conservation_pointwise(p, spec, st);
    c1.max_residual = std::max(c1.max_residual, r.c1);
    c2.max_residual = std::max(c2.max_residual, r.c2);
  }
  c1.judge();
  c2.judge();
  return {c1, c2};
}

struct MixedPartialResidual {
  double pi = 0.0;
  double s = 0.0;
};

/// Finite-difference d/dt of the Pi_x (and S_x) right-hand side against
/// d/dx of the Pi_t (and S_t) right-hand side on propagated states, relative
/// to max(1, ||d/dt Pi_x||) (resp. S).
inline MixedPartialResidual mixed_partial_at(const GBDTParams& p, const SeedSpec& spec,
                                             const std::vector<SamplePoint>& samples, double h,
                                             const PropagateOptions& opts = {},
                                             const StencilDomain& dom = {}) {
  const CMatrix d = spec.D(), dh = spec.Dhat(), b = spec.B();
  MixedPartialResidual worst;
  for (const auto& smp : samples) {
    auto pi_x = [&](double t) {
      const auto st = propagate(p, spec, smp.x, t, opts);
      return pi_x_rhs(p.A, st.Pi, d, spec.rho(smp.x, t));
    };
    auto pi_t = [&](double x) {
      const auto st = propagate(p, spec, x, smp.t, opts);
      return pi_x_rhs(p.A, st.Pi, dh, spec.rho(x, smp.t));
    };
    auto s_x = [&](double t) {
      const auto st = propagate(p, spec, smp.x, t, opts);
      return CMatrix(st.Pi * d * b * st.Pi.adjoint());
    };
    auto s_t = [&](double x) {
      const auto st = propagate(p, spec, x, smp.t, opts);
      return CMatrix(st.Pi * dh * b * st.Pi.adjoint());
    };
    const CMatrix pi_xt = stencil_derivative(pi_x, smp.t, h, dom.t_min);
    const CMatrix pi_tx = stencil_derivative(pi_t, smp.x, h, dom.x_min);
    const CMatrix s_xt = stencil_derivative(s_x, smp.t, h, dom.t_min);
    const CMatrix s_tx = stencil_derivative(s_t, smp.x, h, dom.x_min);
    worst.pi = std::max(worst.pi, frob(pi_xt - pi_tx) / std::max(1.0, frob(pi_xt)));
    worst.s = std::max(worst.s, frob(s_xt - s_tx) / std::max(1.0, frob(s_xt)));
  }
  return worst;
}

/// max_z ||w_A(z) B w_A(conj z)* - B||
inline ResidualReport j_unitarity(const GBDTParams& p, const GBDTState& state,
                                  const SeedSpec& spec, const std::vector<Complex>& zs,
                                  double tol, double condition_limit = kDefaultConditionLimit) {
  ResidualReport r{"j_unitarity", std::to_string(zs.size()) + " z-samples"};
  r.tolerance = tol;
  const CMatrix b = spec.B();
  for (Complex z : zs) {
    const CMatrix w = darboux_matrix(p, state, spec, z, condition_limit).value;
    const CMatrix wbar = darboux_matrix(p, state, spec, std::conj(z), condition_limit).value;
    r.max_residual = std::max(r.max_residual, frob(w * b * wbar.adjoint() - b));
  }
  r.judge();
  return r;
}

/// ||rho~* - B rho~ B|| / max(1, ||rho~||)
inline double symmetry_check(const CMatrix& rho_t, const CMatrix& b) {
  return symmetry_defect(rho_t, b);
}

}  // namespace gbdt
