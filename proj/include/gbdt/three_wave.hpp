#pragma once

// m = 3, B = I: rescaling the off-diagonal entries of rho~ gives the 3-wave
// interaction system
//   phi1_t + psi1 phi1_x = i eps conj(phi2) phi3
//   phi2_t + psi2 phi2_x = i eps conj(phi1) phi3
//   phi3_t + psi3 phi3_x = i eps phi1 phi2
// and, for real data with A = -conj(A), the real resonance system in
// the real fields -i phi_k.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gbdt/engine.hpp"
#include "gbdt/grid.hpp"

namespace gbdt {

struct ThreeWaveCoefficients {
  std::array<double, 3> psi{};
  double eps = 0.0;
};

/// Numerator of eps; antisymmetric under D <-> D^.
inline double three_wave_eps_numerator(const RVector& d, const RVector& dh) {
  return d(0) * dh(1) - d(1) * dh(0) + d(1) * dh(2) - d(2) * dh(1) + d(2) * dh(0) - d(0) * dh(2);
}

inline ThreeWaveCoefficients three_wave_coefficients(const RVector& d, const RVector& dh) {
  if (d.size() != 3 || dh.size() != 3)
    fail(ErrorKind::ShapeMismatch, "three-wave form needs m = 3");
  if (!(d(0) > d(1) && d(1) > d(2)))
    fail(ErrorKind::OrderingViolated, "three-wave form needs d1 > d2 > d3");
  const double d12 = d(0) - d(1), d23 = d(1) - d(2), d13 = d(0) - d(2);
  ThreeWaveCoefficients c;
  c.psi = {(dh(1) - dh(0)) / d12, (dh(2) - dh(1)) / d23, (dh(2) - dh(0)) / d13};
  c.eps = three_wave_eps_numerator(d, dh) / std::sqrt(d12 * d13 * d23);
  return c;
}

struct ThreeWaveFrame {
  std::array<double, 3> psi{};
  double eps = 0.0;
  std::array<Grid<Complex>, 3> phi;
  bool real_mode = false;
};

inline void require_three_wave_spec(const SeedSpec& spec) {
  if (spec.m() != 3) fail(ErrorKind::ShapeMismatch, "three-wave form needs m = 3");
  for (Eigen::Index k = 0; k < 3; ++k)
    if (spec.b()(k) != 1.0) fail(ErrorKind::SignatureViolated, "three-wave form needs B = I");
}

/// (phi1, phi2, phi3) from a single rho~ sample.
inline std::array<Complex, 3> three_wave_fields(const CMatrix& rho, const RVector& d) {
  return {-kI * std::sqrt(d(0) - d(1)) * rho(0, 1), -kI * std::sqrt(d(1) - d(2)) * rho(1, 2),
          -kI * std::sqrt(d(0) - d(2)) * rho(0, 2)};
}

inline ThreeWaveFrame three_wave_map(const SeedSpec& spec, const Grid<CMatrix>& rho_grid,
                                     bool real_mode = false) {
  const auto coeffs = three_wave_coefficients(spec.d(), spec.dhat());
  require_three_wave_spec(spec);
  ThreeWaveFrame f;
  f.psi = coeffs.psi;
  f.eps = coeffs.eps;
  f.real_mode = real_mode;
  for (auto& g : f.phi) {
    g = Grid<Complex>{rho_grid.x0, rho_grid.t0, rho_grid.hx, rho_grid.ht, rho_grid.nx, rho_grid.nt, {}};
    g.values.reserve(rho_grid.values.size());
  }
  for (const CMatrix& rho : rho_grid.values) {
    if (rho.rows() != 3 || rho.cols() != 3) fail(ErrorKind::ShapeMismatch, "rho~ must be 3 x 3");
    const auto phi = three_wave_fields(rho, spec.d());
    for (int k = 0; k < 3; ++k) f.phi[k].values.push_back(phi[k]);
  }
  return f;
}

/// Violations of the real-reduction hypotheses: real seed, A = -conj(A), and
/// real Pi(0,0), S(0,0).
inline std::vector<std::string> real_reduction_check(
    const GBDTParams& p, const SeedSpec& spec,
    const std::vector<SamplePoint>& samples = default_seed_samples(), double tol = 1e-12) {
  std::vector<std::string> out;
  if (!spec.is_zero_seed()) {
    for (const auto& s : samples) {
      if (spec.rho(s.x, s.t).imag().norm() > tol) {
        out.push_back("rho != conj(rho) at (" + std::to_string(s.x) + ", " + std::to_string(s.t) + ")");
        break;
      }
    }
  }
  if (frob(p.A + p.A.conjugate()) > tol * std::max(1.0, frob(p.A)))
    out.emplace_back("A != -conj(A)");
  if (p.Pi0.imag().norm() > tol * std::max(1.0, frob(p.Pi0))) out.emplace_back("Pi0 not real");
  if (p.S0.imag().norm() > tol * std::max(1.0, frob(p.S0))) out.emplace_back("S0 not real");
  return out;
}

/// phi_real_k = -i phi_k on the frame's grid.
inline std::array<Grid<double>, 3> real_fields(const ThreeWaveFrame& f, double tol = 1e-10) {
  std::array<Grid<double>, 3> out;
  for (int k = 0; k < 3; ++k) {
    const auto& g = f.phi[k];
    out[k] = Grid<double>{g.x0, g.t0, g.hx, g.ht, g.nx, g.nt, {}};
    out[k].values.reserve(g.values.size());
    for (Complex v : g.values) {
      const Complex r = -kI * v;
      if (std::abs(r.imag()) > tol * std::max(1.0, std::abs(r)))
        fail(ErrorKind::NotRealReducible, "field " + std::to_string(k + 1) + " is not real");
      out[k].values.push_back(r.real());
    }
  }
  return out;
}

/// Per-equation max-norm residuals on the frame's grid.
inline std::array<double, 3> three_wave_residual(const ThreeWaveFrame& f) {
  for (const auto& g : f.phi) g.require_min_size();
  const auto& g1 = f.phi[0];
  std::array<double, 3> worst{0.0, 0.0, 0.0};
  for (int j = 0; j < g1.nt; ++j) {
    for (int i = 0; i < g1.nx; ++i) {
      std::array<Complex, 3> lhs, v;
      for (int k = 0; k < 3; ++k) {
        // the real system is written for -i phi; linear terms scale alike
        const Complex scale = f.real_mode ? -kI : Complex{1.0, 0.0};
        v[k] = scale * f.phi[k].at(i, j);
        lhs[k] = scale * (grid_dt(f.phi[k], i, j) + f.psi[k] * grid_dx(f.phi[k], i, j));
      }
      std::array<Complex, 3> rhs;
      if (f.real_mode) {
        rhs = {f.eps * v[1] * v[2], f.eps * v[0] * v[2], -f.eps * v[0] * v[1]};
      } else {
        rhs = {kI * f.eps * std::conj(v[1]) * v[2], kI * f.eps * std::conj(v[0]) * v[2],
               kI * f.eps * v[0] * v[1]};
      }
      for (int k = 0; k < 3; ++k) worst[k] = std::max(worst[k], std::abs(lhs[k] - rhs[k]));
    }
  }
  return worst;
}

/// Residuals on small 5 x 5 patches of spacing h anchored at each sample,
/// shifted forward where the patch would leave the domain.
template <class RhoFn>
std::array<double, 3> three_wave_patch_residual(const RhoFn& rho, const SeedSpec& spec,
                                                const std::vector<SamplePoint>& samples, double h,
                                                const StencilDomain& dom, bool real_mode) {
  std::array<double, 3> worst{0.0, 0.0, 0.0};
  for (const auto& s : samples) {
    const double x0 = std::max(dom.x_min, s.x - 2.0 * h);
    const double t0 = std::max(dom.t_min, s.t - 2.0 * h);
    const auto grid = sample_grid<CMatrix>(rho, x0, t0, h, h, kMinGridPoints, kMinGridPoints);
    const auto r = three_wave_residual(three_wave_map(spec, grid, real_mode));
    for (int k = 0; k < 3; ++k) worst[k] = std::max(worst[k], r[k]);
  }
  return worst;
}

}  // namespace gbdt
