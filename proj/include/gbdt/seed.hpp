#pragma once

// Seed system: the diagonal data D, D^, B and the seed potential rho(x,t) of
//   u_x = (i z D - [D, rho]) u,   u_t = (i z D^ - [D^, rho]) u.

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gbdt/matrix_core.hpp"

namespace gbdt {

using FieldFn = std::function<CMatrix(double x, double t)>;
using WaveFn = std::function<CMatrix(double x, double t, Complex z)>;

struct ZeroSeed {};

/// Externally supplied seed potential. The derivative callbacks and the seed
/// wave function are optional; missing derivatives fall back to central
/// differences and a missing wave function is integrated numerically.
struct CallableSeed {
  FieldFn rho;
  FieldFn rho_x;
  FieldFn rho_t;
  WaveFn wave;
  double derivative_step = 1e-5;
};

class SeedSpec {
 public:
  using Seed = std::variant<ZeroSeed, CallableSeed>;

  SeedSpec() = default;
  SeedSpec(RVector d, RVector dhat, RVector b, Seed seed = ZeroSeed{})
      : d_(std::move(d)), dhat_(std::move(dhat)), b_(std::move(b)), seed_(std::move(seed)) {}

  Eigen::Index m() const { return d_.size(); }
  const RVector& d() const { return d_; }
  const RVector& dhat() const { return dhat_; }
  const RVector& b() const { return b_; }
  const Seed& seed() const { return seed_; }
  bool is_zero_seed() const { return std::holds_alternative<ZeroSeed>(seed_); }

  CMatrix D() const { return diag_matrix(d_); }
  CMatrix Dhat() const { return diag_matrix(dhat_); }
  CMatrix B() const { return diag_matrix(b_); }

  CMatrix rho(double x, double t) const {
    if (const auto* c = std::get_if<CallableSeed>(&seed_)) return c->rho(x, t);
    return CMatrix::Zero(m(), m());
  }

  CMatrix rho_x(double x, double t) const {
    const auto* c = std::get_if<CallableSeed>(&seed_);
    if (!c) return CMatrix::Zero(m(), m());
    if (c->rho_x) return c->rho_x(x, t);
    const double h = c->derivative_step;
    return (c->rho(x + h, t) - c->rho(x - h, t)) / (2.0 * h);
  }

  CMatrix rho_t(double x, double t) const {
    const auto* c = std::get_if<CallableSeed>(&seed_);
    if (!c) return CMatrix::Zero(m(), m());
    if (c->rho_t) return c->rho_t(x, t);
    const double h = c->derivative_step;
    return (c->rho(x, t + h) - c->rho(x, t - h)) / (2.0 * h);
  }

  /// G = i z D - [D, rho]
  CMatrix G(double x, double t, Complex z) const {
    const CMatrix dm = D();
    return kI * z * dm - commutator(dm, rho(x, t));
  }

  /// F = i z D^ - [D^, rho]
  CMatrix F(double x, double t, Complex z) const {
    const CMatrix dh = Dhat();
    return kI * z * dh - commutator(dh, rho(x, t));
  }

 private:
  RVector d_;
  RVector dhat_;
  RVector b_;
  Seed seed_ = ZeroSeed{};
};

struct SamplePoint {
  double x = 0.0;
  double t = 0.0;
};

inline std::vector<SamplePoint> default_seed_samples() {
  std::vector<SamplePoint> pts;
  for (double x : {0.0, 0.5, 1.0})
    for (double t : {0.0, 0.5, 1.0}) pts.push_back({x, t});
  return pts;
}

/// Returns the violated seed constraints; empty on success.
inline std::vector<std::string> validate_seed(const SeedSpec& spec,
                                              const std::vector<SamplePoint>& samples =
                                                  default_seed_samples(),
                                              double symmetry_tol = 1e-12) {
  std::vector<std::string> violations;
  const auto m = spec.m();
  if (m == 0) violations.emplace_back("system size m must be positive");
  if (spec.dhat().size() != m || spec.b().size() != m) {
    violations.emplace_back("d, dhat and b must all have length m");
    return violations;
  }
  if (!spec.d().allFinite() || !spec.dhat().allFinite())
    violations.emplace_back("D and D^ must have finite real diagonals");
  for (Eigen::Index k = 0; k < m; ++k)
    if (spec.b()(k) != 1.0 && spec.b()(k) != -1.0) {
      violations.emplace_back("B not a signature matrix");
      break;
    }
  if (!violations.empty() || spec.is_zero_seed()) return violations;

  const CMatrix b = spec.B();
  for (const auto& p : samples) {
    const CMatrix r = spec.rho(p.x, p.t);
    if (r.rows() != m || r.cols() != m) {
      violations.emplace_back("seed potential has wrong shape");
      break;
    }
    if (!r.allFinite()) {
      violations.emplace_back("seed potential not finite at (" + std::to_string(p.x) + ", " +
                              std::to_string(p.t) + ")");
      continue;
    }
    const double defect = frob(r.adjoint() - b * r * b) / std::max(1.0, frob(r));
    if (defect > symmetry_tol)
      violations.emplace_back("rho* != B rho B at (" + std::to_string(p.x) + ", " +
                              std::to_string(p.t) + ")");
  }
  return violations;
}

}  // namespace gbdt
