#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gbdt/engine.hpp"
#include "oracles.hpp"

using namespace gbdt;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

CMatrix row(std::initializer_list<Complex> v) {
  CMatrix r(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (Complex x : v) r(0, i++) = x;
  return r;
}

CMatrix scalar(Complex c) { return CMatrix::Constant(1, 1, c); }

// D = B = diag(1,-1), A = 0: S = s0 + 2x + (dh1 - dh2) t.
struct RationalCase {
  double s0 = 2.0;
  SeedSpec spec{vec({1, -1}), vec({0.5, -0.5}), vec({1, -1})};
  GBDTParams params{scalar(0.0), row({1.0, 1.0}), scalar(2.0)};
  double S(double x, double t) const { return s0 + 2 * x + t; }
  CMatrix rho(double x, double t) const {
    CMatrix r(2, 2);
    r << 1, 1, -1, -1;
    return -r / S(x, t);
  }
};

// D = diag(1,-1), B = I, D^ = 0, A = i beta.
struct SechCase {
  double beta = 1.0;
  SeedSpec spec{vec({1, -1}), vec({0, 0}), vec({1, 1})};
  GBDTParams params;
  explicit SechCase(double b = 1.0) : beta(b), params{scalar(kI * b), row({1.0, 1.0}), scalar(1.0 / b)} {}
  CMatrix rho(double x) const {
    CMatrix r(2, 2);
    r << std::exp(2 * beta * x), 1.0, 1.0, std::exp(-2 * beta * x);
    return -beta / std::cosh(2 * beta * x) * r;
  }
};

PropagateOptions negative_ok() {
  PropagateOptions o;
  o.allow_negative = true;
  return o;
}

PropagateOptions rk4_opts(double h = 1e-3) {
  PropagateOptions o;
  o.method = Method::rk4;
  o.h = h;
  return o;
}

CMatrix seed_generator(const CMatrix& rho, const RVector& c, Complex z) {
  const CMatrix cm = diag_matrix(c);
  return kI * z * cm - commutator(cm, rho);
}

}  // namespace

TEST(ValidateSeed, ZeroSeedIsClean) {
  EXPECT_TRUE(validate_seed(SeedSpec(vec({2, 1}), vec({0, 3}), vec({1, -1}))).empty());
}

TEST(ValidateSeed, NonSignatureB) {
  const auto v = validate_seed(SeedSpec(vec({2, 1}), vec({0, 3}), vec({1, 2})));
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front(), "B not a signature matrix");
}

TEST(ValidateSeed, AsymmetricCallableSeedFailsAtEverySample) {
  CallableSeed cs;
  cs.rho = [](double, double) {
    CMatrix r = CMatrix::Zero(2, 2);
    r(0, 1) = 1.0;
    return r;
  };
  const auto v = validate_seed(SeedSpec(vec({1, -1}), vec({0, 0}), vec({1, 1}), cs));
  EXPECT_EQ(v.size(), default_seed_samples().size());
}

TEST(ValidateGbdtParams, SignatureCancellation) {
  const RationalCase rc;
  EXPECT_NEAR(validate_gbdt_params(rc.params, rc.spec).identity_residual, 0.0, 1e-15);
}

TEST(ValidateGbdtParams, SechData) {
  for (double beta : {0.5, 1.0, 3.0}) {
    const SechCase sc(beta);
    EXPECT_NEAR(validate_gbdt_params(sc.params, sc.spec).identity_residual, 0.0, 1e-14);
  }
}

TEST(ValidateGbdtParams, ResidualEight) {
  SechCase sc;
  sc.params.S0 = scalar(5.0);
  const auto d = validate_gbdt_params(sc.params, sc.spec);
  EXPECT_NEAR(d.identity_residual, 8.0, 1e-14);
  EXPECT_FALSE(d.ok(1e-10));
  try {
    require_admissible(sc.params, sc.spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IdentityViolated);
  }
}

TEST(ValidateGbdtParams, ShapeMismatch) {
  SechCase sc;
  sc.params.Pi0 = row({1.0, 1.0, 1.0});
  try {
    validate_gbdt_params(sc.params, sc.spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(Propagate, OriginReturnsInitialData) {
  std::mt19937_64 rng(11);
  const auto data = oracle::random_nilpotent_data(rng, 3, 3);
  for (auto opts : {PropagateOptions{}, rk4_opts()}) {
    const auto s = propagate(data.params, data.spec, 0.0, 0.0, opts);
    EXPECT_EQ(s.Pi, data.params.Pi0);
    EXPECT_EQ(s.S, data.params.S0);
  }
}

TEST(Propagate, RationalClosedForm) {
  const RationalCase rc;
  for (double x : {0.0, 0.3, 1.7})
    for (double t : {0.0, 0.4, 2.0}) {
      for (auto opts : {PropagateOptions{}, rk4_opts(1e-2)}) {
        const auto s = propagate(rc.params, rc.spec, x, t, opts);
        EXPECT_LE(frob(s.Pi - rc.params.Pi0), 1e-13);
        EXPECT_NEAR(std::abs(s.S(0, 0) - rc.S(x, t)), 0.0, 1e-12);
      }
    }
}

TEST(Propagate, SechClosedFormAndRk4CrossCheck) {
  for (double beta : {0.5, 1.0}) {
    const SechCase sc(beta);
    for (double x : {0.0, 0.25, 1.0}) {
      const auto exact = propagate(sc.params, sc.spec, x, 0.0);
      EXPECT_LE(std::abs(exact.Pi(0, 0) - std::exp(beta * x)), 1e-13 * std::exp(beta * x));
      EXPECT_LE(std::abs(exact.Pi(0, 1) - std::exp(-beta * x)), 1e-13);
      const double s = std::cosh(2 * beta * x) / beta;
      EXPECT_LE(std::abs(exact.S(0, 0) - s), 1e-12 * s);
      const auto rk = propagate(sc.params, sc.spec, x, 0.0, rk4_opts());
      EXPECT_LE(frob(rk.Pi - exact.Pi), 1e-8);
      EXPECT_LE(frob(rk.S - exact.S), 1e-8);
    }
  }
}

TEST(Propagate, MatchesGenericIntegratorOnRandomData) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 4; ++trial) {
    const auto data = oracle::random_nilpotent_data(rng, 2 + trial % 2, 3);
    const auto& p = data.params;
    const double x = 0.9, t = 0.6;
    const auto [pi, s] = oracle::integrate_pi_s(p.A, p.Pi0, p.S0, data.spec.d(), data.spec.dhat(),
                                                data.spec.b(), x, t, 1e-3);
    for (auto opts : {PropagateOptions{}, rk4_opts()}) {
      const auto st = propagate(p, data.spec, x, t, opts);
      EXPECT_LE(frob(st.Pi - pi), 1e-8 * std::max(1.0, frob(pi)));
      EXPECT_LE(frob(st.S - s), 1e-8 * std::max(1.0, frob(s)));
    }
  }
}

TEST(Propagate, IdentityAndHermiticityAreCarried) {
  std::mt19937_64 rng(13);
  const auto data = oracle::random_nilpotent_data(rng, 3, 4);
  const CMatrix b = data.spec.B();
  const auto& p = data.params;
  for (double x : {0.5, 1.5})
    for (double t : {0.2, 1.0}) {
      const auto e = propagate(p, data.spec, x, t);
      const double scale = frob(p.A) * frob(e.S) + e.Pi.squaredNorm();
      EXPECT_LE(frob(p.A * e.S - e.S * p.A.adjoint() - kI * e.Pi * b * e.Pi.adjoint()), 1e-10 * scale);
      EXPECT_LE(hermiticity_defect(e.S), 1e-10 * scale);
      const auto r = propagate(p, data.spec, x, t, rk4_opts());
      EXPECT_LE(frob(p.A * r.S - r.S * p.A.adjoint() - kI * r.Pi * b * r.Pi.adjoint()), 1e-7);
    }
}

TEST(Propagate, PathIndependenceZeroSeed) {
  std::mt19937_64 rng(14);
  const auto data = oracle::random_nilpotent_data(rng, 2, 3);
  auto a = rk4_opts();
  auto b = rk4_opts();
  b.order = PathOrder::x_then_t;
  const auto s1 = propagate(data.params, data.spec, 1.1, 0.8, a);
  const auto s2 = propagate(data.params, data.spec, 1.1, 0.8, b);
  EXPECT_LE(frob(s1.Pi - s2.Pi), 1e-7);
  EXPECT_LE(frob(s1.S - s2.S), 1e-7);
}

TEST(Propagate, PathIndependenceOnTransformedSeed) {
  // A second transformation on top of the rational potential, which is itself
  // a solution and therefore a compatible seed.
  const RationalCase rc;
  CallableSeed cs;
  cs.rho = [rc](double x, double t) { return rc.rho(x, t); };
  const SeedSpec spec(rc.spec.d(), rc.spec.dhat(), rc.spec.b(), cs);
  const GBDTParams p{scalar(0.375 * kI), row({1.0, 0.5}), scalar(1.0)};
  ASSERT_TRUE(validate_seed(spec).empty());
  auto a = rk4_opts();
  auto b = rk4_opts();
  b.order = PathOrder::x_then_t;
  const auto s1 = propagate(p, spec, 0.9, 0.7, a);
  const auto s2 = propagate(p, spec, 0.9, 0.7, b);
  EXPECT_LE(frob(s1.Pi - s2.Pi), 1e-7);
  EXPECT_LE(frob(s1.S - s2.S), 1e-7);
  const CMatrix bm = spec.B();
  EXPECT_LE(frob(p.A * s1.S - s1.S * p.A.adjoint() - kI * s1.Pi * bm * s1.Pi.adjoint()), 1e-7);
}

TEST(Propagate, ExactMethodRejectsCallableSeed) {
  CallableSeed cs;
  cs.rho = [](double, double) { return CMatrix::Zero(2, 2).eval(); };
  const SeedSpec spec(vec({1, -1}), vec({0, 0}), vec({1, 1}), cs);
  const SechCase sc;
  EXPECT_THROW(propagate(sc.params, spec, 0.5, 0.0), Error);
  EXPECT_NO_THROW(propagate(sc.params, spec, 0.5, 0.0, rk4_opts()));
}

TEST(Propagate, NegativeDomainNeedsFlag) {
  const SechCase sc;
  try {
    propagate(sc.params, sc.spec, -0.5, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainViolation);
  }
  const auto s = propagate(sc.params, sc.spec, -0.5, 0.0, negative_ok());
  EXPECT_NEAR(std::abs(s.S(0, 0) - std::cosh(1.0)), 0.0, 1e-12);
}

TEST(Propagate, StepTooLarge) {
  const SechCase sc(4.0);
  auto opts = rk4_opts(0.5);
  opts.local_error_tol = 1e-12;
  try {
    propagate(sc.params, sc.spec, 2.0, 0.0, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StepTooLarge);
  }
}

TEST(Propagate, GridMatchesPointwise) {
  std::mt19937_64 rng(15);
  const auto data = oracle::random_nilpotent_data(rng, 2, 3);
  const std::vector<double> xs{0.0, 0.5, 1.0}, ts{0.0, 0.25};
  const auto grid = propagate_grid(data.params, data.spec, xs, ts);
  for (std::size_t j = 0; j < ts.size(); ++j)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto s = propagate(data.params, data.spec, xs[i], ts[j]);
      EXPECT_LE(frob(grid[j * xs.size() + i].S - s.S), 1e-10 * frob(s.S));
      EXPECT_EQ(grid[j * xs.size() + i].x, xs[i]);
    }
}

TEST(DarbouxMatrix, VanishingPiGivesIdentity) {
  const SeedSpec spec(vec({1, -1}), vec({0, 0}), vec({1, -1}));
  const GBDTParams p{scalar(0.0), row({0.0, 0.0}), scalar(1.0)};
  const auto st = initial_state(p);
  for (Complex z : {Complex(1.0), Complex(0.3, 2.0)})
    EXPECT_EQ(darboux_matrix(p, st, spec, z).value, identity(2));
}

TEST(DarbouxMatrix, LargeZDecay) {
  std::mt19937_64 rng(16);
  const auto data = oracle::random_nilpotent_data(rng, 3, 3);
  const auto st = propagate(data.params, data.spec, 0.7, 0.3);
  const CMatrix b = data.spec.B();
  const double scale = frob(b * st.Pi.adjoint() * cmat_solve(st.S, st.Pi).x);
  for (double arg : {0.1, 1.7, 4.0}) {
    const Complex z = std::polar(1e9, arg);
    EXPECT_LE(frob(darboux_matrix(data.params, st, data.spec, z).value - identity(3)), 1e-8 * scale);
  }
}

TEST(DarbouxMatrix, SechAtOrigin) {
  const SechCase sc;
  const auto st = initial_state(sc.params);
  const CMatrix b = sc.spec.B();
  for (Complex z : {Complex(0.37), Complex(2.0, -1.0), Complex(-0.4, 0.2)}) {
    const CMatrix w = darboux_matrix(sc.params, st, sc.spec, z).value;
    const CMatrix expected = identity(2) - kI / (kI - z) * CMatrix::Ones(2, 2);
    EXPECT_LE(frob(w - expected), 1e-14);
    const CMatrix wbar = darboux_matrix(sc.params, st, sc.spec, std::conj(z)).value;
    EXPECT_LE(frob(w * b * wbar.adjoint() - b), 1e-13);
  }
}

TEST(DarbouxMatrix, BUnitarityRandom) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  const auto data = oracle::random_nilpotent_data(rng, 3, 4);
  const CMatrix b = data.spec.B();
  const auto st = propagate(data.params, data.spec, 0.8, 0.4);
  for (int k = 0; k < 10; ++k) {
    const Complex z(g(rng), g(rng));
    const CMatrix w = darboux_matrix(data.params, st, data.spec, z).value;
    const CMatrix wbar = darboux_matrix(data.params, st, data.spec, std::conj(z)).value;
    EXPECT_LE(frob(w * b * wbar.adjoint() - b), 1e-10);
  }
}

TEST(DarbouxMatrix, SpectralCollisionAndPole) {
  const SechCase sc;
  try {
    darboux_matrix(sc.params, initial_state(sc.params), sc.spec, kI);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpectralCollision);
  }
  GBDTState st = initial_state(sc.params);
  st.S = scalar(0.0);
  try {
    darboux_matrix(sc.params, st, sc.spec, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

TEST(TransformedPotential, VanishingPiKeepsSeed) {
  const SeedSpec spec(vec({1, -1}), vec({0, 0}), vec({1, -1}));
  const GBDTParams p{scalar(0.0), row({0.0, 0.0}), scalar(1.0)};
  EXPECT_EQ(transformed_potential(propagate(p, spec, 0.4, 0.1), spec), CMatrix::Zero(2, 2));
}

TEST(TransformedPotential, RationalClosedForm) {
  const RationalCase rc;
  for (double x : {0.0, 0.5, 3.0}) {
    const CMatrix r = transformed_potential(propagate(rc.params, rc.spec, x, 0.0), rc.spec);
    EXPECT_LE(frob(r - rc.rho(x, 0.0)), 1e-14);
  }
}

TEST(TransformedPotential, SechClosedFormAndDiracView) {
  for (double beta : {0.5, 1.0, 2.0}) {
    const SechCase sc(beta);
    for (double x : {-1.0, 0.0, 0.6}) {
      const CMatrix r = transformed_potential(propagate(sc.params, sc.spec, x, 0.0, negative_ok()), sc.spec);
      EXPECT_LE(frob(r - sc.rho(x)), 1e-12);
      const CMatrix v = dirac_view(r, sc.spec, 1, 1, DiracKind::skewselfadjoint);
      EXPECT_NEAR(std::abs(v(0, 0) - 2 * beta / std::cosh(2 * beta * x)), 0.0, 1e-12);
    }
  }
}

TEST(TransformedPotential, SymmetryViolationDetected) {
  SechCase sc;
  GBDTState st = initial_state(sc.params);
  st.Pi = row({1.0, kI});
  st.S = scalar(Complex(1.0, 0.5));
  try {
    transformed_potential(st, sc.spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SymmetryViolated);
  }
}

TEST(TransformedFundamental, NormalizedAtOrigin) {
  std::mt19937_64 rng(18);
  const auto data = oracle::random_nilpotent_data(rng, 2, 3);
  EXPECT_EQ(transformed_fundamental(data.params, data.spec, 0.0, 0.7).value, identity(3));
  EXPECT_EQ(transformed_wave(data.params, data.spec, 0.0, 0.0, 0.7).value, identity(3));
}

TEST(TransformedFundamental, TrivialTransformation) {
  const SeedSpec spec(vec({2, -1}), vec({0, 0}), vec({1, -1}));
  const GBDTParams p{scalar(0.0), row({0.0, 0.0}), scalar(1.0)};
  const Complex z(0.4, 0.2);
  const CMatrix w = transformed_fundamental(p, spec, 0.8, z).value;
  CMatrix e = CMatrix::Zero(2, 2);
  e(0, 0) = std::exp(kI * z * 1.6);
  e(1, 1) = std::exp(-kI * z * 0.8);
  EXPECT_LE(frob(w - e), 1e-14);
}

TEST(TransformedFundamental, SechMatchesDirectIntegration) {
  const SechCase sc;
  const Complex z = 0.37;
  const CMatrix w = transformed_fundamental(sc.params, sc.spec, 1.0, z).value;
  const RVector d = sc.spec.d();
  const CMatrix direct = oracle::rk4(
      [&](double x, const CMatrix& u) { return CMatrix(seed_generator(sc.rho(x), d, z) * u); },
      identity(2), 0.0, 1.0, 1e-3);
  EXPECT_LE(frob(w - direct), 1e-6);
}

TEST(TransformedWave, SliceAtZeroTimeMatchesFundamental) {
  std::mt19937_64 rng(19);
  const auto data = oracle::random_nilpotent_data(rng, 2, 3);
  const Complex z(1.2, -0.3);
  EXPECT_LE(frob(transformed_wave(data.params, data.spec, 0.6, 0.0, z).value -
                 transformed_fundamental(data.params, data.spec, 0.6, z).value),
            1e-12);
}

TEST(TransformedWave, RationalTwoLegIntegration) {
  const RationalCase rc;
  const Complex z = 2.0;
  const double x = 0.5, t = 0.25;
  const CMatrix w = transformed_wave(rc.params, rc.spec, x, t, z).value;
  CMatrix u = oracle::rk4(
      [&](double s, const CMatrix& v) {
        return CMatrix(seed_generator(rc.rho(0.0, s), rc.spec.dhat(), z) * v);
      },
      identity(2), 0.0, t, 1e-3);
  u = oracle::rk4(
      [&](double s, const CMatrix& v) {
        return CMatrix(seed_generator(rc.rho(s, t), rc.spec.d(), z) * v);
      },
      u, 0.0, x, 1e-3);
  EXPECT_LE(frob(w - u), 1e-6);
}

TEST(TransformedWave, CallableSeedWithoutWaveIsIntegrated) {
  // Trivial GBDT over a nonzero seed reproduces the integrated seed wave.
  const RationalCase rc;
  CallableSeed cs;
  cs.rho = [rc](double x, double t) { return rc.rho(x, t); };
  const SeedSpec spec(rc.spec.d(), rc.spec.dhat(), rc.spec.b(), cs);
  const GBDTParams p{scalar(0.0), row({0.0, 0.0}), scalar(1.0)};
  auto opts = rk4_opts();
  const Complex z = 2.0;
  const CMatrix viaCallable = transformed_wave(p, spec, 0.5, 0.25, z, opts).value;
  const CMatrix viaZero = transformed_wave(rc.params, rc.spec, 0.5, 0.25, z).value;
  EXPECT_LE(frob(viaCallable - viaZero), 1e-6);
}

TEST(DiracView, Examples) {
  const SeedSpec selfadj(vec({1, -1}), vec({0, 0}), vec({1, -1}));
  const SeedSpec skew(vec({1, -1}), vec({0, 0}), vec({1, 1}));
  EXPECT_EQ(dirac_view(CMatrix::Zero(2, 2), skew, 1, 1, DiracKind::skewselfadjoint), CMatrix::Zero(1, 1));
  CMatrix r = CMatrix::Zero(2, 2);
  r(0, 1) = -kI / 2.0;
  EXPECT_LE(std::abs(dirac_view(r, selfadj, 1, 1, DiracKind::selfadjoint)(0, 0) - 1.0), 1e-15);
}

TEST(DiracView, ConventionMismatch) {
  const SeedSpec skew(vec({1, -1}), vec({0, 0}), vec({1, 1}));
  const SeedSpec wrong_d(vec({2, -1}), vec({0, 0}), vec({1, -1}));
  for (const auto& [spec, kind] : {std::pair{skew, DiracKind::selfadjoint},
                                   std::pair{wrong_d, DiracKind::selfadjoint}}) {
    try {
      dirac_view(CMatrix::Zero(2, 2), spec, 1, 1, kind);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConventionMismatch);
    }
  }
  EXPECT_THROW(dirac_view(CMatrix::Zero(2, 2), skew, 2, 1, DiracKind::skewselfadjoint), Error);
}
