#pragma once

// Built-in configurations. The JSON files under demos/ are these same
// configurations serialized.

#include <cmath>
#include <string>
#include <vector>

#include "gbdt/cli/config.hpp"

namespace gbdt::cli {

inline const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names{"rational2x2", "sech_soliton", "threewave_real",
                                              "bispectral_n2"};
  return names;
}

namespace detail {

inline CMatrix mat(Eigen::Index r, Eigen::Index c, std::initializer_list<Complex> values) {
  CMatrix m(r, c);
  auto it = values.begin();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = *it++;
  return m;
}

}  // namespace detail

/// A = 0, n = 1, B = diag(1, -1): S = 2 + 2x + t and
/// rho~ = -[[1, 1], [-1, -1]] / S.
inline RunConfig demo_rational2x2() {
  RunConfig c;
  c.name = "rational2x2";
  c.seed = {{1.0, -1.0}, {0.5, -0.5}, {1.0, -1.0}, "zero"};
  c.gbdt = {detail::mat(1, 1, {0.0}), detail::mat(1, 2, {1.0, 1.0}), detail::mat(1, 1, {2.0})};
  c.grid = {0.0, 1.0, 11, 0.0, 1.0, 11};
  c.z_samples = {{0.37, 0.0}, {0.4, 0.1}, {1.0, 0.0}, {2.0, -3.0}, {-0.5, 0.3}};
  c.output.directory = "out/rational2x2";
  c.lambda = 0.0;
  return c;
}

/// A = i, B = I: the skew-self-adjoint Dirac potential v = 2 sech(2(x + t/2)).
inline RunConfig demo_sech_soliton() {
  RunConfig c;
  c.name = "sech_soliton";
  c.seed = {{1.0, -1.0}, {0.5, -0.5}, {1.0, 1.0}, "zero"};
  c.gbdt = {detail::mat(1, 1, {Complex{0.0, 1.0}}), detail::mat(1, 2, {1.0, 1.0}),
            detail::mat(1, 1, {1.0})};
  c.grid = {-2.0, 2.0, 41, 0.0, 0.5, 3};
  c.z_samples = {{0.37, 0.0}, {0.4, 0.1}, {1.0, 0.0}, {2.0, -3.0}, {-0.5, 0.3}};
  c.output.directory = "out/sech_soliton";
  c.allow_negative_domain = true;
  c.dirac = DiracBlock{1, 1, "skewselfadjoint"};
  return c;
}

/// m = 3 real data (A = i/2, real Pi0, S0) with D = diag(3,2,1),
/// D^ = diag(2,0,1): the real resonance reduction.
inline RunConfig demo_threewave_real() {
  RunConfig c;
  c.name = "threewave_real";
  c.seed = {{3.0, 2.0, 1.0}, {2.0, 0.0, 1.0}, {1.0, 1.0, 1.0}, "zero"};
  c.gbdt = {detail::mat(1, 1, {Complex{0.0, 0.5}}),
            detail::mat(1, 3, {2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0}), detail::mat(1, 1, {1.0})};
  c.grid = {0.0, 1.0, 11, 0.0, 1.0, 11};
  c.z_samples = {{0.37, 0.0}, {0.4, 0.1}, {1.0, 0.0}, {2.0, -3.0}, {-0.5, 0.3}};
  c.output.directory = "out/threewave_real";
  return c;
}

/// n = 2 Jordan block at lambda = 0, B = diag(1, -1); bispectral operator
/// coefficients (6, 6, 1).
inline RunConfig demo_bispectral_n2() {
  RunConfig c;
  c.name = "bispectral_n2";
  const double r = 1.0 / std::sqrt(2.0);
  c.seed = {{1.0, -1.0}, {0.5, -0.5}, {1.0, -1.0}, "zero"};
  c.gbdt = {detail::mat(2, 2, {0.0, 1.0, 0.0, 0.0}),
            detail::mat(2, 2, {r, r, Complex{0.0, r}, Complex{0.0, -r}}),
            detail::mat(2, 2, {2.0, 0.0, 0.0, 1.0})};
  c.grid = {0.0, 1.0, 11, 0.0, 1.0, 11};
  c.z_samples = {{0.37, 0.0}, {0.4, 0.1}, {1.0, 0.0}, {2.0, -3.0}, {-0.5, 0.3}};
  c.output.directory = "out/bispectral_n2";
  c.lambda = 0.0;
  return c;
}

inline RunConfig demo_config(const std::string& name) {
  if (name == "rational2x2") return demo_rational2x2();
  if (name == "sech_soliton") return demo_sech_soliton();
  if (name == "threewave_real") return demo_threewave_real();
  if (name == "bispectral_n2") return demo_bispectral_n2();
  fail(ErrorKind::UnknownDemo, "unknown demo '" + name + "'");
}

}  // namespace gbdt::cli
