#pragma once

// Uniform (x, t) lattices and second-order finite differences, on sampled
// grids and on callables.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "gbdt/error.hpp"

namespace gbdt {

inline constexpr int kMinGridPoints = 5;

template <class T>
struct Grid {
  double x0 = 0.0;
  double t0 = 0.0;
  double hx = 1.0;
  double ht = 1.0;
  int nx = 0;
  int nt = 0;
  std::vector<T> values;  // t-major: index j * nx + i

  double x(int i) const { return x0 + i * hx; }
  double t(int j) const { return t0 + j * ht; }
  T& at(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }
  const T& at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }

  void require_min_size() const {
    if (nx < kMinGridPoints || nt < kMinGridPoints)
      fail(ErrorKind::GridTooSmall, "residual grids need at least " +
                                        std::to_string(kMinGridPoints) + " points per axis");
  }
};

template <class T, class Fn>
Grid<T> sample_grid(const Fn& f, double x0, double t0, double hx, double ht, int nx, int nt) {
  Grid<T> g{x0, t0, hx, ht, nx, nt, {}};
  g.values.reserve(static_cast<std::size_t>(nx) * nt);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) g.values.push_back(f(g.x(i), g.t(j)));
  return g;
}

/// d/dx at node (i, j): central in the interior, one-sided second order at
/// the edges.
template <class T>
T grid_dx(const Grid<T>& g, int i, int j) {
  if (i == 0) return (-3.0 * g.at(0, j) + 4.0 * g.at(1, j) - g.at(2, j)) / (2.0 * g.hx);
  if (i == g.nx - 1)
    return (3.0 * g.at(i, j) - 4.0 * g.at(i - 1, j) + g.at(i - 2, j)) / (2.0 * g.hx);
  return (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * g.hx);
}

template <class T>
T grid_dt(const Grid<T>& g, int i, int j) {
  if (j == 0) return (-3.0 * g.at(i, 0) + 4.0 * g.at(i, 1) - g.at(i, 2)) / (2.0 * g.ht);
  if (j == g.nt - 1)
    return (3.0 * g.at(i, j) - 4.0 * g.at(i, j - 1) + g.at(i, j - 2)) / (2.0 * g.ht);
  return (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * g.ht);
}

/// Lower bounds of the admissible evaluation domain; stencils that would step
/// below a bound switch to a forward one-sided formula.
struct StencilDomain {
  double x_min = -std::numeric_limits<double>::infinity();
  double t_min = -std::numeric_limits<double>::infinity();
};

/// Second-order derivative of `f` along one variable at `s`.
template <class Fn>
auto stencil_derivative(const Fn& f, double s, double h, double lower) {
  using R = std::decay_t<decltype(f(s))>;
  if (s - h < lower) return R((-3.0 * f(s) + 4.0 * f(s + h) - f(s + 2.0 * h)) / (2.0 * h));
  return R((f(s + h) - f(s - h)) / (2.0 * h));
}

/// ln(r_h / r_{h/2}) / ln 2, or NaN when the coarse residual is at round-off
/// level and no order can be read off.
inline double convergence_order(double coarse, double fine, double floor = 1e-10) {
  if (!(coarse > floor) || !(fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

}  // namespace gbdt
