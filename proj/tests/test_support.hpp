#pragma once

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "congflow/geometry.hpp"
#include "congflow/polynomial.hpp"

namespace test_support {

using congflow::BiPoly;
using congflow::Complex;

// Central-difference Wirtinger derivatives, independent of the exact engine:
// d/dxi = (d/da - i d/db)/2, d/dxibar = (d/da + i d/db)/2 on xi = a + i b.
inline Complex fd_wirtinger_d(const std::function<Complex(Complex)>& f, Complex xi,
                              double h = 1e-5) {
  const Complex fa = (f(xi + h) - f(xi - h)) / (2.0 * h);
  const Complex fb = (f(xi + Complex{0, h}) - f(xi - Complex{0, h})) / (2.0 * h);
  return 0.5 * (fa - Complex{0, 1} * fb);
}

inline Complex fd_wirtinger_dbar(const std::function<Complex(Complex)>& f, Complex xi,
                                 double h = 1e-5) {
  const Complex fa = (f(xi + h) - f(xi - h)) / (2.0 * h);
  const Complex fb = (f(xi + Complex{0, h}) - f(xi - Complex{0, h})) / (2.0 * h);
  return 0.5 * (fa + Complex{0, 1} * fb);
}

inline BiPoly random_bipoly(std::mt19937_64& rng, int max_degree, double coeff_bound = 1.0,
                            double density = 0.7) {
  std::uniform_real_distribution<double> U(-coeff_bound, coeff_bound);
  std::uniform_real_distribution<double> P(0.0, 1.0);
  std::vector<BiPoly::Term> terms;
  for (int i = 0; i <= max_degree; ++i) {
    for (int j = 0; i + j <= max_degree; ++j) {
      if (P(rng) > density) continue;
      terms.push_back({i, j, Complex{U(rng), U(rng)}});
    }
  }
  return BiPoly(terms);
}

// Pencil of lines through the point (z0, t0): the sphere congruence.
inline BiPoly sphere_congruence(Complex z0, double t0) {
  return BiPoly({{0, 0, 0.5 * z0}, {1, 0, Complex{-t0, 0.0}}, {2, 0, -0.5 * std::conj(z0)}});
}

}  // namespace test_support
