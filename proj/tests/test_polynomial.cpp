#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "congflow/polynomial.hpp"
#include "test_support.hpp"

using namespace congflow;
using test_support::fd_wirtinger_d;
using test_support::fd_wirtinger_dbar;
using test_support::random_bipoly;

TEST_CASE("wirtinger derivatives on monomials") {
  // d/dxi of xi^2 xibar = 2 xi xibar
  const BiPoly f = BiPoly::monomial(2, 1, 1.0);
  const BiPoly d = wirtinger_d(f);
  REQUIRE(d.terms().size() == 1);
  CHECK(d.terms()[0].i == 1);
  CHECK(d.terms()[0].j == 1);
  CHECK(d.terms()[0].c == Complex{2.0, 0.0});

  CHECK(wirtinger_dbar(BiPoly::monomial(2, 0, 1.0)).is_zero());
  CHECK(wirtinger_d(BiPoly::constant({3.0, -1.0})).is_zero());
}

TEST_CASE("duplicate terms merge and zero coefficients drop") {
  const BiPoly f({{1, 1, 1.0}, {1, 1, -1.0}, {0, 0, 2.0}});
  CHECK(f.terms().size() == 1);
  CHECK(f.total_degree() == 0);
}

TEST_CASE("wirtinger engine against central finite differences") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    const BiPoly f = random_bipoly(rng, 5);
    if (f.is_zero()) continue;
    auto eval = [&](Complex z) { return f.eval(z); };
    for (int pt = 0; pt < 5; ++pt) {
      const Complex xi{U(rng), U(rng)};
      const Complex exact_d = f.d_xi().eval(xi);
      const Complex exact_db = f.d_xibar().eval(xi);
      const Complex approx_d = fd_wirtinger_d(eval, xi);
      const Complex approx_db = fd_wirtinger_dbar(eval, xi);
      const double scale = 1.0 + std::abs(exact_d) + std::abs(exact_db);
      CHECK(std::abs(exact_d - approx_d) / scale < 1e-7);
      CHECK(std::abs(exact_db - approx_db) / scale < 1e-7);
    }
  }
}

TEST_CASE("conj_poly evaluates to the conjugate") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int trial = 0; trial < 40; ++trial) {
    const BiPoly f = random_bipoly(rng, 4);
    const Complex xi{U(rng), U(rng)};
    CHECK(std::abs(f.conj_poly().eval(xi) - std::conj(f.eval(xi))) < 1e-12);
  }
}

TEST_CASE("ChartRational derivative matches finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    const ChartRational f(random_bipoly(rng, 4), 2);
    auto eval = [&](Complex z) { return f.eval(z); };
    const Complex xi{U(rng), U(rng)};
    CHECK(std::abs(f.d_xi().eval(xi) - fd_wirtinger_d(eval, xi)) < 1e-6);
    CHECK(std::abs(f.d_xibar().eval(xi) - fd_wirtinger_dbar(eval, xi)) < 1e-6);
  }
}

TEST_CASE("ChartRational addition aligns denominator powers") {
  const ChartRational a(BiPoly::constant(1.0), 1);
  const ChartRational b(BiPoly::monomial(1, 1, 1.0), 2);
  const Complex xi{0.3, -0.4};
  const double d = 1.0 + std::norm(xi);
  const Complex expect = 1.0 / d + std::norm(xi) / (d * d);
  CHECK(std::abs((a + b).eval(xi) - expect) < 1e-14);
}

TEST_CASE("CurvePoly and SheetPoly derivatives") {
  // xi(u) = (1+2i) u^3 - u
  const CurvePoly c({{3, {1.0, 2.0}}, {1, {-1.0, 0.0}}});
  const Complex d = c.derivative().eval(0.5);
  CHECK(std::abs(d - (Complex{3.0, 6.0} * 0.25 - 1.0)) < 1e-14);

  const SheetPoly s({{2, 1, {1.0, 0.0}}, {0, 1, {0.0, 1.0}}});  // u^2 v + i v
  CHECK(std::abs(s.d_u().eval(1.5, 2.0) - Complex{6.0, 0.0}) < 1e-14);
  CHECK(std::abs(s.d_v().eval(1.5, 2.0) - Complex{2.25, 1.0}) < 1e-14);
  CHECK(!s.is_real_valued());
  CHECK(SheetPoly({{1, 0, {2.0, 0.0}}}).is_real_valued());
}

TEST_CASE("RationalUV quotient rule") {
  // f = (u^2 + i v) / (1 + u v)
  const RationalUV f(SheetPoly({{2, 0, {1, 0}}, {0, 1, {0, 1}}}),
                     SheetPoly({{0, 0, {1, 0}}, {1, 1, {1, 0}}}));
  auto num = [&](double u, double v) { return (u * u + Complex{0, 1} * v) / (1.0 + u * v); };
  const double u = 0.7, v = -0.3, h = 1e-6;
  const Complex fd_u = (num(u + h, v) - num(u - h, v)) / (2 * h);
  const Complex fd_v = (num(u, v + h) - num(u, v - h)) / (2 * h);
  CHECK(std::abs(f.d_u().eval(u, v) - fd_u) < 1e-8);
  CHECK(std::abs(f.d_v().eval(u, v) - fd_v) < 1e-8);
}

TEST_CASE("degree caps and invalid terms rejected") {
  CHECK_THROWS_AS(BiPoly({{-1, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(BiPoly({{0, 0, Complex{std::nan(""), 0}}}), std::invalid_argument);
  CHECK_THROWS_AS(CurvePoly({{-2, 1.0}}), std::invalid_argument);
}
