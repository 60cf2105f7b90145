#pragma once

#include <complex>
#include <vector>

#include "congflow/geometry.hpp"

namespace congflow {

// Polynomial in xi and its conjugate with complex coefficients,
// sum of c * xi^i * conj(xi)^j.  Terms are kept sorted by (i,j) with no
// duplicates and no zero coefficients.
class BiPoly {
 public:
  struct Term {
    int i = 0;
    int j = 0;
    Complex c;
  };

  BiPoly() = default;
  explicit BiPoly(std::vector<Term> terms);

  static BiPoly constant(Complex c);
  static BiPoly monomial(int i, int j, Complex c);
  // 1 + xi*conj(xi), the conformal factor of the chart.
  static BiPoly one_plus_xixibar();

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;
  double max_coeff_norm() const;

  BiPoly operator+(const BiPoly& o) const;
  BiPoly operator-(const BiPoly& o) const;
  BiPoly operator*(const BiPoly& o) const;
  BiPoly scaled(Complex s) const;

  // Complex conjugate as a function of (xi, conj xi): (i,j,c) -> (j,i,conj c).
  BiPoly conj_poly() const;

  // Wirtinger derivatives.
  BiPoly d_xi() const;
  BiPoly d_xibar() const;

  Complex eval(Complex xi) const;

 private:
  std::vector<Term> terms_;
};

// Exact Wirtinger differentiation entry points.
BiPoly wirtinger_d(const BiPoly& f);
BiPoly wirtinger_dbar(const BiPoly& f);

// Rational function of the form P(xi, conj xi) / (1+xi conj(xi))^k.  The
// denominator is tracked as a power and only ever applied pointwise; the
// class is closed under the Wirtinger derivatives via the quotient rule.
class ChartRational {
 public:
  ChartRational() = default;
  ChartRational(BiPoly num, int denom_pow);
  static ChartRational poly(BiPoly p) { return ChartRational(std::move(p), 0); }

  const BiPoly& num() const { return num_; }
  int denom_pow() const { return denom_pow_; }

  ChartRational operator+(const ChartRational& o) const;
  ChartRational operator-(const ChartRational& o) const;
  ChartRational operator*(const ChartRational& o) const;
  ChartRational scaled(Complex s) const;
  ChartRational conj() const;

  ChartRational d_xi() const;
  ChartRational d_xibar() const;

  Complex eval(Complex xi) const;

 private:
  BiPoly num_;
  int denom_pow_ = 0;
};

// Univariate polynomial in a real parameter u with complex coefficients.
class CurvePoly {
 public:
  struct Term {
    int k = 0;
    Complex c;
  };

  CurvePoly() = default;
  explicit CurvePoly(std::vector<Term> terms);
  static CurvePoly monomial(int k, Complex c);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  double max_coeff_norm() const;

  CurvePoly operator+(const CurvePoly& o) const;
  CurvePoly operator-(const CurvePoly& o) const;
  CurvePoly operator*(const CurvePoly& o) const;
  CurvePoly scaled(Complex s) const;
  CurvePoly conj_poly() const;  // coefficients conjugated (u is real)
  CurvePoly derivative() const;

  Complex eval(double u) const;

 private:
  std::vector<Term> terms_;
};

// Polynomial in two real parameters (u, v) with complex coefficients.
class SheetPoly {
 public:
  struct Term {
    int k = 0;
    int l = 0;
    Complex c;
  };

  SheetPoly() = default;
  explicit SheetPoly(std::vector<Term> terms);
  static SheetPoly constant(Complex c);
  static SheetPoly monomial(int k, int l, Complex c);
  static SheetPoly from_curve(const CurvePoly& p);  // v-independent promotion

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;
  double max_coeff_norm() const;
  bool is_real_valued() const;  // all coefficients real

  SheetPoly operator+(const SheetPoly& o) const;
  SheetPoly operator-(const SheetPoly& o) const;
  SheetPoly operator*(const SheetPoly& o) const;
  SheetPoly scaled(Complex s) const;
  SheetPoly conj_poly() const;  // coefficients conjugated (u, v real)

  SheetPoly d_u() const;
  SheetPoly d_v() const;

  Complex eval(double u, double v) const;

 private:
  std::vector<Term> terms_;
};

// Ratio of two SheetPolys, closed under d/du and d/dv by the quotient rule.
class RationalUV {
 public:
  RationalUV() = default;
  RationalUV(SheetPoly num, SheetPoly den);

  const SheetPoly& num() const { return num_; }
  const SheetPoly& den() const { return den_; }

  RationalUV d_u() const;
  RationalUV d_v() const;

  // Throws DegenerateParameterization when the denominator vanishes.
  Complex eval(double u, double v) const;
  Complex den_value(double u, double v) const { return den_.eval(u, v); }

 private:
  SheetPoly num_;
  SheetPoly den_{SheetPoly::constant(1.0)};
};

}  // namespace congflow
