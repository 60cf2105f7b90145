#pragma once

#include <optional>
#include <vector>

#include "congflow/geometry.hpp"
#include "congflow/polynomial.hpp"

namespace congflow {

// First-order invariants of a rank-2 congruence at a point: shear sigma,
// divergence theta and twist lambda, with rho = theta + i lambda.
struct SpinData {
  Complex sigma;
  double theta = 0.0;
  double lambda = 0.0;

  Complex rho() const { return {theta, lambda}; }
};

// Precomputed rational data for a rank-2 congruence eta = F(xi, conj xi):
//   sigma = -d(conj F)/dxi
//   rho   = (1+xi conj xi)^2 d/dxi [ F / (1+xi conj xi)^2 ]
class SpinField {
 public:
  explicit SpinField(const BiPoly& F);

  SpinData at(Complex xi) const;

  const BiPoly& F() const { return F_; }
  const BiPoly& F_xi() const { return F_xi_; }
  const BiPoly& F_xibar() const { return F_xibar_; }
  const BiPoly& sigma_poly() const { return sigma_; }
  const ChartRational& rho() const { return rho_; }
  // Real part of rho as a chart-rational function (used by the steady-flow
  // obstruction ladder).
  const ChartRational& theta_fn() const { return theta_; }
  const ChartRational& lambda_fn() const { return lambda_; }

 private:
  BiPoly F_;
  BiPoly F_xi_;
  BiPoly F_xibar_;
  BiPoly sigma_;
  ChartRational rho_;
  ChartRational theta_;
  ChartRational lambda_;
};

SpinData spin_coefficients(const BiPoly& F, Complex xi);

// Real roots r of (r+theta)^2 + lambda^2 - |sigma|^2 = 0, ascending; a double
// root appears twice; empty when |sigma|^2 < lambda^2.
std::vector<double> focal_points(const SpinData& s);

// Tagged polynomial congruence description.
class CongruenceSpec {
 public:
  static constexpr int kMaxDegree = 8;

  static CongruenceSpec rank2(BiPoly F);
  static CongruenceSpec rank1(CurvePoly xi, SheetPoly eta);
  static CongruenceSpec rank0(Complex xi0);

  int rank() const { return rank_; }
  const BiPoly& F() const;
  const CurvePoly& xi_curve() const;
  const SheetPoly& eta_sheet() const;
  Complex xi0() const;

  // Largest coefficient magnitude across the defining polynomials.
  double coefficient_scale() const;

  OrientedLine line_at(Complex xi) const;          // rank 2
  OrientedLine line_at(double u, double v) const;  // rank 1 and rank 0

 private:
  CongruenceSpec() = default;
  int rank_ = 2;
  BiPoly F_;
  CurvePoly xi_curve_;
  SheetPoly eta_sheet_;
  Complex xi0_;
};

// Numeric rank of the 2x2 real Jacobian of the direction map at the given
// chart parameters, with singular values thresholded at 1e-8 relative.
int rank_at(const CongruenceSpec& spec, double p1, double p2);

// Exact rational form of the rank-1 invariant beta over the (u,v) chart.
class BetaField {
 public:
  BetaField(const CurvePoly& xi, const SheetPoly& eta);

  // Throws DegenerateParameterization when the denominator vanishes; the
  // value is real by construction, the imaginary residue is checked.
  double at(double u, double v) const;

  const RationalUV& rational() const { return beta_; }

 private:
  RationalUV beta_;
};

double beta(const CongruenceSpec& spec, double u, double v);

// Image of the congruence under the rotation about the x3-axis by alpha.
CongruenceSpec rotated_about_x3(const CongruenceSpec& spec, double alpha);

// Image of the congruence under translation by w: each line keeps its
// direction, eta gains the pencil offset of w.
CongruenceSpec translated(const CongruenceSpec& spec, const Vec3& w);

}  // namespace congflow
