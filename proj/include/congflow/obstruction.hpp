#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "congflow/congruence.hpp"
#include "congflow/euler_verify.hpp"

namespace congflow {

struct RPolyCoeffs {
  int degree = 0;
  std::vector<Complex> coeffs;  // ascending powers, degree+1 entries
  double conditioning = 0.0;    // Vandermonde condition estimate
  double fit_residual = 0.0;    // max-norm residual of the least-squares fit
};

// Least-squares polynomial coefficients of a complex-valued sampler over the
// given radii.  Throws IllConditioned when the Vandermonde condition estimate
// exceeds 1e10.
RPolyCoeffs r_poly_coeffs(const std::function<Complex(double)>& sampler, int degree,
                          std::span<const double> r_samples);

// d(theta)/dxi + 2 conj(F) / (1+xi conj xi)^2, exactly; the orthogonal
// surfaces have constant mean curvature where this vanishes.
Complex cmc_condition(const BiPoly& F, Complex xi);

// Sup norms of the twist and the shear over a sample set.
double twist_vanishing(const BiPoly& F, std::span<const Complex> samples);
double shear_vanishing(const BiPoly& F, std::span<const Complex> samples);

// Great-circle test for a direction curve:
// (1+xi conj xi)(conj(xi') xi'' - xi' conj(xi'')) - 2(conj(xi) xi' - xi conj(xi')) xi' conj(xi').
Complex geodesic_residual(const CurvePoly& xi, double u);

// Scalar profile with two derivatives, used by the beta ODE and the
// congruence recovery.
struct BetaProfile {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;

  // (b0 + 2 b1 u - b0 u^2) / (1+u^2), with analytic derivatives.
  static BetaProfile closed_form(double b0, double b1);
  // real polynomial sum c_k u^k, exact derivatives
  static BetaProfile polynomial(std::vector<double> coeffs);
  // arbitrary profile, derivatives by 4th-order central differences
  static BetaProfile from_function(std::function<double(double)> f, double fd_step = 1e-3);
};

// (1+u^2)^2 b'' + 2u(1+u^2) b' + 4 b at u.
double beta_ode_residual(const BetaProfile& beta_fn, double u);

// eta(u,v) = ( -(1+xi conj xi)^2 / (4 |xi'|^2) * beta' + i v ) * xi'.
Complex recovered_eta(const CurvePoly& xi, const BetaProfile& beta_fn, double u, double v);

// Transverse momentum-equation residual of the steady flow
// V = H(xi)/Q d/dr on eta = F, multiplied by Q^3 so the result is a
// polynomial in r (degree <= 6).  H is a real-valued polynomial amplitude.
std::function<Complex(double)> transverse_residual_sampler(const BiPoly& F, const BiPoly& H,
                                                           Complex xi);

struct ClassificationVerdict {
  enum class Kind { sphere, cylinder, plane, obstructed, mixed_rank };

  Kind kind = Kind::obstructed;
  Point3 center;                       // sphere
  Point3 axis_point;                   // cylinder
  Vec3 axis_direction;                 // cylinder
  Vec3 normal;                         // plane
  std::string reason;                  // obstructed
  std::vector<std::pair<std::string, double>> diagnostics;  // condition name, sup norm
  std::vector<std::string> notes;
};

std::string to_string(ClassificationVerdict::Kind k);

struct ClassifyOptions {
  int grid = 9;                 // grid points per parameter axis
  double rank2_radius = 1.0;    // sample disk |xi| <= radius
  double rank1_extent = 2.0;    // u, v in [-extent, extent]
  double pass_factor = 1e-8;    // thresholds scale with 1 + max coefficient
  double fail_factor = 1e-5;
};

// Sphere / cylinder / plane classification with named necessary-condition
// diagnostics; failures are verdicts, not errors.
ClassificationVerdict classify(const CongruenceSpec& spec, const ClassifyOptions& opt = {});

// Default sample sets used by classify and the focal report.
std::vector<Complex> default_disk_samples(int grid = 9, double radius = 1.0);
std::vector<std::pair<double, double>> default_uv_samples(int grid = 9, double extent = 2.0);

}  // namespace congflow
