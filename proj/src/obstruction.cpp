#include "congflow/obstruction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "congflow/errors.hpp"

namespace congflow {

RPolyCoeffs r_poly_coeffs(const std::function<Complex(double)>& sampler, int degree,
                          std::span<const double> r_samples) {
  const int n = static_cast<int>(r_samples.size());
  if (degree < 0) throw std::invalid_argument("r_poly_coeffs: negative degree");
  if (n < degree + 1) throw std::invalid_argument("r_poly_coeffs: need at least degree+1 samples");

  Eigen::MatrixXd V(n, degree + 1);
  for (int i = 0; i < n; ++i) {
    double pw = 1.0;
    for (int k = 0; k <= degree; ++k) {
      V(i, k) = pw;
      pw *= r_samples[i];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (cond > 1e10) {
    throw IllConditioned("r_poly_coeffs: Vandermonde condition estimate above 1e10");
  }

  Eigen::VectorXd bre(n), bim(n);
  for (int i = 0; i < n; ++i) {
    const Complex y = sampler(r_samples[i]);
    bre(i) = y.real();
    bim(i) = y.imag();
  }
  const Eigen::VectorXd cre = svd.solve(bre);
  const Eigen::VectorXd cim = svd.solve(bim);

  RPolyCoeffs out;
  out.degree = degree;
  out.conditioning = cond;
  out.coeffs.resize(degree + 1);
  for (int k = 0; k <= degree; ++k) out.coeffs[k] = Complex{cre(k), cim(k)};
  const Eigen::VectorXd rre = V * cre - bre;
  const Eigen::VectorXd rim = V * cim - bim;
  out.fit_residual = std::max(rre.lpNorm<Eigen::Infinity>(), rim.lpNorm<Eigen::Infinity>());
  return out;
}

Complex cmc_condition(const BiPoly& F, Complex xi) {
  const SpinField spin(F);
  const ChartRational cmc =
      spin.theta_fn().d_xi() + ChartRational(F.conj_poly().scaled(2.0), 2);
  return cmc.eval(xi);
}

double twist_vanishing(const BiPoly& F, std::span<const Complex> samples) {
  const SpinField spin(F);
  double sup = 0.0;
  for (const Complex xi : samples) sup = std::max(sup, std::abs(spin.at(xi).lambda));
  return sup;
}

double shear_vanishing(const BiPoly& F, std::span<const Complex> samples) {
  const SpinField spin(F);
  double sup = 0.0;
  for (const Complex xi : samples) sup = std::max(sup, std::abs(spin.at(xi).sigma));
  return sup;
}

Complex geodesic_residual(const CurvePoly& xi, double u) {
  const CurvePoly d1 = xi.derivative();
  const CurvePoly d2 = d1.derivative();
  const Complex x = xi.eval(u);
  const Complex xd = d1.eval(u);
  const Complex xdd = d2.eval(u);
  const Complex xb = std::conj(x);
  const Complex xdb = std::conj(xd);
  const Complex xddb = std::conj(xdd);
  return (1.0 + std::norm(x)) * (xdb * xdd - xd * xddb) - 2.0 * (xb * xd - x * xdb) * xd * xdb;
}

// ---------------------------------------------------------------------------
// Beta profiles and the beta ODE

BetaProfile BetaProfile::closed_form(double b0, double b1) {
  BetaProfile p;
  p.value = [=](double u) { return (b0 + 2.0 * b1 * u - b0 * u * u) / (1.0 + u * u); };
  p.d1 = [=](double u) {
    const double d = 1.0 + u * u;
    return 2.0 * (b1 - 2.0 * b0 * u - b1 * u * u) / (d * d);
  };
  p.d2 = [=](double u) {
    const double d = 1.0 + u * u;
    return (-4.0 * b0 - 12.0 * b1 * u + 12.0 * b0 * u * u + 4.0 * b1 * u * u * u) / (d * d * d);
  };
  return p;
}

BetaProfile BetaProfile::polynomial(std::vector<double> coeffs) {
  auto eval = [](const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  };
  auto derive = [](const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(double(k) * c[k]);
    return d;
  };
  const std::vector<double> c1 = derive(coeffs);
  const std::vector<double> c2 = derive(c1);
  BetaProfile p;
  p.value = [=](double u) { return eval(coeffs, u); };
  p.d1 = [=](double u) { return eval(c1, u); };
  p.d2 = [=](double u) { return eval(c2, u); };
  return p;
}

BetaProfile BetaProfile::from_function(std::function<double(double)> f, double fd_step) {
  const double h = fd_step;
  BetaProfile p;
  p.value = f;
  p.d1 = [=](double u) {
    return (-f(u + 2 * h) + 8 * f(u + h) - 8 * f(u - h) + f(u - 2 * h)) / (12 * h);
  };
  p.d2 = [=](double u) {
    return (-f(u + 2 * h) + 16 * f(u + h) - 30 * f(u) + 16 * f(u - h) - f(u - 2 * h)) /
           (12 * h * h);
  };
  return p;
}

double beta_ode_residual(const BetaProfile& beta_fn, double u) {
  const double d = 1.0 + u * u;
  return d * d * beta_fn.d2(u) + 2.0 * u * d * beta_fn.d1(u) + 4.0 * beta_fn.value(u);
}

Complex recovered_eta(const CurvePoly& xi, const BetaProfile& beta_fn, double u, double v) {
  const Complex xd = xi.derivative().eval(u);
  if (std::norm(xd) < 1e-24) {
    throw DegenerateParameterization("recovered_eta: xi'(u) vanishes");
  }
  const double d = 1.0 + std::norm(xi.eval(u));
  const Complex bracket{-(d * d) / (4.0 * std::norm(xd)) * beta_fn.d1(u), v};
  return bracket * xd;
}

// ---------------------------------------------------------------------------
// Steady transverse residual, cleared of poles by Q^3

std::function<Complex(double)> transverse_residual_sampler(const BiPoly& F, const BiPoly& H,
                                                           Complex xi) {
  const SpinField spin(F);
  const ChartRational sig2 =
      ChartRational::poly(spin.sigma_poly() * spin.sigma_poly().conj_poly());
  const ChartRational ell = spin.lambda_fn() * spin.lambda_fn() - sig2;
  const ChartRational fbar_over_d2(F.conj_poly(), 2);

  const Complex theta_v = spin.theta_fn().eval(xi);
  const Complex ell_v = ell.eval(xi);
  const Complex theta_xi = spin.theta_fn().d_xi().eval(xi);
  const Complex ell_xi = ell.d_xi().eval(xi);
  const Complex w = fbar_over_d2.eval(xi);
  const Complex hv = H.eval(xi);
  const Complex h_xi = H.d_xi().eval(xi);

  const double th = theta_v.real();
  const double lv = ell_v.real();
  return [=](double r) {
    const double x = r + th;
    const double q = x * x + lv;
    return -hv * h_xi * q + hv * hv * (2.0 * x * theta_xi + ell_xi + 4.0 * x * w);
  };
}

// ---------------------------------------------------------------------------
// Classification

std::string to_string(ClassificationVerdict::Kind k) {
  switch (k) {
    case ClassificationVerdict::Kind::sphere: return "sphere";
    case ClassificationVerdict::Kind::cylinder: return "cylinder";
    case ClassificationVerdict::Kind::plane: return "plane";
    case ClassificationVerdict::Kind::obstructed: return "obstructed";
    case ClassificationVerdict::Kind::mixed_rank: return "mixed_rank";
  }
  return "obstructed";
}

std::vector<Complex> default_disk_samples(int grid, double radius) {
  std::vector<Complex> out;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double a = -radius + 2.0 * radius * i / (grid - 1);
      const double b = -radius + 2.0 * radius * j / (grid - 1);
      const Complex xi{a, b};
      if (std::abs(xi) <= radius + 1e-12) out.push_back(xi);
    }
  }
  return out;
}

std::vector<std::pair<double, double>> default_uv_samples(int grid, double extent) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      out.emplace_back(-extent + 2.0 * extent * i / (grid - 1),
                       -extent + 2.0 * extent * j / (grid - 1));
    }
  }
  return out;
}

namespace {

// Least-squares fit of F to the pencil of a point (z0, t0); returns the
// centre and the max-norm coefficient residual.
std::pair<Point3, double> fit_sphere_center(const BiPoly& F) {
  std::vector<std::pair<int, int>> slots = {{0, 0}, {1, 0}, {2, 0}};
  for (const auto& t : F.terms()) {
    if (std::find(slots.begin(), slots.end(), std::make_pair(t.i, t.j)) == slots.end()) {
      slots.emplace_back(t.i, t.j);
    }
  }
  const int rows = 2 * static_cast<int>(slots.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, 3);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);

  auto coeff_of = [&](int i, int j) -> Complex {
    for (const auto& t : F.terms()) {
      if (t.i == i && t.j == j) return t.c;
    }
    return {};
  };

  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto [i, j] = slots[s];
    const Complex c = coeff_of(i, j);
    const int re = 2 * static_cast<int>(s);
    const int im = re + 1;
    b(re) = c.real();
    b(im) = c.imag();
    if (i == 0 && j == 0) {
      A(re, 0) = 0.5;  // Re c00 = X/2
      A(im, 1) = 0.5;  // Im c00 = Y/2
    } else if (i == 1 && j == 0) {
      A(re, 2) = -1.0;  // Re c10 = -T, Im c10 = 0
    } else if (i == 2 && j == 0) {
      A(re, 0) = -0.5;  // Re c20 = -X/2
      A(im, 1) = 0.5;   // Im c20 = Y/2
    }
    // all other slots demand zero coefficients
  }

  const Eigen::Vector3d w = A.colPivHouseholderQr().solve(b);
  const double resid = (A * w - b).lpNorm<Eigen::Infinity>();
  return {Point3{w(0), w(1), w(2)}, resid};
}

struct GateResult {
  bool passed = false;
  bool failed = false;
};

GateResult gate(double sup, double pass_tol, double fail_tol) {
  return {sup < pass_tol, sup > fail_tol};
}

}  // namespace

ClassificationVerdict classify(const CongruenceSpec& spec, const ClassifyOptions& opt) {
  ClassificationVerdict verdict;
  const double scale = 1.0 + spec.coefficient_scale();
  const double pass_tol = opt.pass_factor * scale;
  const double fail_tol = opt.fail_factor * scale;

  // Constant-rank precondition over the sample set.
  {
    std::vector<std::pair<double, double>> params;
    if (spec.rank() == 2) {
      for (const Complex xi : default_disk_samples(opt.grid, opt.rank2_radius)) {
        params.emplace_back(xi.real(), xi.imag());
      }
    } else {
      params = default_uv_samples(opt.grid, opt.rank1_extent);
    }
    for (const auto& [p1, p2] : params) {
      if (rank_at(spec, p1, p2) != spec.rank()) {
        verdict.kind = ClassificationVerdict::Kind::mixed_rank;
        verdict.reason = "rank is not constant on the sample set";
        return verdict;
      }
    }
  }

  if (spec.rank() == 2) {
    const auto samples = default_disk_samples(opt.grid, opt.rank2_radius);
    const SpinField spin(spec.F());
    const ChartRational cmc =
        spin.theta_fn().d_xi() + ChartRational(spec.F().conj_poly().scaled(2.0), 2);

    double sup_shear = 0.0, sup_twist = 0.0, sup_cmc = 0.0;
    for (const Complex xi : samples) {
      const SpinData s = spin.at(xi);
      sup_shear = std::max(sup_shear, std::abs(s.sigma));
      sup_twist = std::max(sup_twist, std::abs(s.lambda));
      sup_cmc = std::max(sup_cmc, std::abs(cmc.eval(xi)));
    }
    verdict.diagnostics = {{"shear", sup_shear}, {"twist", sup_twist}, {"cmc", sup_cmc}};

    const std::array<std::pair<const char*, double>, 3> gates = {
        std::make_pair("shear nonzero", sup_shear), std::make_pair("twist nonzero", sup_twist),
        std::make_pair("cmc violated", sup_cmc)};
    bool all_pass = true;
    for (const auto& [name, sup] : gates) {
      const GateResult g = gate(sup, pass_tol, fail_tol);
      if (g.failed) {
        verdict.kind = ClassificationVerdict::Kind::obstructed;
        verdict.reason = name;
        return verdict;
      }
      all_pass = all_pass && g.passed;
    }
    if (!all_pass) {
      verdict.kind = ClassificationVerdict::Kind::obstructed;
      verdict.reason = "indeterminate (refine sampling)";
      return verdict;
    }

    const auto [center, fit_resid] = fit_sphere_center(spec.F());
    verdict.kind = ClassificationVerdict::Kind::sphere;
    verdict.center = center;
    verdict.notes.push_back("sphere fit coefficient residual " + std::to_string(fit_resid));
    return verdict;
  }

  if (spec.rank() == 1) {
    const auto uv = default_uv_samples(opt.grid, opt.rank1_extent);

    double sup_geo = 0.0;
    for (int i = 0; i < opt.grid; ++i) {
      const double u = -opt.rank1_extent + 2.0 * opt.rank1_extent * i / (opt.grid - 1);
      sup_geo = std::max(sup_geo, std::abs(geodesic_residual(spec.xi_curve(), u)));
    }

    // Normalize the direction-curve parameterization: for a great circle
    // through the pole the curve is a common phase times a real polynomial.
    Complex lead{1.0, 0.0};
    double best = 0.0;
    for (const auto& t : spec.xi_curve().terms()) {
      if (t.k >= 1 && std::abs(t.c) > best) {
        best = std::abs(t.c);
        lead = t.c;
      }
    }
    const Complex phase = lead / std::abs(lead);
    const CurvePoly q_poly = spec.xi_curve().scaled(std::conj(phase));
    const CurvePoly qd_poly = q_poly.derivative();
    const CurvePoly qdd_poly = qd_poly.derivative();

    const BetaField beta_field(spec.xi_curve(), spec.eta_sheet());
    const RationalUV beta_u = beta_field.rational().d_u();
    const RationalUV beta_uu = beta_u.d_u();

    // Zeroth-order momentum condition relating the slope of beta to eta:
    //   d(beta)/du = -2 (conj(eta) xi' + eta conj(xi')) / (1+xi conj xi)^2.
    // Congruences that satisfy the beta ODE by accident fail this one.
    const SheetPoly X = SheetPoly::from_curve(spec.xi_curve());
    const SheetPoly Xd = X.d_u();
    const SheetPoly compat_num =
        spec.eta_sheet().conj_poly() * Xd + spec.eta_sheet() * Xd.conj_poly();
    const SheetPoly one_uv = SheetPoly::constant(1.0);
    const SheetPoly D_uv = one_uv + X * X.conj_poly();

    double sup_beta = 0.0;
    double sup_compat = 0.0;
    bool beta_ok = true;
    std::string beta_issue;
    for (const auto& [u, v] : uv) {
      const double qd = qd_poly.eval(u).real();
      if (std::abs(qd) < 1e-10 * scale) continue;  // rank guard already screens these
      try {
        const double b = beta_field.at(u, v);
        const double b1 = beta_u.eval(u, v).real();
        const double b2 = beta_uu.eval(u, v).real();
        const double qv = q_poly.eval(u).real();
        const double qdd = qdd_poly.eval(u).real();
        const double bt1 = b1 / qd;
        const double bt2 = (b2 * qd - b1 * qdd) / (qd * qd * qd);
        const double d = 1.0 + qv * qv;
        sup_beta = std::max(sup_beta, std::abs(d * d * bt2 + 2.0 * qv * d * bt1 + 4.0 * b));
        const double duv = D_uv.eval(u, v).real();
        const double compat = b1 + 2.0 * compat_num.eval(u, v).real() / (duv * duv);
        sup_compat = std::max(sup_compat, std::abs(compat));
      } catch (const DegenerateParameterization& e) {
        beta_ok = false;
        beta_issue = e.what();
        break;
      }
    }
    verdict.diagnostics = {
        {"geodesic", sup_geo}, {"beta_ode", sup_beta}, {"eta_compatibility", sup_compat}};
    verdict.notes.push_back("beta ODE evaluated in the unit-speed parameter of the direction curve");

    if (!beta_ok) {
      verdict.kind = ClassificationVerdict::Kind::obstructed;
      verdict.reason = beta_issue;
      return verdict;
    }
    const GateResult g_geo = gate(sup_geo, pass_tol, fail_tol);
    if (g_geo.failed) {
      verdict.kind = ClassificationVerdict::Kind::obstructed;
      verdict.reason = "geodesic violated";
      return verdict;
    }
    const GateResult g_beta = gate(sup_beta, pass_tol, fail_tol);
    if (g_beta.failed) {
      verdict.kind = ClassificationVerdict::Kind::obstructed;
      verdict.reason = "beta_ode violated";
      return verdict;
    }
    const GateResult g_compat = gate(sup_compat, pass_tol, fail_tol);
    if (g_compat.failed) {
      verdict.kind = ClassificationVerdict::Kind::obstructed;
      verdict.reason = "eta_compatibility violated";
      return verdict;
    }
    if (!(g_geo.passed && g_beta.passed && g_compat.passed)) {
      verdict.kind = ClassificationVerdict::Kind::obstructed;
      verdict.reason = "indeterminate (refine sampling)";
      return verdict;
    }

    // Axis direction: normal of the plane of the direction great circle.
    Eigen::MatrixXd dirs(static_cast<int>(opt.grid), 3);
    for (int i = 0; i < opt.grid; ++i) {
      const double u = -opt.rank1_extent + 2.0 * opt.rank1_extent * i / (opt.grid - 1);
      const Vec3 d = direction_vector(spec.xi_curve().eval(u));
      dirs(i, 0) = d.x1;
      dirs(i, 1) = d.x2;
      dirs(i, 2) = d.x3;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dirs, Eigen::ComputeThinV);
    Eigen::Vector3d n = svd.matrixV().col(2);
    for (int i = 0; i < 3; ++i) {
      if (std::abs(n(i)) > 1e-8) {
        if (n(i) < 0) n = -n;
        break;
      }
    }

    // Axis position: centroid of the focal points (r = -beta), projected to
    // its closest point to the origin along the axis.
    Vec3 centroid;
    int count = 0;
    for (const auto& [u, v] : uv) {
      try {
        const double b = beta_field.at(u, v);
        const Point3 fp = line_to_point(spec.line_at(u, v), -b);
        centroid = centroid + fp;
        ++count;
      } catch (const DegenerateParameterization&) {
        continue;
      }
    }
    if (count > 0) centroid = centroid / double(count);
    const Vec3 axis_dir{n(0), n(1), n(2)};
    verdict.kind = ClassificationVerdict::Kind::cylinder;
    verdict.axis_direction = axis_dir;
    verdict.axis_point = centroid - axis_dir * centroid.dot(axis_dir);
    return verdict;
  }

  verdict.kind = ClassificationVerdict::Kind::plane;
  verdict.normal = direction_vector(spec.xi0());
  return verdict;
}

}  // namespace congflow
