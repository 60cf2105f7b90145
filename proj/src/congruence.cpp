#include "congflow/congruence.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "congflow/errors.hpp"

namespace congflow {

SpinField::SpinField(const BiPoly& F) : F_(F) {
  F_xi_ = F.d_xi();
  F_xibar_ = F.d_xibar();
  sigma_ = F.conj_poly().d_xi().scaled(-1.0);
  const BiPoly d = BiPoly::one_plus_xixibar();
  const BiPoly xibar = BiPoly::monomial(0, 1, 1.0);
  // rho = (F_xi (1+xi xibar) - 2 xibar F) / (1+xi xibar)
  rho_ = ChartRational(F_xi_ * d - (xibar * F).scaled(2.0), 1);
  theta_ = (rho_ + rho_.conj()).scaled(0.5);
  lambda_ = (rho_ - rho_.conj()).scaled(Complex{0.0, -0.5});
}

SpinData SpinField::at(Complex xi) const {
  const Complex rho = rho_.eval(xi);
  return SpinData{sigma_.eval(xi), rho.real(), rho.imag()};
}

SpinData spin_coefficients(const BiPoly& F, Complex xi) { return SpinField(F).at(xi); }

std::vector<double> focal_points(const SpinData& s) {
  const double disc = std::norm(s.sigma) - s.lambda * s.lambda;
  if (disc < 0.0) return {};
  const double root = std::sqrt(disc);
  return {-s.theta - root, -s.theta + root};
}

// ---------------------------------------------------------------------------
// CongruenceSpec

CongruenceSpec CongruenceSpec::rank2(BiPoly F) {
  if (F.total_degree() > kMaxDegree) {
    throw std::invalid_argument("CongruenceSpec: rank-2 polynomial degree above cap");
  }
  CongruenceSpec s;
  s.rank_ = 2;
  s.F_ = std::move(F);
  return s;
}

CongruenceSpec CongruenceSpec::rank1(CurvePoly xi, SheetPoly eta) {
  if (xi.degree() < 1) {
    throw std::invalid_argument("CongruenceSpec: rank-1 direction curve must be non-constant");
  }
  if (xi.degree() > kMaxDegree || eta.total_degree() > kMaxDegree) {
    throw std::invalid_argument("CongruenceSpec: rank-1 polynomial degree above cap");
  }
  CongruenceSpec s;
  s.rank_ = 1;
  s.xi_curve_ = std::move(xi);
  s.eta_sheet_ = std::move(eta);
  return s;
}

CongruenceSpec CongruenceSpec::rank0(Complex xi0) {
  if (!is_finite(xi0)) throw std::invalid_argument("CongruenceSpec: non-finite direction");
  CongruenceSpec s;
  s.rank_ = 0;
  s.xi0_ = xi0;
  return s;
}

const BiPoly& CongruenceSpec::F() const {
  if (rank_ != 2) throw std::logic_error("CongruenceSpec: F is defined for rank 2 only");
  return F_;
}

const CurvePoly& CongruenceSpec::xi_curve() const {
  if (rank_ != 1) throw std::logic_error("CongruenceSpec: xi(u) is defined for rank 1 only");
  return xi_curve_;
}

const SheetPoly& CongruenceSpec::eta_sheet() const {
  if (rank_ != 1) throw std::logic_error("CongruenceSpec: eta(u,v) is defined for rank 1 only");
  return eta_sheet_;
}

Complex CongruenceSpec::xi0() const {
  if (rank_ != 0) throw std::logic_error("CongruenceSpec: xi0 is defined for rank 0 only");
  return xi0_;
}

double CongruenceSpec::coefficient_scale() const {
  switch (rank_) {
    case 2:
      return F_.max_coeff_norm();
    case 1:
      return std::max(xi_curve_.max_coeff_norm(), eta_sheet_.max_coeff_norm());
    default:
      return std::abs(xi0_);
  }
}

OrientedLine CongruenceSpec::line_at(Complex xi) const {
  if (rank_ != 2) throw std::logic_error("CongruenceSpec: xi chart is rank-2 only");
  return OrientedLine(xi, F_.eval(xi));
}

OrientedLine CongruenceSpec::line_at(double u, double v) const {
  if (rank_ == 1) return OrientedLine(xi_curve_.eval(u), eta_sheet_.eval(u, v));
  if (rank_ == 0) return OrientedLine(xi0_, Complex{u, v} * 0.5);
  throw std::logic_error("CongruenceSpec: (u,v) chart is rank-1/rank-0 only");
}

int rank_at(const CongruenceSpec& spec, double p1, double p2) {
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  switch (spec.rank()) {
    case 2:
      (void)p1;
      (void)p2;
      J.setIdentity();
      break;
    case 1: {
      const Complex dxi = spec.xi_curve().derivative().eval(p1);
      J(0, 0) = dxi.real();
      J(1, 0) = dxi.imag();
      break;
    }
    default:
      break;
  }
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0) return 0;
  int r = 0;
  for (int i = 0; i < 2; ++i) {
    if (sv(i) > 1e-8 * sv(0)) ++r;
  }
  return r;
}

// ---------------------------------------------------------------------------
// BetaField

BetaField::BetaField(const CurvePoly& xi, const SheetPoly& eta) {
  const SheetPoly X = SheetPoly::from_curve(xi);
  const SheetPoly Xb = X.conj_poly();
  const SheetPoly E = eta;
  const SheetPoly Eb = eta.conj_poly();
  const SheetPoly Xu = X.d_u();
  const SheetPoly Xbu = Xb.d_u();
  const SheetPoly Eu = E.d_u();
  const SheetPoly Ev = E.d_v();
  const SheetPoly Ebu = Eb.d_u();
  const SheetPoly Ebv = Eb.d_v();
  const SheetPoly D = SheetPoly::constant(1.0) + X * Xb;

  const SheetPoly num =
      (Ev * Ebu - Eu * Ebv) * D - (Eb * X * Xbu * Ev - E * Xb * Xu * Ebv).scaled(2.0);
  const SheetPoly den = (Ev * Xbu - Ebv * Xu) * D;
  beta_ = RationalUV(num, den);
}

double BetaField::at(double u, double v) const {
  const Complex den = beta_.den_value(u, v);
  const double scale = 1.0 + beta_.num().max_coeff_norm();
  if (std::abs(den) < 1e-12 * scale) {
    throw DegenerateParameterization("beta: denominator vanishes at (u,v)");
  }
  const Complex value = beta_.num().eval(u, v) / den;
  if (std::abs(value.imag()) > 1e-10 * (1.0 + std::abs(value.real()))) {
    throw std::runtime_error("beta: non-real value, parameterization is not a line congruence");
  }
  return value.real();
}

double beta(const CongruenceSpec& spec, double u, double v) {
  return BetaField(spec.xi_curve(), spec.eta_sheet()).at(u, v);
}

// ---------------------------------------------------------------------------
// Euclidean motions

CongruenceSpec rotated_about_x3(const CongruenceSpec& spec, double alpha) {
  const Complex phase = std::polar(1.0, alpha);
  switch (spec.rank()) {
    case 2: {
      // Lines map by (xi, eta) -> (phase xi, phase eta); the graph becomes
      // eta' = phase F(xi'/phase, conj(xi'/phase)).
      std::vector<BiPoly::Term> ts;
      for (const auto& t : spec.F().terms()) {
        ts.push_back({t.i, t.j, t.c * std::polar(1.0, alpha * double(1 - t.i + t.j))});
      }
      return CongruenceSpec::rank2(BiPoly(std::move(ts)));
    }
    case 1:
      return CongruenceSpec::rank1(spec.xi_curve().scaled(phase), spec.eta_sheet().scaled(phase));
    default:
      return CongruenceSpec::rank0(phase * spec.xi0());
  }
}

namespace {
// Fibre-coordinate offset of the pencil of lines through w, as a function of
// the direction coordinate.
CurvePoly pencil_offset(const Vec3& w, const CurvePoly& xi) {
  const Complex zw{w.x1, w.x2};
  const CurvePoly one = CurvePoly::monomial(0, 1.0);
  return (one.scaled(zw) - xi.scaled(2.0 * w.x3) - (xi * xi).scaled(std::conj(zw))).scaled(0.5);
}
}  // namespace

CongruenceSpec translated(const CongruenceSpec& spec, const Vec3& w) {
  const Complex zw{w.x1, w.x2};
  switch (spec.rank()) {
    case 2: {
      const BiPoly offset = BiPoly({{0, 0, 0.5 * zw},
                                    {1, 0, Complex{-w.x3, 0.0}},
                                    {2, 0, -0.5 * std::conj(zw)}});
      return CongruenceSpec::rank2(spec.F() + offset);
    }
    case 1: {
      const SheetPoly offset = SheetPoly::from_curve(pencil_offset(w, spec.xi_curve()));
      return CongruenceSpec::rank1(spec.xi_curve(), spec.eta_sheet() + offset);
    }
    default:
      // A family of parallel lines is translation invariant as a set.
      return spec;
  }
}

}  // namespace congflow
