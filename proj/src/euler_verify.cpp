#include "congflow/euler_verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "congflow/errors.hpp"

namespace congflow {

void FDConfig::validate() const {
  if (!(step >= 1e-9 && step <= 1e-2)) {
    throw std::invalid_argument("FDConfig: step outside [1e-9, 1e-2]");
  }
  if (!(time_step >= 1e-9 && time_step <= 1e-2)) {
    throw std::invalid_argument("FDConfig: time_step outside [1e-9, 1e-2]");
  }
}

namespace {

// First derivative of f at 0 from samples f(delta).
template <typename F>
double fd_derivative(const FDConfig& cfg, F&& f) {
  const double h = cfg.step;
  if (cfg.scheme == FDConfig::Scheme::central4) {
    return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
  }
  return (f(h) - f(-h)) / (2.0 * h);
}

Vec3 axis_offset(int axis, double delta) {
  Vec3 e;
  if (axis == 0) e.x1 = delta;
  if (axis == 1) e.x2 = delta;
  if (axis == 2) e.x3 = delta;
  return e;
}

void guard_clearance(const FlowField& flow, const FlowField::LineRef& loc, const FDConfig& cfg) {
  if (flow.singularity_clearance(loc) < 10.0 * cfg.step) {
    throw SingularityTooClose("finite-difference stencil too close to a flow singularity");
  }
}

double component(const Vec3& v, int i) { return i == 0 ? v.x1 : (i == 1 ? v.x2 : v.x3); }

}  // namespace

void ResidualReport::add(std::size_t index, const ResidualSample& s) {
  sup_momentum = std::max(sup_momentum, s.momentum_norm);
  sup_divergence = std::max(sup_divergence, std::abs(s.divergence));
  samples.emplace_back(index, s);
}

void ResidualReport::merge(const ResidualReport& other) {
  sup_momentum = std::max(sup_momentum, other.sup_momentum);
  sup_divergence = std::max(sup_divergence, other.sup_divergence);
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
}

std::vector<ResidualSample> ResidualReport::finalize() const {
  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ResidualSample> out;
  out.reserve(sorted.size());
  for (const auto& [idx, s] : sorted) out.push_back(s);
  return out;
}

double euclidean_divergence(const FlowField& flow, const Point3& p, double t,
                            const FDConfig& cfg) {
  cfg.validate();
  const auto base = flow.locate(p);
  guard_clearance(flow, base, cfg);
  double div = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    div += fd_derivative(cfg, [&](double d) {
      return component(flow.velocity(p + axis_offset(axis, d), t, base), axis);
    });
  }
  return div;
}

Vec3 euler_residual(const FlowField& flow, const Point3& p, double t, const FDConfig& cfg) {
  cfg.validate();
  if (flow.pressure_form() == PressureForm::none) {
    throw std::logic_error("euler_residual: flow has no pressure");
  }
  const auto base = flow.locate(p);
  guard_clearance(flow, base, cfg);

  const Vec3 dvdt = flow.velocity_dt(p, t, base);
  const Vec3 v = flow.velocity(p, t, base);

  Vec3 convective;
  Vec3 grad_p;
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 dv_daxis = [&] {
      const double h = cfg.step;
      auto vel = [&](double d) { return flow.velocity(p + axis_offset(axis, d), t, base); };
      if (cfg.scheme == FDConfig::Scheme::central4) {
        return (-vel(2.0 * h) + vel(h) * 8.0 - vel(-h) * 8.0 + vel(-2.0 * h)) / (12.0 * h);
      }
      return (vel(h) - vel(-h)) / (2.0 * h);
    }();
    convective = convective + dv_daxis * component(v, axis);
    const double dp = fd_derivative(
        cfg, [&](double d) { return flow.pressure(p + axis_offset(axis, d), t, base); });
    if (axis == 0) grad_p.x1 = dp;
    if (axis == 1) grad_p.x2 = dp;
    if (axis == 2) grad_p.x3 = dp;
  }
  return dvdt + convective + grad_p;
}

// ---------------------------------------------------------------------------
// ChartMap

ChartMap::ChartMap(const CongruenceSpec& spec) : spec_(spec) {
  switch (spec.rank()) {
    case 2: {
      const BiPoly& F = spec.F();
      const BiPoly Fb = F.conj_poly();
      const BiPoly xi = BiPoly::monomial(1, 0, 1.0);
      const BiPoly xibar = BiPoly::monomial(0, 1, 1.0);
      const BiPoly one = BiPoly::constant(1.0);
      z2_[0] = ChartRational((F - xi * xi * Fb).scaled(2.0), 2);
      z2_[1] = ChartRational(xi.scaled(2.0), 1);
      z2_[2] = ChartRational((xi * Fb + xibar * F).scaled(-2.0), 2);
      z2_[3] = ChartRational(one - xi * xibar, 1);
      for (int k = 0; k < 4; ++k) {
        dz2_[k] = z2_[k].d_xi();
        dz2_[4 + k] = z2_[k].d_xibar();
      }
      break;
    }
    case 1: {
      const SheetPoly X = SheetPoly::from_curve(spec.xi_curve());
      const SheetPoly Xb = X.conj_poly();
      const SheetPoly E = spec.eta_sheet();
      const SheetPoly Eb = E.conj_poly();
      const SheetPoly one = SheetPoly::constant(1.0);
      const SheetPoly D = one + X * Xb;
      const SheetPoly D2 = D * D;
      z1_[0] = RationalUV((E - X * X * Eb).scaled(2.0), D2);
      z1_[1] = RationalUV(X.scaled(2.0), D);
      z1_[2] = RationalUV((X * Eb + Xb * E).scaled(-2.0), D2);
      z1_[3] = RationalUV(one - X * Xb, D);
      for (int k = 0; k < 4; ++k) {
        dz1_[k] = z1_[k].d_u();
        dz1_[4 + k] = z1_[k].d_v();
      }
      break;
    }
    default: {
      const Complex xi0 = spec.xi0();
      const double d0 = 1.0 + std::norm(xi0);
      const Complex zu = (1.0 - xi0 * xi0) / (d0 * d0);
      const Complex zv = Complex{0.0, 1.0} * (1.0 + xi0 * xi0) / (d0 * d0);
      const Complex zr = 2.0 * xi0 / d0;
      j0_ << zu.real(), zv.real(), zr.real(),
             zu.imag(), zv.imag(), zr.imag(),
             -2.0 * xi0.real() / (d0 * d0), -2.0 * xi0.imag() / (d0 * d0),
             (1.0 - std::norm(xi0)) / d0;
      break;
    }
  }
}

Point3 ChartMap::position(double c1, double c2, double r) const {
  switch (spec_.rank()) {
    case 2: return line_to_point(spec_.line_at(Complex{c1, c2}), r);
    default: return line_to_point(spec_.line_at(c1, c2), r);
  }
}

Eigen::Matrix3d ChartMap::jacobian(double c1, double c2, double r) const {
  Eigen::Matrix3d J;
  switch (spec_.rank()) {
    case 2: {
      const Complex xi{c1, c2};
      // columns for d/da and d/db via the Wirtinger derivatives
      Complex dz[8];
      for (int k = 0; k < 8; ++k) dz[k] = dz2_[k].eval(xi);
      const Complex za = (dz[0] + dz[4]) + r * (dz[1] + dz[5]);
      const Complex ta = (dz[2] + dz[6]) + r * (dz[3] + dz[7]);
      const Complex i_unit{0.0, 1.0};
      const Complex zb = i_unit * (dz[0] - dz[4]) + r * i_unit * (dz[1] - dz[5]);
      const Complex tb = i_unit * (dz[2] - dz[6]) + r * i_unit * (dz[3] - dz[7]);
      const Complex zr = z2_[1].eval(xi);
      const Complex tr = z2_[3].eval(xi);
      J << za.real(), zb.real(), zr.real(),
           za.imag(), zb.imag(), zr.imag(),
           ta.real(), tb.real(), tr.real();
      break;
    }
    case 1: {
      Complex dz[8];
      for (int k = 0; k < 8; ++k) dz[k] = dz1_[k].eval(c1, c2);
      const Complex zu = dz[0] + r * dz[1];
      const Complex tu = dz[2] + r * dz[3];
      const Complex zv = dz[4] + r * dz[5];
      const Complex tv = dz[6] + r * dz[7];
      const Complex zr = z1_[1].eval(c1, c2);
      const Complex tr = z1_[3].eval(c1, c2);
      J << zu.real(), zv.real(), zr.real(),
           zu.imag(), zv.imag(), zr.imag(),
           tu.real(), tv.real(), tr.real();
      break;
    }
    default:
      J = j0_;
      break;
  }
  return J;
}

Eigen::Matrix3d ChartMap::metric(double c1, double c2, double r) const {
  const Eigen::Matrix3d J = jacobian(c1, c2, r);
  return J.transpose() * J;
}

Eigen::Matrix3d pullback_metric(const CongruenceSpec& spec, double c1, double c2, double r) {
  return ChartMap(spec).metric(c1, c2, r);
}

namespace {

Eigen::Matrix3d metric_inverse_checked(const Eigen::Matrix3d& g) {
  const double det = g.determinant();
  const double scale = std::max(1.0, std::pow(g.norm(), 3));
  if (std::abs(det) < 1e-12 * scale) {
    throw DegenerateJacobian("pullback metric is singular (focal radius)");
  }
  return g.inverse();
}

ChristoffelSymbols christoffels_from_map(const ChartMap& map, double c1, double c2, double r,
                                         const FDConfig& cfg) {
  const Eigen::Matrix3d g = map.metric(c1, c2, r);
  const Eigen::Matrix3d ginv = metric_inverse_checked(g);

  std::array<Eigen::Matrix3d, 3> dg;
  for (int l = 0; l < 3; ++l) {
    auto g_at = [&](double d) {
      const double y[3] = {c1 + (l == 0 ? d : 0.0), c2 + (l == 1 ? d : 0.0),
                           r + (l == 2 ? d : 0.0)};
      return map.metric(y[0], y[1], y[2]);
    };
    const double h = cfg.step;
    if (cfg.scheme == FDConfig::Scheme::central4) {
      dg[l] = (-g_at(2.0 * h) + 8.0 * g_at(h) - 8.0 * g_at(-h) + g_at(-2.0 * h)) / (12.0 * h);
    } else {
      dg[l] = (g_at(h) - g_at(-h)) / (2.0 * h);
    }
  }

  ChristoffelSymbols gamma;
  for (int k = 0; k < 3; ++k) {
    gamma[k].setZero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 3; ++l) {
          acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
        gamma[k](i, j) = 0.5 * acc;
      }
    }
  }
  return gamma;
}

}  // namespace

ChristoffelSymbols christoffels(const CongruenceSpec& spec, double c1, double c2, double r,
                                const FDConfig& cfg) {
  cfg.validate();
  return christoffels_from_map(ChartMap(spec), c1, c2, r, cfg);
}

double covariant_divergence(const CongruenceSpec& spec, const ChartVectorField& components,
                            double c1, double c2, double r, const FDConfig& cfg) {
  cfg.validate();
  const ChartMap map(spec);
  const auto gamma = christoffels_from_map(map, c1, c2, r, cfg);

  double div = 0.0;
  for (int k = 0; k < 3; ++k) {
    div += fd_derivative(cfg, [&](double d) {
      const double y[3] = {c1 + (k == 0 ? d : 0.0), c2 + (k == 1 ? d : 0.0),
                           r + (k == 2 ? d : 0.0)};
      return component(components(y[0], y[1], y[2]), k);
    });
  }
  const Vec3 v = components(c1, c2, r);
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      div += gamma[k](k, l) * component(v, l);
    }
  }
  return div;
}

std::vector<Point3> trace_streamline(const FlowField& flow, const Point3& start, double t,
                                     double arclength, int steps) {
  if (arclength < 0.0) throw std::invalid_argument("trace_streamline: negative arclength");
  if (arclength == 0.0) return {start};
  if (steps < 1) throw std::invalid_argument("trace_streamline: steps must be positive");

  auto unit_velocity = [&](const Point3& p, const FlowField::LineRef& seed) {
    const Vec3 v = flow.velocity(p, t, seed);
    const double n = v.norm();
    if (n < 1e-13) throw SingularityTooClose("streamline reached a stagnation point");
    return v / n;
  };

  try {
    std::vector<Point3> line;
    line.reserve(steps + 1);
    line.push_back(start);
    auto seed = flow.locate(start);
    const double h = arclength / steps;
    Point3 x = start;
    for (int s = 0; s < steps; ++s) {
      const Vec3 k1 = unit_velocity(x, seed);
      const Vec3 k2 = unit_velocity(x + k1 * (h / 2.0), seed);
      const Vec3 k3 = unit_velocity(x + k2 * (h / 2.0), seed);
      const Vec3 k4 = unit_velocity(x + k3 * h, seed);
      x = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
      seed = flow.locate(x, seed);
      line.push_back(x);
    }
    return line;
  } catch (const FocalSingularity& e) {
    throw SingularityTooClose(e.what());
  } catch (const SourceSingularity& e) {
    throw SingularityTooClose(e.what());
  }
}

}  // namespace congflow
