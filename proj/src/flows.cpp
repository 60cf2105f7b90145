#include "congflow/flows.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "congflow/errors.hpp"

namespace congflow {

namespace {
constexpr double kFocalDenomTol = 1e-12;
constexpr double kSourceTol = 1e-9;
constexpr double kCaseTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::string to_string(PressureForm form) {
  switch (form) {
    case PressureForm::none: return "none";
    case PressureForm::steady: return "steady";
    case PressureForm::case_i: return "case_i";
    case PressureForm::case_ii: return "case_ii";
    case PressureForm::case_iii: return "case_iii";
    case PressureForm::rank1: return "rank1";
    case PressureForm::rank0: return "rank0";
  }
  return "none";
}

int FlowField::congruence_rank() const {
  switch (kind_) {
    case Kind::rank2:
    case Kind::sphere: return 2;
    case Kind::rank1:
    case Kind::cylinder: return 1;
    default: return 0;
  }
}

// ---------------------------------------------------------------------------
// Line inversion.  A point p lies on the congruence line with chart value q
// exactly when the fibre coordinate of the pencil of lines through p matches
// the congruence there; Newton's method solves that 2x2 real system with
// exact derivatives.

namespace {

Complex pencil_eta(const Point3& p, Complex xi) {
  const Complex z{p.x1, p.x2};
  return 0.5 * (z - 2.0 * p.x3 * xi - std::conj(z) * xi * xi);
}

struct NewtonResult {
  bool ok = false;
  Complex root;
};

// One Newton run for the rank-2 system F(xi) - pencil_eta(p, xi) = 0.
NewtonResult newton_rank2(const SpinField& spin, const Point3& p, Complex seed, double scale) {
  const Complex zbar{p.x1, -p.x2};
  Complex xi = seed;
  for (int it = 0; it < 50; ++it) {
    const Complex g = spin.F().eval(xi) - pencil_eta(p, xi);
    if (std::abs(g) < 1e-13 * scale) return {true, xi};
    const Complex gxi = spin.F_xi().eval(xi) + p.x3 + zbar * xi;
    const Complex gxb = spin.F_xibar().eval(xi);
    const Complex ga = gxi + gxb;
    const Complex gb = Complex{0.0, 1.0} * (gxi - gxb);
    const double det = ga.real() * gb.imag() - gb.real() * ga.imag();
    if (std::abs(det) < 1e-14 * scale * scale) return {};
    const double da = (-g.real() * gb.imag() + gb.real() * g.imag()) / det;
    const double db = (-ga.real() * g.imag() + g.real() * ga.imag()) / det;
    xi += Complex{da, db};
    if (!is_finite(xi) || std::abs(xi) > 1e3) return {};
  }
  const Complex g = spin.F().eval(xi) - pencil_eta(p, xi);
  if (std::abs(g) < 1e-10 * scale) return {true, xi};
  return {};
}

struct NewtonResultUV {
  bool ok = false;
  double u = 0.0, v = 0.0;
};

}  // namespace

struct Rank1Data {
  CurvePoly xi;
  CurvePoly dxi;
  SheetPoly eta;
  SheetPoly eta_u;
  SheetPoly eta_v;
};

namespace {

NewtonResultUV newton_rank1(const Rank1Data& g1, const Point3& p, double su, double sv,
                            double scale) {
  const Complex zbar{p.x1, -p.x2};
  double u = su, v = sv;
  for (int it = 0; it < 60; ++it) {
    const Complex xi = g1.xi.eval(u);
    const Complex g = g1.eta.eval(u, v) - pencil_eta(p, xi);
    if (std::abs(g) < 1e-13 * scale) return {true, u, v};
    const Complex dxi = g1.dxi.eval(u);
    const Complex gu = g1.eta_u.eval(u, v) + (p.x3 + zbar * xi) * dxi;
    const Complex gv = g1.eta_v.eval(u, v);
    const double det = gu.real() * gv.imag() - gv.real() * gu.imag();
    if (std::abs(det) < 1e-14 * scale * scale) return {};
    const double du = (-g.real() * gv.imag() + gv.real() * g.imag()) / det;
    const double dv = (-gu.real() * g.imag() + g.real() * gu.imag()) / det;
    u += du;
    v += dv;
    if (!std::isfinite(u) || !std::isfinite(v) || std::abs(u) > 1e3 || std::abs(v) > 1e3) return {};
  }
  const Complex g = g1.eta.eval(u, v) - pencil_eta(p, g1.xi.eval(u));
  if (std::abs(g) < 1e-10 * scale) return {true, u, v};
  return {};
}

}  // namespace

FlowField::LineRef FlowField::locate_rank2(const Point3& p, const Complex* seed) const {
  const double scale = 1.0 + spin_->F().max_coeff_norm() + p.norm();
  if (seed != nullptr) {
    const auto res = newton_rank2(*spin_, p, *seed, scale);
    if (!res.ok) {
      throw SingularityTooClose("line inversion lost the congruence branch near the point");
    }
    return LineRef{res.root, 0.0, 0.0, point_to_r(p, res.root)};
  }

  std::vector<Complex> seeds;
  const double pn = p.norm();
  if (pn > 1e-12) {
    const Vec3 d = p / pn;
    if (1.0 + d.x3 > 1e-9) {
      const Complex xi_dir = Complex{d.x1, d.x2} / (1.0 + d.x3);
      seeds.push_back(xi_dir);
      if (std::abs(xi_dir) > 1e-9) seeds.push_back(-1.0 / std::conj(xi_dir));
    }
  }
  for (const Complex s : {Complex{0, 0}, Complex{0.7, 0}, Complex{-0.7, 0}, Complex{0, 0.7},
                          Complex{0, -0.7}, Complex{0.7, 0.7}, Complex{-0.7, 0.7},
                          Complex{0.7, -0.7}, Complex{-0.7, -0.7}, Complex{1.6, 0},
                          Complex{-1.6, 0}, Complex{0, 1.6}, Complex{0, -1.6}}) {
    seeds.push_back(s);
  }

  std::vector<Complex> roots;
  for (const Complex s : seeds) {
    const auto res = newton_rank2(*spin_, p, s, scale);
    if (!res.ok) continue;
    bool dup = false;
    for (const Complex r : roots) {
      if (std::abs(r - res.root) < 1e-7 * (1.0 + std::abs(r))) dup = true;
    }
    if (!dup) roots.push_back(res.root);
  }
  if (roots.empty()) {
    throw SingularityTooClose("no congruence line found through the point");
  }
  // Several oriented lines of the congruence can pass through one point (the
  // two orientations of a pencil, for instance); pick the branch that sees
  // the point furthest along the positive orientation.
  Complex best = roots.front();
  double best_r = -kInf;
  for (const Complex rt : roots) {
    const double r = point_to_r(p, rt);
    if (r > best_r) {
      best_r = r;
      best = rt;
    }
  }
  return LineRef{best, 0.0, 0.0, best_r};
}

FlowField::LineRef FlowField::locate_rank1(const Point3& p, const double* seed_uv) const {
  const double scale = 1.0 + spec_->coefficient_scale() + p.norm();
  if (seed_uv != nullptr) {
    const auto res = newton_rank1(*r1_, p, seed_uv[0], seed_uv[1], scale);
    if (!res.ok) {
      throw SingularityTooClose("line inversion lost the congruence branch near the point");
    }
    LineRef loc;
    loc.xi = r1_->xi.eval(res.u);
    loc.u = res.u;
    loc.v = res.v;
    loc.r = point_to_r(p, loc.xi);
    return loc;
  }

  std::vector<std::pair<double, double>> found;
  for (double su : {-2.0, -1.2, -0.6, 0.0, 0.6, 1.2, 2.0}) {
    for (double sv : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      const auto res = newton_rank1(*r1_, p, su, sv, scale);
      if (!res.ok) continue;
      bool dup = false;
      for (const auto& [u, v] : found) {
        if (std::abs(u - res.u) < 1e-7 * (1.0 + std::abs(u)) &&
            std::abs(v - res.v) < 1e-7 * (1.0 + std::abs(v))) {
          dup = true;
        }
      }
      if (!dup) found.emplace_back(res.u, res.v);
    }
  }
  if (found.empty()) {
    throw SingularityTooClose("no congruence line found through the point");
  }
  LineRef best;
  double best_r = -kInf;
  for (const auto& [u, v] : found) {
    const Complex xi = r1_->xi.eval(u);
    const double r = point_to_r(p, xi);
    if (r > best_r) {
      best_r = r;
      best = LineRef{xi, u, v, r};
    }
  }
  return best;
}

FlowField::LineRef FlowField::locate(const Point3& p) const {
  switch (kind_) {
    case Kind::rank2: return locate_rank2(p, nullptr);
    case Kind::rank1: return locate_rank1(p, nullptr);
    case Kind::rank0: {
      // eta = (u+iv)/2 matched against the pencil through p; exact.
      const Complex uv = 2.0 * pencil_eta(p, xi0_);
      return LineRef{xi0_, uv.real(), uv.imag(), point_to_r(p, xi0_)};
    }
    case Kind::sphere: {
      const Vec3 w = p - anchor_;
      return LineRef{Complex{}, 0.0, 0.0, w.norm()};
    }
    case Kind::cylinder: {
      const Vec3 w0 = p - anchor_;
      const Vec3 w = w0 - axis_ * w0.dot(axis_);
      return LineRef{Complex{}, 0.0, 0.0, w.norm()};
    }
    case Kind::plane: {
      const Vec3 w = p - anchor_;
      return LineRef{Complex{}, w.dot(e1_), w.dot(e2_), w.dot(axis_)};
    }
  }
  throw std::logic_error("FlowField: unknown kind");
}

FlowField::LineRef FlowField::locate(const Point3& p, const LineRef& near) const {
  switch (kind_) {
    case Kind::rank2: return locate_rank2(p, &near.xi);
    case Kind::rank1: {
      const double uv[2] = {near.u, near.v};
      return locate_rank1(p, uv);
    }
    default: return locate(p);
  }
}

// ---------------------------------------------------------------------------
// Evaluation

Vec3 FlowField::velocity_at(const LineRef& loc, double t, bool time_derivative) const {
  const double h_t = time_derivative ? Ht_.derivative(t) : Ht_.value(t);
  switch (kind_) {
    case Kind::rank2: {
      const SpinData s = spin_->at(loc.xi);
      const double x = loc.r + s.theta;
      const double q = x * x + s.lambda * s.lambda - std::norm(s.sigma);
      if (std::abs(q) < kFocalDenomTol) {
        throw FocalSingularity("rank-2 flow evaluated on the focal set");
      }
      const double hs = Hs_ ? Hs_(loc.xi) : 1.0;
      return direction_vector(loc.xi) * (hs * h_t / q);
    }
    case Kind::rank1: {
      const double b = beta_->at(loc.u, loc.v);
      const double y = loc.r + b;
      if (std::abs(y) < kFocalDenomTol) {
        throw FocalSingularity("rank-1 flow evaluated on the focal set");
      }
      const double hs = Hs_uv_ ? Hs_uv_(loc.u, loc.v) : 1.0;
      return direction_vector(loc.xi) * (hs * h_t / y);
    }
    case Kind::rank0: {
      const double k = time_derivative ? 0.0 : K_.eval(loc.u, loc.v).real();
      return direction_vector(xi0_) * (h_t + k);
    }
    default:
      throw std::logic_error("velocity_at: canonical kinds evaluate from the point");
  }
}

Vec3 FlowField::velocity_from_point(const Point3& p, double t, bool time_derivative,
                                    const LineRef* near) const {
  const double h_t = time_derivative ? Ht_.derivative(t) : Ht_.value(t);
  switch (kind_) {
    case Kind::sphere: {
      const Vec3 w = p - anchor_;
      const double r = w.norm();
      if (r < kSourceTol) throw SourceSingularity("sphere flow evaluated at its center");
      return w * (h_t / (r * r * r));
    }
    case Kind::cylinder: {
      const Vec3 w0 = p - anchor_;
      const Vec3 w = w0 - axis_ * w0.dot(axis_);
      const double r = w.norm();
      if (r < kSourceTol) throw SourceSingularity("cylinder flow evaluated on its axis");
      return w * (h_t / (r * r));
    }
    case Kind::plane: {
      if (time_derivative) return axis_ * h_t;
      const Vec3 w = p - anchor_;
      const double k = K_.eval(w.dot(e1_), w.dot(e2_)).real();
      return axis_ * (h_t + k);
    }
    default: {
      const LineRef loc = near ? locate(p, *near) : locate(p);
      return velocity_at(loc, t, time_derivative);
    }
  }
}

Vec3 FlowField::velocity(const Point3& p, double t) const {
  return velocity_from_point(p, t, false, nullptr);
}

Vec3 FlowField::velocity(const Point3& p, double t, const LineRef& near) const {
  return velocity_from_point(p, t, false, &near);
}

Vec3 FlowField::velocity_dt(const Point3& p, double t) const {
  return velocity_from_point(p, t, true, nullptr);
}

Vec3 FlowField::velocity_dt(const Point3& p, double t, const LineRef& near) const {
  return velocity_from_point(p, t, true, &near);
}

namespace {

// Candidate pressure for the rank-2 non-steady flow V = H(t)/Q d/dr,
// selected by the sign of lambda^2 - |sigma|^2.
double rank2_case_pressure(const SpinData& s, double h, double hdot, double p0, double r,
                           PressureForm form) {
  const double x = r + s.theta;
  const double ell = s.lambda * s.lambda - std::norm(s.sigma);
  switch (form) {
    case PressureForm::case_i: {
      if (ell <= kCaseTol) throw CaseMismatch("case_i requires lambda^2-|sigma|^2 > 0");
      const double q = x * x + ell;
      const double root = std::sqrt(ell);
      return p0 - h * h / (2.0 * q * q) - (hdot / root) * std::atan(x / root);
    }
    case PressureForm::case_ii: {
      if (std::abs(ell) > kCaseTol) throw CaseMismatch("case_ii requires lambda^2-|sigma|^2 = 0");
      if (std::abs(x) < kFocalDenomTol) throw FocalSingularity("case_ii pressure at focal radius");
      const double x2 = x * x;
      return p0 - h * h / (2.0 * x2 * x2) + hdot / x;
    }
    case PressureForm::case_iii: {
      if (ell >= -kCaseTol) throw CaseMismatch("case_iii requires lambda^2-|sigma|^2 < 0");
      const double root = std::sqrt(-ell);
      if (std::abs(x) <= root + kFocalDenomTol) {
        throw FocalSingularity("case_iii pressure between the focal radii");
      }
      const double q = x * x + ell;
      return p0 - h * h / (2.0 * q * q) - (hdot / (2.0 * root)) * std::log((x - root) / (x + root));
    }
    default:
      throw std::logic_error("rank2_case_pressure: not a case form");
  }
}

}  // namespace

double FlowField::pressure_at(const LineRef& loc, double t) const {
  const double h = Ht_.value(t);
  const double hdot = Ht_.derivative(t);
  switch (kind_) {
    case Kind::sphere: {
      const double r = loc.r;
      if (r < kSourceTol) throw SourceSingularity("sphere pressure at its center");
      const double r2 = r * r;
      return p0_ - h * h / (2.0 * r2 * r2) + hdot / r;
    }
    case Kind::cylinder: {
      const double r = loc.r;
      if (r < kSourceTol) throw SourceSingularity("cylinder pressure on its axis");
      return p0_ - h * h / (2.0 * r * r) - hdot * std::log(r);
    }
    case Kind::plane:
      return p0_ - hdot * loc.r;
    case Kind::rank2: {
      const SpinData s = spin_->at(loc.xi);
      if (form_ == PressureForm::steady) {
        const double x = loc.r + s.theta;
        const double q = x * x + s.lambda * s.lambda - std::norm(s.sigma);
        if (std::abs(q) < kFocalDenomTol) throw FocalSingularity("steady pressure at focal radius");
        const double hs = (Hs_ ? Hs_(loc.xi) : 1.0) * h;
        return p0_ - hs * hs / (2.0 * q * q);
      }
      return rank2_case_pressure(s, h, hdot, p0_, loc.r, form_);
    }
    case Kind::rank1: {
      const double y = loc.r + beta_->at(loc.u, loc.v);
      if (std::abs(y) < kFocalDenomTol) throw FocalSingularity("rank-1 pressure at focal radius");
      return p0_ - h * h / (2.0 * y * y) - hdot * std::log(std::abs(y));
    }
    case Kind::rank0:
      return p0_ - hdot * loc.r;
  }
  throw std::logic_error("FlowField: unknown kind");
}

double FlowField::pressure(const Point3& p, double t) const {
  if (form_ == PressureForm::none) {
    throw std::logic_error("FlowField: no pressure attached to this flow");
  }
  return pressure_at(locate(p), t);
}

double FlowField::pressure(const Point3& p, double t, const LineRef& near) const {
  if (form_ == PressureForm::none) {
    throw std::logic_error("FlowField: no pressure attached to this flow");
  }
  return pressure_at(locate(p, near), t);
}

double FlowField::singularity_clearance(const LineRef& loc) const {
  switch (kind_) {
    case Kind::sphere:
    case Kind::cylinder:
      return std::abs(loc.r);
    case Kind::plane:
    case Kind::rank0:
      return kInf;
    case Kind::rank2: {
      const SpinData s = spin_->at(loc.xi);
      const auto roots = focal_points(s);
      if (roots.empty()) return kInf;
      double d = kInf;
      for (const double r : roots) d = std::min(d, std::abs(loc.r - r));
      return d;
    }
    case Kind::rank1:
      return std::abs(loc.r + beta_->at(loc.u, loc.v));
  }
  return kInf;
}

double FlowField::singularity_clearance(const Point3& p) const {
  return singularity_clearance(locate(p));
}

// ---------------------------------------------------------------------------
// Builders

FlowField divfree_rank2(BiPoly F, SpatialField H) {
  FlowField f;
  f.kind_ = FlowField::Kind::rank2;
  f.form_ = PressureForm::none;
  f.spin_ = std::make_shared<SpinField>(F);
  f.Hs_ = std::move(H);
  return f;
}

FlowField divfree_rank2_steady(BiPoly F, SpatialField H, double p0) {
  FlowField f = divfree_rank2(std::move(F), std::move(H));
  f.form_ = PressureForm::steady;
  f.p0_ = p0;
  return f;
}

FlowField rank2_flow(BiPoly F, TimeSignal H, PressureForm form, double p0) {
  if (form != PressureForm::case_i && form != PressureForm::case_ii &&
      form != PressureForm::case_iii && form != PressureForm::steady &&
      form != PressureForm::none) {
    throw std::invalid_argument("rank2_flow: incompatible pressure form");
  }
  if (form == PressureForm::steady && !H.is_constant()) {
    throw std::invalid_argument("rank2_flow: the steady form requires constant H");
  }
  FlowField f;
  f.kind_ = FlowField::Kind::rank2;
  f.form_ = form;
  f.p0_ = p0;
  f.Ht_ = std::move(H);
  f.spin_ = std::make_shared<SpinField>(F);
  return f;
}

namespace {
std::shared_ptr<const Rank1Data> make_rank1_data(const CongruenceSpec& spec) {
  auto d = std::make_shared<Rank1Data>();
  d->xi = spec.xi_curve();
  d->dxi = d->xi.derivative();
  d->eta = spec.eta_sheet();
  d->eta_u = d->eta.d_u();
  d->eta_v = d->eta.d_v();
  return d;
}
}  // namespace

FlowField divfree_rank1(const CongruenceSpec& spec, SpatialFieldUV H) {
  if (spec.rank() != 1) throw std::invalid_argument("divfree_rank1: spec is not rank 1");
  FlowField f;
  f.kind_ = FlowField::Kind::rank1;
  f.form_ = PressureForm::none;
  f.spec_ = std::make_shared<CongruenceSpec>(spec);
  f.beta_ = std::make_shared<BetaField>(spec.xi_curve(), spec.eta_sheet());
  f.r1_ = make_rank1_data(spec);
  f.Hs_uv_ = std::move(H);
  return f;
}

FlowField rank1_flow(const CongruenceSpec& spec, TimeSignal H, double p0) {
  FlowField f = divfree_rank1(spec, nullptr);
  f.form_ = PressureForm::rank1;
  f.p0_ = p0;
  f.Ht_ = std::move(H);
  return f;
}

FlowField rank0_flow(Complex xi0, SheetPoly K, TimeSignal H, double p0) {
  if (!K.is_real_valued()) throw std::invalid_argument("rank0_flow: K must be real-valued");
  FlowField f;
  f.kind_ = FlowField::Kind::rank0;
  f.form_ = PressureForm::rank0;
  f.p0_ = p0;
  f.xi0_ = xi0;
  f.K_ = std::move(K);
  f.Ht_ = std::move(H);
  return f;
}

FlowField divfree_rank0(SheetPoly K, TimeSignal H) {
  FlowField f = rank0_flow(Complex{0.0, 0.0}, std::move(K), std::move(H), 0.0);
  f.form_ = PressureForm::none;
  return f;
}

FlowField canonical_sphere_flow(const Point3& center, TimeSignal H, double p0) {
  FlowField f;
  f.kind_ = FlowField::Kind::sphere;
  f.form_ = PressureForm::case_ii;
  f.p0_ = p0;
  f.anchor_ = center;
  f.Ht_ = std::move(H);
  return f;
}

FlowField canonical_cylinder_flow(const Point3& axis_point, const Vec3& axis_direction,
                                  TimeSignal H, double p0) {
  if (axis_direction.norm() < 1e-12) {
    throw std::invalid_argument("canonical_cylinder_flow: zero axis direction");
  }
  FlowField f;
  f.kind_ = FlowField::Kind::cylinder;
  f.form_ = PressureForm::rank1;
  f.p0_ = p0;
  f.anchor_ = axis_point;
  f.axis_ = axis_direction.normalized();
  f.Ht_ = std::move(H);
  return f;
}

FlowField canonical_plane_flow(const Point3& plane_point, const Vec3& normal, TimeSignal H,
                               SheetPoly K, double p0) {
  if (normal.norm() < 1e-12) throw std::invalid_argument("canonical_plane_flow: zero normal");
  if (!K.is_real_valued()) throw std::invalid_argument("canonical_plane_flow: K must be real");
  FlowField f;
  f.kind_ = FlowField::Kind::plane;
  f.form_ = PressureForm::rank0;
  f.p0_ = p0;
  f.anchor_ = plane_point;
  f.axis_ = normal.normalized();
  // In-plane orthonormal basis for the K profile.
  const Vec3 probe = std::abs(f.axis_.x1) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  f.e1_ = f.axis_.cross(probe).normalized();
  f.e2_ = f.axis_.cross(f.e1_);
  f.K_ = std::move(K);
  f.Ht_ = std::move(H);
  return f;
}

// ---------------------------------------------------------------------------
// Candidate pressures in congruence coordinates

double candidate_pressure_rank2(const BiPoly& F, const TimeSignal& H, double p0, Complex xi,
                                double r, double t, std::optional<PressureForm> forced) {
  const SpinData s = spin_coefficients(F, xi);
  const double ell = s.lambda * s.lambda - std::norm(s.sigma);
  PressureForm form;
  if (std::abs(ell) <= kCaseTol) {
    form = PressureForm::case_ii;
  } else {
    form = ell > 0.0 ? PressureForm::case_i : PressureForm::case_iii;
  }
  if (forced.has_value() && *forced != form) {
    throw CaseMismatch("forced pressure case is inconsistent with sign(lambda^2-|sigma|^2)");
  }
  return rank2_case_pressure(s, H.value(t), H.derivative(t), p0, r, form);
}

double candidate_pressure_rank1(const CongruenceSpec& spec, const TimeSignal& H, double p0,
                                double u, double v, double r, double t) {
  const double b = beta(spec, u, v);
  const double y = r + b;
  if (std::abs(y) < kFocalDenomTol) {
    throw FocalSingularity("rank-1 candidate pressure at focal radius");
  }
  const double h = H.value(t);
  return p0 - h * h / (2.0 * y * y) - H.derivative(t) * std::log(std::abs(y));
}

}  // namespace congflow
