#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "congflow/errors.hpp"
#include "congflow/euler_verify.hpp"
#include "test_support.hpp"

using namespace congflow;
using test_support::random_bipoly;

namespace {

const TimeSignal kUnit = TimeSignal::constant(1.0);
const TimeSignal kWobble{1.0, {}, {{0.5, 1.0, 0.0}}};  // 1 + sin(t)/2

CongruenceSpec canonical_cylinder() {
  return CongruenceSpec::rank1(CurvePoly::monomial(1, 1.0), SheetPoly::monomial(0, 1, {0.0, 1.0}));
}

}  // namespace

TEST_CASE("euclidean_divergence") {
  const FDConfig cfg;
  SUBCASE("point-source flow is divergence free") {
    const FlowField f = canonical_sphere_flow({0, 0, 0}, kUnit, 0.0);
    CHECK(std::abs(euclidean_divergence(f, {0, 0, 2}, 0.0, cfg)) < 1e-6);
  }
  SUBCASE("constant field") {
    const FlowField f = canonical_plane_flow({0, 0, 0}, {0, 0, 1}, TimeSignal::constant(0.7),
                                             SheetPoly{}, 0.0);
    CHECK(std::abs(euclidean_divergence(f, {1, 2, 3}, 0.0, cfg)) < 1e-10);
  }
  SUBCASE("fourth-order scheme") {
    const FDConfig c4{1e-4, FDConfig::Scheme::central4, 1e-5};
    const FlowField f = canonical_sphere_flow({0, 0, 0}, kUnit, 0.0);
    CHECK(std::abs(euclidean_divergence(f, {1.2, 0.3, 1.7}, 0.0, c4)) < 1e-8);
  }
  SUBCASE("stencil near the singularity is refused") {
    const FlowField f = canonical_sphere_flow({0, 0, 0}, kUnit, 0.0);
    FDConfig wide;
    wide.step = 1e-2;
    CHECK_THROWS_AS((void)euclidean_divergence(f, {0.05, 0, 0}, 0.0, wide), SingularityTooClose);
  }
}

TEST_CASE("divergence of a non-tangent linear test field") {
  // The FD operator itself, checked without a FlowField: build V = p via a
  // a plane flow with profile K(u,v) = u? that stays tangent; instead verify
  // the operator through the covariant route on the rank-0 chart where the
  // Euclidean and chart divergences coincide.
  const FDConfig cfg;
  const CongruenceSpec flat = CongruenceSpec::rank0({0, 0});
  const auto field = [](double u, double v, double r) { return Vec3{u, v, r}; };
  CHECK(covariant_divergence(flat, field, 0.4, -0.2, 0.9, cfg) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("euler_residual") {
  const FDConfig cfg;
  SUBCASE("canonical sphere solves the momentum equation") {
    const FlowField f = canonical_sphere_flow({0, 0, 0}, kUnit, 0.0);
    CHECK(euler_residual(f, {0, 0, 2}, 0.0, cfg).norm() < 1e-6);
  }
  SUBCASE("hydrostatic rest state is exact") {
    const FlowField f = canonical_sphere_flow({0, 0, 0}, TimeSignal::constant(0.0), 0.8);
    const Vec3 r = euler_residual(f, {1, 1, 1}, 0.0, cfg);
    CHECK(r.norm() < 1e-12);
  }
  SUBCASE("dropping the pressure leaves the advective term 2 H^2 / r^5") {
    // velocity of the point source with p = const: residual = (V.grad)V
    const FlowField f = divfree_rank2_steady(BiPoly{}, [](Complex) { return 1.0; }, 0.0);
    // steady pressure of the sphere flow cancels it; compare against the
    // canonical value at r=2 by removing grad p: |(V.grad)V| = 2/32 = 0.0625
    const Point3 p{0, 0, 2};
    const Vec3 v = f.velocity(p, 0.0);
    const double h = cfg.step;
    Vec3 conv;
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 e;
      (axis == 0 ? e.x1 : axis == 1 ? e.x2 : e.x3) = h;
      const Vec3 dv = (f.velocity(p + e, 0.0) - f.velocity(p - e, 0.0)) / (2.0 * h);
      conv = conv + dv * (axis == 0 ? v.x1 : axis == 1 ? v.x2 : v.x3);
    }
    CHECK(conv.norm() == doctest::Approx(0.0625).epsilon(1e-5));
  }
}

TEST_CASE("time-dependent canonical flows still solve the equations") {
  const FDConfig cfg;
  const FlowField sph = canonical_sphere_flow({0, 0, 0}, kWobble, 0.0);
  const FlowField cyl = canonical_cylinder_flow({0, 0, 0}, {0, 1, 0}, kWobble, 0.0);
  const FlowField pl = canonical_plane_flow({0, 0, 0}, {0, 0, 1}, kWobble,
                                            SheetPoly::monomial(1, 0, 0.1), 0.0);
  for (double t : {0.0, 0.7, 1.4}) {
    CHECK(euler_residual(sph, {1.2, 1.1, 1.3}, t, cfg).norm() < 1e-6);
    CHECK(euler_residual(cyl, {1.5, 0.2, 0.8}, t, cfg).norm() < 1e-6);
    CHECK(euler_residual(pl, {0.5, -0.7, 1.5}, t, cfg).norm() < 1e-6);
  }
}

TEST_CASE("pullback_metric") {
  SUBCASE("the rank-0 chart is Euclidean") {
    const Eigen::Matrix3d g = pullback_metric(CongruenceSpec::rank0({0, 0}), 0.3, -0.8, 2.0);
    CHECK((g - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  }
  SUBCASE("r is arclength") {
    const Eigen::Matrix3d g = pullback_metric(CongruenceSpec::rank2(BiPoly{}), 0.0, 0.0, 1.0);
    CHECK(g(2, 2) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("focal degeneracy of the pencil of the origin") {
    const CongruenceSpec spec = CongruenceSpec::rank2(BiPoly{});
    CHECK(std::abs(pullback_metric(spec, 0.0, 0.0, 1e-9).determinant()) < 1e-20);
    CHECK(std::abs(pullback_metric(spec, 0.0, 0.0, 0.5).determinant()) > 1e-4);
  }
}

TEST_CASE("christoffels") {
  const FDConfig cfg;
  SUBCASE("flat chart has vanishing symbols") {
    const auto g = christoffels(CongruenceSpec::rank0({0, 0}), 0.1, 0.2, 0.3, cfg);
    for (const auto& m : g) CHECK(m.cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("symmetry in the lower indices") {
    std::mt19937_64 rng(21);
    const CongruenceSpec spec = CongruenceSpec::rank2(random_bipoly(rng, 3, 0.5));
    const auto g = christoffels(spec, 0.2, -0.1, 3.0, cfg);
    for (const auto& m : g) CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-7);
  }
  SUBCASE("spherical-type chart against the flat-connection transform") {
    // oracle: Gamma^k_ij = (J^{-1})^k_m d^2 Phi^m / dy^i dy^j, with the
    // Hessian taken by central differences of the exact chart map.
    const CongruenceSpec spec = CongruenceSpec::rank2(BiPoly{});
    const ChartMap map(spec);
    const double y0[3] = {0.0, 0.0, 2.0};
    const auto gamma = christoffels(spec, y0[0], y0[1], y0[2], cfg);

    const double h = 1e-4;
    auto pos = [&](double a, double b, double r) { return map.position(a, b, r); };
    auto hess = [&](int i, int j) {
      double y_pp[3] = {y0[0], y0[1], y0[2]}, y_pm[3] = {y0[0], y0[1], y0[2]};
      double y_mp[3] = {y0[0], y0[1], y0[2]}, y_mm[3] = {y0[0], y0[1], y0[2]};
      y_pp[i] += h; y_pp[j] += h;
      y_pm[i] += h; y_pm[j] -= h;
      y_mp[i] -= h; y_mp[j] += h;
      y_mm[i] -= h; y_mm[j] -= h;
      const Vec3 s = (pos(y_pp[0], y_pp[1], y_pp[2]) - pos(y_pm[0], y_pm[1], y_pm[2])) -
                     (pos(y_mp[0], y_mp[1], y_mp[2]) - pos(y_mm[0], y_mm[1], y_mm[2]));
      return s / (4.0 * h * h);
    };
    const Eigen::Matrix3d Jinv = map.jacobian(y0[0], y0[1], y0[2]).inverse();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Vec3 H = hess(i, j);
        const Eigen::Vector3d Hv(H.x1, H.x2, H.x3);
        const Eigen::Vector3d expect = Jinv * Hv;
        for (int k = 0; k < 3; ++k) {
          CHECK(gamma[k](i, j) == doctest::Approx(expect(k)).epsilon(1e-4).scale(1.0));
        }
      }
    }
    // hand values for the spherical-type chart at xi=0, r=2
    CHECK(gamma[2](0, 0) == doctest::Approx(-8.0).epsilon(1e-6));
    CHECK(gamma[0](0, 2) == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("focal radius refuses to invert") {
    CHECK_THROWS_AS((void)christoffels(CongruenceSpec::rank2(BiPoly{}), 0.0, 0.0, 0.0, cfg),
                    DegenerateJacobian);
  }
}

TEST_CASE("covariant_divergence") {
  const FDConfig cfg;
  SUBCASE("the rank-2 tangent family is divergence free") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
      const BiPoly F = random_bipoly(rng, 3, 0.8);
      const CongruenceSpec spec = CongruenceSpec::rank2(F);
      const SpinField spin(F);
      const auto field = [&](double a, double b, double r) {
        const SpinData s = spin.at({a, b});
        const double q = (r + s.theta) * (r + s.theta) + s.lambda * s.lambda - std::norm(s.sigma);
        const double hs = 1.0 + 0.4 * a - 0.3 * b;
        return Vec3{0.0, 0.0, hs / q};
      };
      const double a = 0.5 * U(rng), b = 0.5 * U(rng);
      double r = 3.0 + U(rng);
      const auto roots = focal_points(spin.at({a, b}));
      bool clear = true;
      for (const double root : roots) clear = clear && std::abs(r - root) > 0.5;
      if (!clear) continue;
      CHECK(std::abs(covariant_divergence(spec, field, a, b, r, cfg)) < 1e-5);
    }
  }
  SUBCASE("the rank-1 tangent family is divergence free") {
    const CongruenceSpec cyl = canonical_cylinder();
    const BetaField bf(cyl.xi_curve(), cyl.eta_sheet());
    const auto field = [&](double u, double v, double r) {
      const double hs = 1.0 + 0.3 * u - 0.1 * v;
      return Vec3{0.0, 0.0, hs / (r + bf.at(u, v))};
    };
    CHECK(std::abs(covariant_divergence(cyl, field, 0.3, -0.6, 2.0, cfg)) < 1e-5);
    CHECK(std::abs(covariant_divergence(cyl, field, -0.9, 0.4, 3.1, cfg)) < 1e-5);
  }
  SUBCASE("unit radial field on the pencil of the origin diverges as 2/r") {
    const CongruenceSpec spec = CongruenceSpec::rank2(BiPoly{});
    const auto unit = [](double, double, double) { return Vec3{0, 0, 1}; };
    CHECK(covariant_divergence(spec, unit, 0.0, 0.0, 2.0, cfg) == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("coordinate independence of the divergence") {
  // chart-frame divergence equals the Euclidean divergence at the image point
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const FDConfig cfg;
  int tested = 0;
  for (int trial = 0; trial < 20 && tested < 6; ++trial) {
    const BiPoly F = random_bipoly(rng, 3, 0.6);
    const CongruenceSpec spec = CongruenceSpec::rank2(F);
    const SpinField spin(F);
    const double a = 0.4 * U(rng), b = 0.4 * U(rng);
    const double r = 3.5 + U(rng);
    const auto roots = focal_points(spin.at({a, b}));
    bool clear = true;
    for (const double root : roots) clear = clear && std::abs(r - root) > 1.0;
    if (!clear) continue;

    // V^r = 1 + 0.3 r in chart components
    const auto chart_field = [](double, double, double rr) { return Vec3{0, 0, 1.0 + 0.3 * rr}; };
    const double div_chart = covariant_divergence(spec, chart_field, a, b, r, cfg);

    // same Euclidean field: V = (1 + 0.3 r) * direction(xi(p)), with the
    // line through p resolved by the flow's seeded inversion
    const FlowField flow = divfree_rank2(F, [](Complex) { return 1.0; });
    const Point3 p = line_to_point(spec.line_at(Complex{a, b}), r);
    double div_eucl = 0.0;
    const double h = cfg.step;
    const auto base = flow.locate(p);
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 e;
      (axis == 0 ? e.x1 : axis == 1 ? e.x2 : e.x3) = h;
      auto radial_vel = [&](const Point3& q) {
        const auto loc = flow.locate(q, base);
        return direction_vector(loc.xi) * (1.0 + 0.3 * loc.r);
      };
      const Vec3 dv = (radial_vel(p + e) - radial_vel(p - e)) / (2.0 * h);
      div_eucl += axis == 0 ? dv.x1 : axis == 1 ? dv.x2 : dv.x3;
    }
    CHECK(std::abs(div_chart - div_eucl) < 1e-5);
    ++tested;
  }
  CHECK(tested >= 3);
}

TEST_CASE("trace_streamline") {
  SUBCASE("radial trace from (0,0,2) reaches (0,0,3)") {
    const FlowField f = canonical_sphere_flow({0, 0, 0}, kUnit, 0.0);
    const auto line = trace_streamline(f, {0, 0, 2}, 0.0, 1.0, 128);
    CHECK((line.back() - Point3{0, 0, 3}).norm() < 1e-8);
  }
  SUBCASE("plane flow runs along x3") {
    const FlowField f = canonical_plane_flow({0, 0, 0}, {0, 0, 1}, kUnit, SheetPoly{}, 0.0);
    const auto line = trace_streamline(f, {0.4, -0.2, 1.0}, 0.0, 2.0, 64);
    CHECK((line.back() - Point3{0.4, -0.2, 3.0}).norm() < 1e-10);
  }
  SUBCASE("cylinder trace from (1,0,0) reaches (2,0,0)") {
    const FlowField f = canonical_cylinder_flow({0, 0, 0}, {0, 1, 0}, kUnit, 0.0);
    const auto line = trace_streamline(f, {1, 0, 0}, 0.0, 1.0, 128);
    CHECK((line.back() - Point3{2, 0, 0}).norm() < 1e-8);
  }
  SUBCASE("straightness: point-to-chord stays below 1e-7 of the arclength") {
    const FlowField f = canonical_sphere_flow({0.5, -0.5, 0}, kWobble, 0.0);
    const auto line = trace_streamline(f, {1.5, 0.7, 1.1}, 0.7, 2.0, 256);
    const Point3 a = line.front();
    const Vec3 dir = (line.back() - a).normalized();
    double worst = 0.0;
    for (const Point3& p : line) {
      const Vec3 w = p - a;
      worst = std::max(worst, (w - dir * w.dot(dir)).norm());
    }
    CHECK(worst < 1e-7 * 2.0);
  }
  SUBCASE("zero length gives a single point") {
    const FlowField f = canonical_sphere_flow({0, 0, 0}, kUnit, 0.0);
    CHECK(trace_streamline(f, {0, 0, 2}, 0.0, 0.0, 16).size() == 1);
  }
  SUBCASE("tracing into the source fails") {
    const FlowField f = canonical_sphere_flow({0, 0, 0}, TimeSignal::constant(-1.0), 0.0);
    CHECK_THROWS_AS((void)trace_streamline(f, {0, 0, 0.5}, 0.0, 1.0, 64), SingularityTooClose);
  }
}

TEST_CASE("report merge is order independent") {
  ResidualReport a, b, c;
  auto sample = [](double m, double d) {
    ResidualSample s;
    s.momentum = Vec3{m, 0, 0};
    s.momentum_norm = m;
    s.divergence = d;
    return s;
  };
  a.add(0, sample(0.1, 0.01));
  b.add(1, sample(0.5, 0.002));
  c.add(2, sample(0.3, 0.04));

  ResidualReport ab = a;
  ab.merge(b);
  ab.merge(c);
  ResidualReport cb = c;
  cb.merge(b);
  cb.merge(a);
  CHECK(ab.sup_momentum == cb.sup_momentum);
  CHECK(ab.sup_divergence == cb.sup_divergence);
  const auto left = ab.finalize();
  const auto right = cb.finalize();
  REQUIRE(left.size() == right.size());
  for (std::size_t i = 0; i < left.size(); ++i) {
    CHECK(left[i].momentum_norm == right[i].momentum_norm);
  }
}

TEST_CASE("FDConfig validation") {
  FDConfig bad;
  bad.step = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.step = 1e-10;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
