#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "congflow/congruence.hpp"
#include "congflow/geometry.hpp"
#include "congflow/time_signal.hpp"

namespace congflow {

enum class PressureForm { none, steady, case_i, case_ii, case_iii, rank1, rank0 };

std::string to_string(PressureForm form);

struct Rank1Data;

// Scalar amplitude over the direction chart / the (u,v) chart.
using SpatialField = std::function<double(Complex)>;
using SpatialFieldUV = std::function<double(double, double)>;

// A velocity field tangent to a fixed line congruence, with an optional
// closed-form pressure.  Values are immutable after construction and all
// evaluators are const and reentrant.
class FlowField {
 public:
  // Resolved congruence line through a point: chart coordinates plus the
  // arclength r of the point along the line.  Used to seed evaluations so
  // that finite-difference stencils stay on one branch of the congruence.
  struct LineRef {
    Complex xi;      // rank 2
    double u = 0.0;  // rank 1 / rank 0
    double v = 0.0;
    double r = 0.0;
  };

  LineRef locate(const Point3& p) const;
  LineRef locate(const Point3& p, const LineRef& near) const;

  Vec3 velocity(const Point3& p, double t) const;
  Vec3 velocity(const Point3& p, double t, const LineRef& near) const;
  // Analytic time derivative of the velocity.
  Vec3 velocity_dt(const Point3& p, double t) const;
  Vec3 velocity_dt(const Point3& p, double t, const LineRef& near) const;
  double pressure(const Point3& p, double t) const;
  double pressure(const Point3& p, double t, const LineRef& near) const;

  // Conservative distance from the resolved line position to the nearest
  // flow singularity along the line (+inf when the flow has none).
  double singularity_clearance(const LineRef& loc) const;
  double singularity_clearance(const Point3& p) const;

  PressureForm pressure_form() const { return form_; }
  int congruence_rank() const;
  double p0() const { return p0_; }
  const TimeSignal& time_signal() const { return Ht_; }

  // Builders ----------------------------------------------------------------
  friend FlowField divfree_rank2(BiPoly F, SpatialField H);
  friend FlowField divfree_rank2_steady(BiPoly F, SpatialField H, double p0);
  friend FlowField rank2_flow(BiPoly F, TimeSignal H, PressureForm form, double p0);
  friend FlowField divfree_rank1(const CongruenceSpec& spec, SpatialFieldUV H);
  friend FlowField rank1_flow(const CongruenceSpec& spec, TimeSignal H, double p0);
  friend FlowField divfree_rank0(SheetPoly K, TimeSignal H);
  friend FlowField rank0_flow(Complex xi0, SheetPoly K, TimeSignal H, double p0);
  friend FlowField canonical_sphere_flow(const Point3& center, TimeSignal H, double p0);
  friend FlowField canonical_cylinder_flow(const Point3& axis_point, const Vec3& axis_direction,
                                           TimeSignal H, double p0);
  friend FlowField canonical_plane_flow(const Point3& plane_point, const Vec3& normal, TimeSignal H,
                                        SheetPoly K, double p0);

 private:
  enum class Kind { rank2, rank1, rank0, sphere, cylinder, plane };

  FlowField() = default;

  Vec3 velocity_at(const LineRef& loc, double t, bool time_derivative) const;
  Vec3 velocity_from_point(const Point3& p, double t, bool time_derivative,
                           const LineRef* near) const;
  double pressure_at(const LineRef& loc, double t) const;
  LineRef locate_rank2(const Point3& p, const Complex* seed) const;
  LineRef locate_rank1(const Point3& p, const double* seed_uv) const;

  Kind kind_ = Kind::rank2;
  PressureForm form_ = PressureForm::none;
  double p0_ = 0.0;
  TimeSignal Ht_ = TimeSignal::constant(1.0);

  // generic congruence payload
  std::shared_ptr<const SpinField> spin_;       // rank 2
  std::shared_ptr<const CongruenceSpec> spec_;  // rank 1
  std::shared_ptr<const BetaField> beta_;       // rank 1
  std::shared_ptr<const Rank1Data> r1_;         // rank 1
  SpatialField Hs_;
  SpatialFieldUV Hs_uv_;
  SheetPoly K_;
  Complex xi0_;

  // canonical payload
  Point3 anchor_;  // sphere center / axis point / plane point
  Vec3 axis_;      // cylinder axis direction / plane normal (unit)
  Vec3 e1_, e2_;   // in-plane orthonormal basis (plane flow)
};

// Divergence-free tangent fields (velocity only).
FlowField divfree_rank2(BiPoly F, SpatialField H);
FlowField divfree_rank1(const CongruenceSpec& spec, SpatialFieldUV H);
FlowField divfree_rank0(SheetPoly K, TimeSignal H);

// Steady rank-2 flow with the integrated radial pressure
// p = p0 - H(xi)^2 / (2 ((r+theta)^2 + lambda^2 - |sigma|^2)^2).
FlowField divfree_rank2_steady(BiPoly F, SpatialField H, double p0);

// Non-steady congruence flows V = H(t)/Q d/dr with the case-selected
// candidate pressure (form must be case_i, case_ii or case_iii).
FlowField rank2_flow(BiPoly F, TimeSignal H, PressureForm form, double p0);
FlowField rank1_flow(const CongruenceSpec& spec, TimeSignal H, double p0);
FlowField rank0_flow(Complex xi0, SheetPoly K, TimeSignal H, double p0);

// Canonical solutions.
FlowField canonical_sphere_flow(const Point3& center, TimeSignal H, double p0);
FlowField canonical_cylinder_flow(const Point3& axis_point, const Vec3& axis_direction,
                                  TimeSignal H, double p0);
FlowField canonical_plane_flow(const Point3& plane_point, const Vec3& normal, TimeSignal H,
                               SheetPoly K, double p0);

// Closed-form candidate pressures in congruence coordinates.  The case is
// inferred from sign(lambda^2-|sigma|^2) at xi (tolerance 1e-10); passing a
// forced case inconsistent with that sign throws CaseMismatch.
double candidate_pressure_rank2(const BiPoly& F, const TimeSignal& H, double p0, Complex xi,
                                double r, double t,
                                std::optional<PressureForm> forced = std::nullopt);
double candidate_pressure_rank1(const CongruenceSpec& spec, const TimeSignal& H, double p0,
                                double u, double v, double r, double t);

}  // namespace congflow
