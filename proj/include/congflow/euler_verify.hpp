#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "congflow/congruence.hpp"
#include "congflow/flows.hpp"

namespace congflow {

struct FDConfig {
  enum class Scheme { central2, central4 };

  double step = 1e-5;
  Scheme scheme = Scheme::central2;
  double time_step = 1e-5;

  void validate() const;
};

struct ResidualSample {
  Point3 point;
  double t = 0.0;
  Vec3 momentum;
  double momentum_norm = 0.0;
  double divergence = 0.0;
};

// Accumulated residual diagnostics over a sample sweep.  merge() is
// associative and commutative up to sample order; finalize() sorts samples
// into the deterministic sweep order.
struct ResidualReport {
  double sup_momentum = 0.0;
  double sup_divergence = 0.0;
  std::vector<std::pair<std::size_t, ResidualSample>> samples;

  void add(std::size_t index, const ResidualSample& s);
  void merge(const ResidualReport& other);
  std::vector<ResidualSample> finalize() const;
};

// Finite-difference divergence of the velocity in Euclidean coordinates.
double euclidean_divergence(const FlowField& flow, const Point3& p, double t, const FDConfig& cfg);

// dV/dt + (V.grad)V + grad p, the momentum-equation residual.  The time
// derivative is analytic (TimeSignal); space derivatives are central
// finite differences seeded from the congruence line through p.
Vec3 euler_residual(const FlowField& flow, const Point3& p, double t, const FDConfig& cfg);

// Exact-derivative chart maps (c1,c2,r) -> R^3 for a congruence, reused by
// the metric, the Levi-Civita symbols and the coordinate-frame divergence.
class ChartMap {
 public:
  explicit ChartMap(const CongruenceSpec& spec);

  Point3 position(double c1, double c2, double r) const;
  // Columns are the partial derivatives by (c1, c2, r); entries are exact
  // polynomial/rational evaluations.
  Eigen::Matrix3d jacobian(double c1, double c2, double r) const;
  Eigen::Matrix3d metric(double c1, double c2, double r) const;

  const CongruenceSpec& spec() const { return spec_; }

 private:
  CongruenceSpec spec_;
  // rank 2
  std::array<ChartRational, 4> z2_;   // Z0, Z1, T0, T1
  std::array<ChartRational, 8> dz2_;  // d_xi and d_xibar of each
  // rank 1
  std::array<RationalUV, 4> z1_;
  std::array<RationalUV, 8> dz1_;
  // rank 0
  Eigen::Matrix3d j0_;
};

// Pullback of the flat metric to congruence coordinates.
Eigen::Matrix3d pullback_metric(const CongruenceSpec& spec, double c1, double c2, double r);

// Levi-Civita symbols Gamma[k](i,j) from finite differences of the pullback
// metric.  Throws DegenerateJacobian at (numerically) focal radii.
using ChristoffelSymbols = std::array<Eigen::Matrix3d, 3>;
ChristoffelSymbols christoffels(const CongruenceSpec& spec, double c1, double c2, double r,
                                const FDConfig& cfg);

// Divergence of a vector field given by its components in congruence
// coordinates: dV^k/dx^k + Gamma^k_{kl} V^l.
using ChartVectorField = std::function<Vec3(double, double, double)>;
double covariant_divergence(const CongruenceSpec& spec, const ChartVectorField& components,
                            double c1, double c2, double r, const FDConfig& cfg);

// Fixed-step 4th-order integration of dx/ds = V/|V| at frozen t.
std::vector<Point3> trace_streamline(const FlowField& flow, const Point3& start, double t,
                                     double arclength, int steps);

}  // namespace congflow
