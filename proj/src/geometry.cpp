#include "congflow/geometry.hpp"

#include <stdexcept>

namespace congflow {

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x1) && std::isfinite(v.x2) && std::isfinite(v.x3);
}

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

OrientedLine::OrientedLine(Complex xi_, Complex eta_) : xi(xi_), eta(eta_) {
  if (!is_finite(xi) || !is_finite(eta)) {
    throw std::invalid_argument("OrientedLine: non-finite coordinates");
  }
}

Vec3 direction_vector(Complex xi) {
  const double s = std::norm(xi);
  const double d = 1.0 + s;
  return {2.0 * xi.real() / d, 2.0 * xi.imag() / d, (1.0 - s) / d};
}

Point3 line_to_point(const OrientedLine& line, double r) {
  const Complex xi = line.xi;
  const Complex eta = line.eta;
  const double s = std::norm(xi);
  const double d = 1.0 + s;
  const Complex z = 2.0 * (eta - xi * xi * std::conj(eta)) / (d * d) + 2.0 * xi * r / d;
  const double x3 = -2.0 * std::real(xi * std::conj(eta) + std::conj(xi) * eta) / (d * d) +
                    (1.0 - s) * r / d;
  return {z.real(), z.imag(), x3};
}

double point_to_r(const Point3& p, Complex xi) {
  const Complex z{p.x1, p.x2};
  const double s = std::norm(xi);
  return (2.0 * std::real(z * std::conj(xi)) + p.x3 * (1.0 - s)) / (1.0 + s);
}

OrientedLine line_through(const Point3& p, Complex xi) {
  if (!is_finite(p)) throw std::invalid_argument("line_through: non-finite point");
  const Complex z{p.x1, p.x2};
  const Complex eta = 0.5 * (z - 2.0 * p.x3 * xi - std::conj(z) * xi * xi);
  return OrientedLine(xi, eta);
}

Complex xi_from_direction(const Vec3& d) {
  const Vec3 n = d.normalized();
  if (1.0 + n.x3 < 1e-12) {
    throw std::domain_error("xi_from_direction: direction at the south pole is outside the chart");
  }
  return Complex{n.x1, n.x2} / (1.0 + n.x3);
}

Vec3 rotate_about_x3(const Vec3& v, double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return {c * v.x1 - s * v.x2, s * v.x1 + c * v.x2, v.x3};
}

}  // namespace congflow
