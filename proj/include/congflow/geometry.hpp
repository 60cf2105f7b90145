#pragma once

#include <cmath>
#include <complex>

namespace congflow {

using Complex = std::complex<double>;

struct Vec3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x1 + o.x1, x2 + o.x2, x3 + o.x3}; }
  Vec3 operator-(const Vec3& o) const { return {x1 - o.x1, x2 - o.x2, x3 - o.x3}; }
  Vec3 operator*(double s) const { return {x1 * s, x2 * s, x3 * s}; }
  Vec3 operator/(double s) const { return {x1 / s, x2 / s, x3 / s}; }
  Vec3 operator-() const { return {-x1, -x2, -x3}; }

  double dot(const Vec3& o) const { return x1 * o.x1 + x2 * o.x2 + x3 * o.x3; }
  Vec3 cross(const Vec3& o) const {
    return {x2 * o.x3 - x3 * o.x2, x3 * o.x1 - x1 * o.x3, x1 * o.x2 - x2 * o.x1};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const { return *this / norm(); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Points of R^3 and free vectors share the representation.
using Point3 = Vec3;

bool is_finite(const Vec3& v);
bool is_finite(Complex z);

// An oriented line in the stereographic chart on line space: xi is the
// direction (projection from the north pole), eta the fibre coordinate.
// Directions at the south pole have no finite xi and are unrepresentable.
struct OrientedLine {
  Complex xi;
  Complex eta;

  OrientedLine(Complex xi_, Complex eta_);
};

// Unit direction of the line with stereographic coordinate xi:
// ( 2 Re xi, 2 Im xi, 1-|xi|^2 ) / (1+|xi|^2).
Vec3 direction_vector(Complex xi);

// The point on the line at oriented arclength r from the point of the line
// closest to the origin.
Point3 line_to_point(const OrientedLine& line, double r);

// Oriented distance from the foot point (closest point to the origin) of the
// line with direction xi through p, to p itself.
double point_to_r(const Point3& p, Complex xi);

// The oriented line through p with direction xi.
OrientedLine line_through(const Point3& p, Complex xi);

// Inverse stereographic chart; throws std::domain_error for directions within
// 1e-12 of the south pole.
Complex xi_from_direction(const Vec3& d);

// Rotation about the x3-axis by angle alpha.
Vec3 rotate_about_x3(const Vec3& v, double alpha);

}  // namespace congflow
