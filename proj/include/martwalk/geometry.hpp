#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace martwalk {

using Vector = Eigen::VectorXd;
using Vector2 = Eigen::Vector2d;

inline constexpr double kUnitTol = 1e-12;

// Ordered orthonormal basis of a two-dimensional subspace of R^d.
struct Plane2 {
  Vector u1;
  Vector u2;

  static Plane2 make(Vector a, Vector b) {
    if (a.size() != b.size())
      throw std::invalid_argument("Plane2: basis dimension mismatch");
    if (std::abs(a.norm() - 1.0) > kUnitTol ||
        std::abs(b.norm() - 1.0) > kUnitTol)
      throw std::invalid_argument("Plane2: basis vectors must be unit");
    if (std::abs(a.dot(b)) > kUnitTol)
      throw std::invalid_argument("Plane2: basis vectors must be orthogonal");
    return Plane2{std::move(a), std::move(b)};
  }

  // span(e1, e2) in R^d.
  static Plane2 coordinate(int d) {
    Vector a = Vector::Zero(d), b = Vector::Zero(d);
    a[0] = 1.0;
    b[1] = 1.0;
    return Plane2{std::move(a), std::move(b)};
  }

  int ambient_dim() const { return static_cast<int>(u1.size()); }
};

// Directed cone: x belongs when its projection on the plane is zero or
// makes angle at most arccos(u) with the axis direction inside the plane.
struct Cone {
  double u;       // in [-1, 1]; strongly directed walks use u > 0, the
                  // complementary cone H^{-u}_{-ell} needs the negative range
  Vector ell;     // unit, lies in the plane
  Plane2 plane;

  static Cone make(double u, Vector ell, Plane2 plane) {
    if (!(u >= -1.0 && u <= 1.0))
      throw std::invalid_argument("Cone: u must be in [-1,1]");
    if (std::abs(ell.norm() - 1.0) > kUnitTol)
      throw std::invalid_argument("Cone: axis must be unit");
    const Vector p = (ell.dot(plane.u1)) * plane.u1 + (ell.dot(plane.u2)) * plane.u2;
    if ((p - ell).norm() > kUnitTol)
      throw std::invalid_argument("Cone: axis must lie in the plane");
    return Cone{u, std::move(ell), std::move(plane)};
  }
};

// Open rectangle in R^2: |(y-x).v_perp| < a*lambda, (y-x).v in (-b*lambda, c*lambda).
struct Rectangle {
  Vector2 anchor;
  Vector2 v;  // unit
  double a, b, c;
  double lambda;

  static Rectangle make(Vector2 anchor, Vector2 v, double a, double b, double c,
                        double lambda) {
    if (std::abs(v.norm() - 1.0) > kUnitTol)
      throw std::invalid_argument("Rectangle: v must be unit");
    if (!(a > 0 && b > 0 && c > 0 && lambda > 0))
      throw std::invalid_argument("Rectangle: a, b, c, lambda must be positive");
    return Rectangle{anchor, v, a, b, c, lambda};
  }
};

enum class Face { Left, Other };

template <class DA>
Vector project(const Plane2& plane, const Eigen::MatrixBase<DA>& x) {
  if (x.size() != plane.u1.size())
    throw std::invalid_argument("project: dimension mismatch");
  return plane.u1.dot(x) * plane.u1 + plane.u2.dot(x) * plane.u2;
}

template <class DA>
bool cone_contains(const Cone& cone, const Eigen::MatrixBase<DA>& x) {
  const Vector p = project(cone.plane, x);
  const double norm = p.norm();
  if (norm <= kUnitTol) return true;
  return p.dot(cone.ell) / norm >= cone.u;
}

// Fast path for the planar case (plane = R^2).
inline bool cone_contains2(double u, const Vector2& ell, const Vector2& x) {
  const double norm = x.norm();
  if (norm <= kUnitTol) return true;
  return x.dot(ell) / norm >= u;
}

// Anticlockwise angle from x to y, in [0, 2*pi); zero if either vector is zero.
template <class DA, class DB>
double angle_ccw(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  static_assert(DA::SizeAtCompileTime == 2 || DA::SizeAtCompileTime == Eigen::Dynamic);
  if (x.size() != 2 || y.size() != 2)
    throw std::invalid_argument("angle_ccw: planar vectors required");
  if (x.norm() == 0.0 || y.norm() == 0.0) return 0.0;
  const double cross = x[0] * y[1] - x[1] * y[0];
  const double dot = x[0] * y[0] + x[1] * y[1];
  double theta = std::atan2(cross, dot);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return theta;
}

// Rotation by +pi/2 (anticlockwise).
inline Vector2 perp(const Vector2& v) { return Vector2(-v[1], v[0]); }

inline bool rect_contains(const Rectangle& rect, const Vector2& y) {
  const Vector2 d = y - rect.anchor;
  const double along = d.dot(rect.v);
  const double across = d.dot(perp(rect.v));
  return std::abs(across) < rect.a * rect.lambda &&
         along > -rect.b * rect.lambda && along < rect.c * rect.lambda;
}

// Classify the exit segment p_prev -> p_next against the closed left face
// {(y-x).v = -b*lambda, |(y-x).v_perp| <= a*lambda}. A segment through a
// corner counts as Left.
inline Face exit_face(const Rectangle& rect, const Vector2& p_prev,
                      const Vector2& p_next) {
  if (!rect_contains(rect, p_prev) || rect_contains(rect, p_next))
    throw std::invalid_argument(
        "exit_face: p_prev must be inside and p_next outside the rectangle");
  const Vector2 w = perp(rect.v);
  // Signed distance to the left face plane, positive on the interior side.
  const double s = (p_prev - rect.anchor).dot(rect.v) + rect.b * rect.lambda;
  const double e = (p_next - rect.anchor).dot(rect.v) + rect.b * rect.lambda;
  if (e > 0.0) return Face::Other;  // segment never reaches the face plane
  const double t = s / (s - e);
  const Vector2 q = p_prev + t * (p_next - p_prev);
  const double across = std::abs((q - rect.anchor).dot(w));
  const double half = rect.a * rect.lambda;
  // Closed face; absorb rounding from the parametric intersection so a
  // corner crossing classifies as Left.
  const double tol = 1e-9 * std::max(1.0, half);
  return across <= half + tol ? Face::Left : Face::Other;
}

}  // namespace martwalk
