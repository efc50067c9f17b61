#pragma once

#include <memory>
#include <vector>

#include "annulus/vec2.hpp"

namespace annulus {

enum class CurveKind { Circle, Ellipse, TrigPolynomial };

// One coordinate of a closed parameterization on [0, 2pi):
//   c(s) = cos_coef[0] + sum_m ( cos_coef[m] cos(m s) + sin_coef[m] sin(m s) )
// sin_coef[0] is ignored.
struct TrigSeries {
  std::vector<double> cos_coef{0.0};
  std::vector<double> sin_coef{0.0};

  double eval(double s) const;
  double deriv(double s) const;
  double deriv2(double s) const;
  int degree() const;
};

// Smooth closed curve, counterclockwise, realized as a trigonometric
// polynomial per coordinate. Validated at construction: nonvanishing speed,
// positive signed area, and no (near-)self-intersection, all checked on a
// fixed 4096-point sample.
class Curve {
 public:
  static Curve circle(Vec2 center, double radius);
  static Curve ellipse(Vec2 center, double semi_x, double semi_y);
  static Curve trig_polynomial(TrigSeries x, TrigSeries y);

  CurveKind kind() const { return kind_; }
  bool is_circle() const { return kind_ == CurveKind::Circle; }
  Vec2 center() const { return {xs_.cos_coef[0], ys_.cos_coef[0]}; }
  double circle_radius() const;  // throws unless kind == Circle

  Vec2 point(double s) const { return {xs_.eval(s), ys_.eval(s)}; }
  Vec2 derivative(double s) const { return {xs_.deriv(s), ys_.deriv(s)}; }
  Vec2 second_derivative(double s) const { return {xs_.deriv2(s), ys_.deriv2(s)}; }

  // Max pairwise distance over the validation sample.
  double diameter() const { return diameter_; }
  double signed_area() const { return signed_area_; }
  // Distance from p to the sampled curve (sample spacing limits resolution).
  double distance_to(Vec2 p) const;
  // Winding-number test against the sampled polygon. Undefined within a
  // sample spacing of the curve itself.
  bool contains(Vec2 p) const;

  const std::vector<Vec2>& samples() const { return samples_; }

 private:
  Curve(CurveKind kind, TrigSeries xs, TrigSeries ys);
  void validate();

  CurveKind kind_;
  TrigSeries xs_, ys_;
  std::vector<Vec2> samples_;
  double diameter_ = 0.0;
  double signed_area_ = 0.0;
};

using CurvePtr = std::shared_ptr<const Curve>;

// Equispaced parameter nodes with analytic tangents, outward normals,
// speeds, curvatures, and trapezoidal arc-length weights.
struct DiscreteBoundary {
  CurvePtr curve;
  int node_count = 0;
  std::vector<double> param;      // s_j = 2pi j / N
  std::vector<Vec2> node;         // x(s_j)
  std::vector<Vec2> normal;       // unit outward normal
  std::vector<double> speed;      // |x'(s_j)|
  std::vector<double> weight;     // (2pi/N) |x'(s_j)|
  std::vector<double> curvature;  // signed curvature, positive for ccw convex

  double perimeter() const;
  double diameter() const { return curve->diameter(); }
};

using BoundaryPtr = std::shared_ptr<const DiscreteBoundary>;

// N must be even and >= 8.
BoundaryPtr discretize(const Curve& curve, int node_count);
BoundaryPtr discretize(CurvePtr curve, int node_count);

// True iff every sampled point of inner lies strictly inside outer with
// clearance > 1e-3 * diameter(outer).
bool containment_check(const Curve& outer, const Curve& inner);
double containment_clearance(const Curve& outer, const Curve& inner);

}  // namespace annulus
