#include "annulus/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kValidationSamples = 4096;
}  // namespace

double TrigSeries::eval(double s) const {
  double v = cos_coef[0];
  for (std::size_t m = 1; m < cos_coef.size(); ++m) v += cos_coef[m] * std::cos(m * s);
  for (std::size_t m = 1; m < sin_coef.size(); ++m) v += sin_coef[m] * std::sin(m * s);
  return v;
}

double TrigSeries::deriv(double s) const {
  double v = 0.0;
  for (std::size_t m = 1; m < cos_coef.size(); ++m) v -= cos_coef[m] * m * std::sin(m * s);
  for (std::size_t m = 1; m < sin_coef.size(); ++m) v += sin_coef[m] * m * std::cos(m * s);
  return v;
}

double TrigSeries::deriv2(double s) const {
  double v = 0.0;
  for (std::size_t m = 1; m < cos_coef.size(); ++m) v -= cos_coef[m] * m * m * std::cos(m * s);
  for (std::size_t m = 1; m < sin_coef.size(); ++m) v -= sin_coef[m] * m * m * std::sin(m * s);
  return v;
}

int TrigSeries::degree() const {
  int d = 0;
  for (std::size_t m = 1; m < cos_coef.size(); ++m)
    if (cos_coef[m] != 0.0) d = static_cast<int>(m);
  for (std::size_t m = 1; m < sin_coef.size(); ++m)
    if (sin_coef[m] != 0.0) d = std::max(d, static_cast<int>(m));
  return d;
}

Curve Curve::circle(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("circle radius must be positive");
  TrigSeries xs, ys;
  xs.cos_coef = {center.x, radius};
  ys.cos_coef = {center.y, 0.0};
  ys.sin_coef = {0.0, radius};
  return Curve(CurveKind::Circle, std::move(xs), std::move(ys));
}

Curve Curve::ellipse(Vec2 center, double semi_x, double semi_y) {
  if (!(semi_x > 0.0) || !(semi_y > 0.0)) throw GeometryError("ellipse semi-axes must be positive");
  TrigSeries xs, ys;
  xs.cos_coef = {center.x, semi_x};
  ys.cos_coef = {center.y, 0.0};
  ys.sin_coef = {0.0, semi_y};
  return Curve(CurveKind::Ellipse, std::move(xs), std::move(ys));
}

Curve Curve::trig_polynomial(TrigSeries x, TrigSeries y) {
  if (x.cos_coef.empty()) x.cos_coef = {0.0};
  if (y.cos_coef.empty()) y.cos_coef = {0.0};
  return Curve(CurveKind::TrigPolynomial, std::move(x), std::move(y));
}

double Curve::circle_radius() const {
  if (kind_ != CurveKind::Circle) throw GeometryError("curve is not a circle");
  return xs_.cos_coef[1];
}

Curve::Curve(CurveKind kind, TrigSeries xs, TrigSeries ys)
    : kind_(kind), xs_(std::move(xs)), ys_(std::move(ys)) {
  validate();
}

void Curve::validate() {
  samples_.resize(kValidationSamples);
  for (int j = 0; j < kValidationSamples; ++j) samples_[j] = point(kTwoPi * j / kValidationSamples);

  double min_speed = std::numeric_limits<double>::max();
  for (int j = 0; j < kValidationSamples; ++j) {
    min_speed = std::min(min_speed, derivative(kTwoPi * j / kValidationSamples).norm());
  }
  if (!(min_speed > 1e-12)) throw GeometryError("parameterization speed vanishes");

  double diam2 = 0.0;
  for (int j = 0; j < kValidationSamples; j += 4) {
    for (int k = j + 4; k < kValidationSamples; k += 4) {
      diam2 = std::max(diam2, (samples_[j] - samples_[k]).squared_norm());
    }
  }
  diameter_ = std::sqrt(diam2);

  // Near-self-intersection shows up as a pair of samples closer than the
  // scale-relative floor; adjacent samples sit ~ perimeter/4096 apart, far
  // above it for any admissible curve.
  const double floor2 = 1e-12 * diameter_ * diameter_;
  double min2 = std::numeric_limits<double>::max();
  for (int j = 0; j < kValidationSamples && min2 > floor2; ++j) {
    const Vec2 pj = samples_[j];
    for (int k = j + 1; k < kValidationSamples; ++k) {
      const double dx = pj.x - samples_[k].x;
      const double dy = pj.y - samples_[k].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < min2) min2 = d2;
    }
  }
  if (!(min2 > floor2)) throw GeometryError("curve self-intersects (sample pair below distance floor)");

  // Trapezoidal rule on x1 x2' - x2 x1'; spectrally accurate.
  double area = 0.0;
  for (int j = 0; j < kValidationSamples; ++j) {
    const double s = kTwoPi * j / kValidationSamples;
    const Vec2 p = point(s), d = derivative(s);
    area += p.cross(d);
  }
  signed_area_ = 0.5 * area * kTwoPi / kValidationSamples;
  if (!(signed_area_ > 0.0)) throw GeometryError("curve must be counterclockwise (signed area <= 0)");
}

double Curve::distance_to(Vec2 p) const {
  double best2 = std::numeric_limits<double>::max();
  for (const Vec2& q : samples_) best2 = std::min(best2, (p - q).squared_norm());
  return std::sqrt(best2);
}

bool Curve::contains(Vec2 p) const {
  // Crossing-number test on the sample polygon.
  bool inside = false;
  const int n = static_cast<int>(samples_.size());
  for (int j = 0, k = n - 1; j < n; k = j++) {
    const Vec2 a = samples_[j], b = samples_[k];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double DiscreteBoundary::perimeter() const {
  double L = 0.0;
  for (double w : weight) L += w;
  return L;
}

BoundaryPtr discretize(CurvePtr curve, int node_count) {
  if (!curve) throw GeometryError("null curve");
  if (node_count < 8 || node_count % 2 != 0) {
    std::ostringstream msg;
    msg << "node count must be even and >= 8, got " << node_count;
    throw GeometryError(msg.str());
  }
  auto b = std::make_shared<DiscreteBoundary>();
  b->curve = curve;
  b->node_count = node_count;
  b->param.resize(node_count);
  b->node.resize(node_count);
  b->normal.resize(node_count);
  b->speed.resize(node_count);
  b->weight.resize(node_count);
  b->curvature.resize(node_count);
  const double h = kTwoPi / node_count;
  for (int j = 0; j < node_count; ++j) {
    const double s = h * j;
    const Vec2 d = curve->derivative(s);
    const Vec2 dd = curve->second_derivative(s);
    const double sp = d.norm();
    b->param[j] = s;
    b->node[j] = curve->point(s);
    b->speed[j] = sp;
    b->weight[j] = h * sp;
    // ccw parameterization: (y', -x')/|x'| points outward
    b->normal[j] = Vec2{d.y, -d.x} * (1.0 / sp);
    b->curvature[j] = d.cross(dd) / (sp * sp * sp);
  }
  return b;
}

BoundaryPtr discretize(const Curve& curve, int node_count) {
  return discretize(std::make_shared<const Curve>(curve), node_count);
}

double containment_clearance(const Curve& outer, const Curve& inner) {
  double best2 = std::numeric_limits<double>::max();
  // Sample every 4th point (1024 each side) for the pairwise clearance.
  const auto& so = outer.samples();
  const auto& si = inner.samples();
  for (std::size_t j = 0; j < si.size(); j += 4) {
    for (std::size_t k = 0; k < so.size(); k += 4) {
      best2 = std::min(best2, (si[j] - so[k]).squared_norm());
    }
  }
  return std::sqrt(best2);
}

bool containment_check(const Curve& outer, const Curve& inner) {
  const double clearance = containment_clearance(outer, inner);
  if (!(clearance > 1e-3 * outer.diameter())) return false;
  for (std::size_t j = 0; j < inner.samples().size(); j += 4) {
    if (!outer.contains(inner.samples()[j])) return false;
  }
  return true;
}

}  // namespace annulus
