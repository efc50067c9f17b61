#pragma once

#include <vector>

#include "annulus/nonlinearity.hpp"
#include "annulus/vec2.hpp"

namespace annulus {

// Radial profile of the fundamental solution and its derivative, dimension 2
// or 3. gamma(2, t) = log(t)/2pi, gamma(3, t) = -1/(4 pi t).
double gamma_fundamental(int dimension, double t);
double gamma_fundamental_prime(int dimension, double t);

// Concentric-sphere transmission problem with constant outer data t_o,
// radially symmetric solutions u_i = t_i, and
//   u_o(x) = t_o - (gamma(R) - gamma(|x|)) / gamma'(r) * g(t_i).
// t_i solves f(t) + ratio g(t) = t_o (general) or
// lambda t + eps phi(t) + ratio g(t) = t_o (perturbed),
// ratio = (gamma(R) - gamma(r)) / gamma'(r).
struct RadialProblem {
  int dimension = 2;
  double outer_radius = 0.0;  // R
  double inner_radius = 0.0;  // r, 0 < r < R
  double t_o = 0.0;
  ScalarBC f;  // parameter-independent
  ScalarBC g;
  Vec2 center{0.0, 0.0};

  // perturbed form
  double lambda = 1.0;
  double eps = 0.0;
  ScalarBC phi;

  double ratio() const;
  void check() const;  // throws on invalid radii or parameter-dependent data
};

struct RadialRootOptions {
  double lo = -1e3, hi = 1e3;
  int scan_points = 100000;
  bool detect_tangential = false;
  double tangential_tol = 1e-8;
};

// All inner-state roots in [lo, hi]. Sign-change roots always; tangential
// (even multiplicity) roots only when detect_tangential is set, located
// where |expression| dips below tangential_tol at a critical point.
std::vector<double> radial_roots(const RadialProblem& p, const RadialRootOptions& opts = {});
std::vector<double> radial_small_roots(const RadialProblem& p, const RadialRootOptions& opts = {});

double radial_outer_field(const RadialProblem& p, double t_i, double radius);
// d/d|x| of the outer field.
double radial_outer_flux(const RadialProblem& p, double t_i, double radius);
// Field at a plane point (dimension 2): t_i inside, outer profile in the
// annulus; throws outside the outer sphere.
double radial_field_value(const RadialProblem& p, double t_i, Vec2 x);

}  // namespace annulus
