#include "annulus/radial_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

// expression coefficients (low to high) of the root equation in t
std::vector<double> root_poly(const RadialProblem& p, bool perturbed) {
  std::vector<double> e;
  const double ratio = p.ratio();
  auto add = [&e](const std::vector<double>& c, double scale) {
    if (c.size() > e.size()) e.resize(c.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) e[k] += scale * c[k];
  };
  if (perturbed) {
    add({0.0, p.lambda}, 1.0);
    add(p.phi.coefficients_at(0.0), p.eps);
  } else {
    add(p.f.coefficients_at(0.0), 1.0);
  }
  add(p.g.coefficients_at(0.0), ratio);
  if (e.empty()) e.push_back(0.0);
  e[0] -= p.t_o;
  return e;
}

std::vector<double> roots_of(const std::vector<double>& e, const RadialRootOptions& opts) {
  // Polynomial path: critical-point bracketing catches closely spaced roots
  // that a fixed scan can step over, and touch detection finds tangential ones.
  double scale = 0.0;
  for (double c : e) scale = std::max(scale, std::abs(c));
  const double touch = opts.detect_tangential ? opts.tangential_tol * std::max(1.0, scale) : 0.0;
  return poly_real_roots(e, opts.lo, opts.hi, touch);
}
}  // namespace

double gamma_fundamental(int dimension, double t) {
  if (!(t > 0.0)) throw std::domain_error("radial profile requires t > 0");
  if (dimension == 2) return std::log(t) / kTwoPi;
  if (dimension == 3) return -1.0 / (kFourPi * t);
  throw std::invalid_argument("dimension must be 2 or 3");
}

double gamma_fundamental_prime(int dimension, double t) {
  if (!(t > 0.0)) throw std::domain_error("radial profile requires t > 0");
  if (dimension == 2) return 1.0 / (kTwoPi * t);
  if (dimension == 3) return 1.0 / (kFourPi * t * t);
  throw std::invalid_argument("dimension must be 2 or 3");
}

double RadialProblem::ratio() const {
  return (gamma_fundamental(dimension, outer_radius) - gamma_fundamental(dimension, inner_radius)) /
         gamma_fundamental_prime(dimension, inner_radius);
}

void RadialProblem::check() const {
  if (dimension != 2 && dimension != 3) throw ConfigError("radial problem dimension must be 2 or 3");
  if (!(inner_radius > 0.0) || !(outer_radius > inner_radius)) {
    throw ConfigError("radial problem requires 0 < r < R");
  }
  if (f.parameter_dependent() || g.parameter_dependent() || phi.parameter_dependent()) {
    throw ConfigError("radial oracle requires position-independent boundary data");
  }
}

std::vector<double> radial_roots(const RadialProblem& p, const RadialRootOptions& opts) {
  p.check();
  return roots_of(root_poly(p, false), opts);
}

std::vector<double> radial_small_roots(const RadialProblem& p, const RadialRootOptions& opts) {
  p.check();
  if (!(p.lambda > 0.0)) throw ConfigError("perturbed radial problem requires lambda > 0");
  return roots_of(root_poly(p, true), opts);
}

double radial_outer_field(const RadialProblem& p, double t_i, double radius) {
  p.check();
  if (!(radius >= p.inner_radius && radius <= p.outer_radius)) {
    std::ostringstream msg;
    msg << "radius " << radius << " outside [" << p.inner_radius << ", " << p.outer_radius << "]";
    throw std::domain_error(msg.str());
  }
  const double num = gamma_fundamental(p.dimension, p.outer_radius) -
                     gamma_fundamental(p.dimension, radius);
  return p.t_o - num / gamma_fundamental_prime(p.dimension, p.inner_radius) * p.g.eval(0.0, t_i);
}

double radial_outer_flux(const RadialProblem& p, double t_i, double radius) {
  p.check();
  return gamma_fundamental_prime(p.dimension, radius) /
         gamma_fundamental_prime(p.dimension, p.inner_radius) * p.g.eval(0.0, t_i);
}

double radial_field_value(const RadialProblem& p, double t_i, Vec2 x) {
  const double rho = (x - p.center).norm();
  if (rho <= p.inner_radius) return t_i;
  if (rho <= p.outer_radius) return radial_outer_field(p, t_i, rho);
  throw std::domain_error("point outside the outer sphere");
}

}  // namespace annulus
