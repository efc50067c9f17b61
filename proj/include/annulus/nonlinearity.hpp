#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "annulus/geometry.hpp"

namespace annulus {

// Scalar boundary nonlinearity H(x, t): a polynomial in t whose coefficients
// may vary along the boundary parameter through trigonometric modulation,
//   H(x(s), t) = sum_k c_k(s) t^k,  c_k(s) = coeff[k] + modulation_k(s).
// The t-derivative is available in closed form.
class ScalarBC {
 public:
  ScalarBC() = default;
  static ScalarBC constant(double value);
  static ScalarBC polynomial(std::vector<double> coeffs_low_to_high);

  // Adds parameter dependence to coefficient k.
  void modulate_coefficient(int k, TrigSeries series);

  double eval(double s, double t) const;
  double eval_dt(double s, double t) const;
  std::vector<double> coefficients_at(double s) const;
  int degree() const { return static_cast<int>(coeff_.size()) - 1; }
  bool parameter_dependent() const { return !modulation_.empty(); }

 private:
  std::vector<double> coeff_{0.0};
  std::vector<std::pair<int, TrigSeries>> modulation_;
};

// Node values of x -> H(x, f(x)) on the boundary.
Eigen::VectorXd apply_superposition(const ScalarBC& h, const DiscreteBoundary& b,
                                    const Eigen::VectorXd& f);

// All real roots of the polynomial (coefficients low to high) inside
// [lo, hi], found by recursive critical-point bracketing and bisection.
// Even-multiplicity roots where the polynomial touches zero are included
// when touch_tol > 0 and |p| at a critical point is below touch_tol.
std::vector<double> poly_real_roots(const std::vector<double>& coeffs, double lo, double hi,
                                    double touch_tol = 0.0);

struct InvertOptions {
  double t_max = 1e3;        // search interval [-t_max, t_max]
  double residual_tol = 1e-12;
};

// Solves t + F(x, t) = f(x) nodewise. Fails when the map is not injective on
// the search interval (multiple crossings: the inversion hypothesis on
// I + F is violated) or no crossing exists.
Eigen::VectorXd invert_id_plus_F(const ScalarBC& f_bc, const DiscreteBoundary& b,
                                 const Eigen::VectorXd& f, const InvertOptions& opts = {});

// Growth audit over a log-spaced sample of [-t_max, t_max] and all nodes:
//   |F(x,t)| >= c1 |t|^{delta1} - 1/c1   with delta1 > 1   (superlinear F)
//   |G(x,t)| <= c2 (1 + |F(x,t)|)^{delta2} with delta2 in [0,1)  (dominated G)
// Derived constants bound the inverse and composed maps:
//   |(I+F)^{-1} f| <= C1 (C2 + |f|)^{1/delta1},  |G o (I+F)^{-1} f| <= C3 (C4 + |f|)^{delta2}.
struct GrowthCertificate {
  double c1 = 0.0, delta1 = 0.0;
  double c2 = 0.0, delta2 = 0.0;
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0;
  double t_max = 0.0;
  bool superlinear_F = false;
  bool dominated_G = false;
  bool pass = false;
};
GrowthCertificate audit_growth(const ScalarBC& f_bc, const ScalarBC& g_bc,
                               const DiscreteBoundary& b, double t_max = 1e3);

// |G(x,t)| <= C (1 + |t|)^{delta} with delta < 1, same sampling.
struct SublinearCertificate {
  double C = 0.0, delta = 0.0;
  bool pass = false;
};
SublinearCertificate audit_sublinear(const ScalarBC& g_bc, const DiscreteBoundary& b,
                                     double t_max = 1e3);

}  // namespace annulus
