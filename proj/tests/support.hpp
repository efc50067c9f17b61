// Shared oracle helpers for the test suite. Everything here is independent
// of the library's own numerics: plain adaptive quadrature, bisection,
// polynomial evaluation, extrapolation, and fixed-seed random densities.
#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace testsupport {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Benchmark constants shared across the suite: concentric circles r = 0.75,
// R = 2 with constant outer data chosen so the scalar reduced equation is
// t (t-1)^2 = 0 for the cubic transmission term and constant flux term.
inline double benchmark_t_o() { return 1.0 + 0.75 * std::log(8.0 / 3.0); }
// Outer field of that configuration on the ring |x| = 1.
inline double benchmark_u_o_at_1() { return benchmark_t_o() - 0.75 * std::log(2.0); }

// Adaptive Simpson quadrature with absolute tolerance.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Bisection on [lo, hi]; requires a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-13) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double poly_eval(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
  return acc;
}

// Random trigonometric polynomial values at N equispaced nodes,
// sum_{k<=deg} a_k cos(k s) + b_k sin(k s), coefficients ~ N(0,1)/(1+k).
inline Eigen::VectorXd random_trig_density(int nodes, int degree, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> a(degree + 1), b(degree + 1);
  for (int k = 0; k <= degree; ++k) {
    a[k] = gauss(rng) / (1.0 + k);
    b[k] = gauss(rng) / (1.0 + k);
  }
  Eigen::VectorXd out(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double s = kTwoPi * j / nodes;
    double acc = a[0];
    for (int k = 1; k <= degree; ++k) acc += a[k] * std::cos(k * s) + b[k] * std::sin(k * s);
    out[j] = acc;
  }
  return out;
}

// Neville extrapolation to zero of samples (xs[k], ys[k]); returns the
// highest-order estimate.
inline double extrapolate_to_zero(std::vector<double> xs, std::vector<double> ys) {
  const int n = static_cast<int>(xs.size());
  for (int m = 1; m < n; ++m)
    for (int k = n - 1; k >= m; --k)
      ys[k] = ys[k] + (ys[k] - ys[k - 1]) * xs[k] / (xs[k - m] - xs[k]);
  return ys[n - 1];
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace testsupport
