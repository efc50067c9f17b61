#include "annulus/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {

namespace {

double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

std::vector<double> derivative_coeffs(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  if (d.empty()) d.push_back(0.0);
  return d;
}

int effective_degree(const std::vector<double>& c) {
  int d = -1;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] != 0.0) d = static_cast<int>(k);
  return d;
}

double bisect(const std::vector<double>& c, double a, double b, double fa) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) return mid;
    const double fm = horner(c, mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::vector<double> sample_ts(double t_max) {
  std::vector<double> ts{0.0};
  const double lo = -3.0, hi = std::log10(t_max);
  const int per_sign = 160;
  for (int i = 0; i <= per_sign; ++i) {
    const double mag = std::pow(10.0, lo + (hi - lo) * i / per_sign);
    ts.push_back(mag);
    ts.push_back(-mag);
  }
  return ts;
}

}  // namespace

ScalarBC ScalarBC::constant(double value) {
  ScalarBC h;
  h.coeff_ = {value};
  return h;
}

ScalarBC ScalarBC::polynomial(std::vector<double> coeffs_low_to_high) {
  if (coeffs_low_to_high.empty()) coeffs_low_to_high.push_back(0.0);
  ScalarBC h;
  h.coeff_ = std::move(coeffs_low_to_high);
  return h;
}

void ScalarBC::modulate_coefficient(int k, TrigSeries series) {
  if (k < 0) throw std::invalid_argument("coefficient index must be nonnegative");
  if (k >= static_cast<int>(coeff_.size())) coeff_.resize(k + 1, 0.0);
  modulation_.emplace_back(k, std::move(series));
}

std::vector<double> ScalarBC::coefficients_at(double s) const {
  std::vector<double> c = coeff_;
  for (const auto& [k, series] : modulation_) c[k] += series.eval(s);
  return c;
}

double ScalarBC::eval(double s, double t) const {
  if (modulation_.empty()) return horner(coeff_, t);
  return horner(coefficients_at(s), t);
}

double ScalarBC::eval_dt(double s, double t) const {
  const std::vector<double> c = modulation_.empty() ? coeff_ : coefficients_at(s);
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * t + c[k] * static_cast<double>(k);
  return v;
}

Eigen::VectorXd apply_superposition(const ScalarBC& h, const DiscreteBoundary& b,
                                    const Eigen::VectorXd& f) {
  if (f.size() != b.node_count) throw std::invalid_argument("trace length != node count");
  Eigen::VectorXd out(b.node_count);
  for (int j = 0; j < b.node_count; ++j) out[j] = h.eval(b.param[j], f[j]);
  return out;
}

std::vector<double> poly_real_roots(const std::vector<double>& coeffs, double lo, double hi,
                                    double touch_tol) {
  std::vector<double> roots;
  const int deg = effective_degree(coeffs);
  if (deg <= 0) return roots;  // constant: no isolated roots reported
  if (deg == 1) {
    const double r = -coeffs[0] / coeffs[1];
    if (r >= lo && r <= hi) roots.push_back(r);
    return roots;
  }
  // Monotone pieces between critical points; a missed even-multiplicity
  // critical point of the derivative leaves the pieces monotone anyway.
  std::vector<double> crit = poly_real_roots(derivative_coeffs(coeffs), lo, hi, 0.0);
  std::vector<double> breaks{lo};
  breaks.insert(breaks.end(), crit.begin(), crit.end());
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  const double scale = std::max(1.0, std::abs(hi));
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    const double fa = horner(coeffs, a), fb = horner(coeffs, b);
    if (fa == 0.0) roots.push_back(a);
    if ((fa < 0.0) != (fb < 0.0) && fa != 0.0 && fb != 0.0) {
      roots.push_back(bisect(coeffs, a, b, fa));
    }
  }
  if (horner(coeffs, hi) == 0.0) roots.push_back(hi);
  if (touch_tol > 0.0) {
    // Even-multiplicity roots: the polynomial touches zero at a critical point.
    for (double c : crit) {
      if (std::abs(horner(coeffs, c)) <= touch_tol) roots.push_back(c);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [scale](double a, double b) { return std::abs(a - b) <= 1e-9 * scale; }),
              roots.end());
  return roots;
}

Eigen::VectorXd invert_id_plus_F(const ScalarBC& f_bc, const DiscreteBoundary& b,
                                 const Eigen::VectorXd& f, const InvertOptions& opts) {
  if (f.size() != b.node_count) throw std::invalid_argument("trace length != node count");
  Eigen::VectorXd out(b.node_count);
  for (int j = 0; j < b.node_count; ++j) {
    const double s = b.param[j];
    const double y = f[j];
    // h(t) = t + F(x,t) - y
    std::vector<double> h = f_bc.coefficients_at(s);
    if (h.size() < 2) h.resize(2, 0.0);
    h[1] += 1.0;
    h[0] -= y;
    const double touch = 1e-12 * std::max(1.0, std::abs(y));
    const std::vector<double> roots = poly_real_roots(h, -opts.t_max, opts.t_max, touch);
    if (roots.empty()) {
      std::ostringstream msg;
      msg << "t + F(x,t) = " << y << " has no solution in [-" << opts.t_max << ", " << opts.t_max
          << "] at node " << j;
      throw NonInvertibleError(msg.str());
    }
    if (roots.size() > 1) {
      std::ostringstream msg;
      msg << "t + F(x,t) = " << y << " has " << roots.size() << " solutions at node " << j
          << " (t ~";
      for (double r : roots) msg << " " << r;
      msg << "); the inversion hypothesis fails";
      throw NonInvertibleError(msg.str());
    }
    double t = roots[0];
    // Newton polish to the residual tolerance.
    for (int it = 0; it < 8; ++it) {
      const double r = t + f_bc.eval(s, t) - y;
      if (std::abs(r) <= opts.residual_tol) break;
      const double dr = 1.0 + f_bc.eval_dt(s, t);
      if (dr == 0.0) break;
      t -= r / dr;
    }
    out[j] = t;
  }
  return out;
}

GrowthCertificate audit_growth(const ScalarBC& f_bc, const ScalarBC& g_bc,
                               const DiscreteBoundary& b, double t_max) {
  GrowthCertificate cert;
  cert.t_max = t_max;
  const std::vector<double> ts = sample_ts(t_max);
  std::vector<double> params{0.0};
  if (f_bc.parameter_dependent() || g_bc.parameter_dependent()) {
    params.assign(b.param.begin(), b.param.end());
  }

  struct Sample {
    double t, af, ag, aif;  // |t|, |F|, |G|, |t + F|
  };
  std::vector<Sample> samples;
  for (double s : params) {
    for (double t : ts) {
      const double fv = f_bc.eval(s, t);
      samples.push_back({std::abs(t), std::abs(fv), std::abs(g_bc.eval(s, t)), std::abs(t + fv)});
    }
  }

  // Superlinear growth of F: log-log slope over the top decade.
  std::vector<double> lx, ly, lyi;
  for (const Sample& sm : samples) {
    if (sm.t >= 0.1 * t_max) {
      lx.push_back(std::log(sm.t));
      ly.push_back(std::log(std::max(sm.af, 1e-300)));
      lyi.push_back(std::log(std::max(sm.aif, 1e-300)));
    }
  }
  const double slope_f = ls_slope(lx, ly);
  cert.superlinear_F = slope_f > 1.02;
  if (cert.superlinear_F) {
    cert.delta1 = std::max(1.01, slope_f - 0.01);
    // Largest feasible c1 with |F| >= c1 |t|^{delta1} - 1/c1 at every sample.
    for (int i = 80; i >= -80; --i) {
      const double c1 = std::pow(10.0, i / 20.0);
      bool ok = true;
      for (const Sample& sm : samples) {
        if (sm.af < c1 * std::pow(sm.t, cert.delta1) - 1.0 / c1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        cert.c1 = c1;
        break;
      }
    }
    if (cert.c1 == 0.0) cert.superlinear_F = false;
  }

  // G dominated by a sublinear power of 1 + |F|.
  std::vector<double> gx, gy;
  for (const Sample& sm : samples) {
    if (sm.af >= 10.0) {
      gx.push_back(std::log1p(sm.af));
      gy.push_back(std::log(std::max(sm.ag, 1e-300)));
    }
  }
  const double slope_g = ls_slope(gx, gy);
  cert.dominated_G = slope_g < 0.98;
  if (cert.dominated_G) {
    cert.delta2 = std::min(0.97, std::max(0.0, slope_g) + 0.01);
    double c2 = 0.0;
    for (const Sample& sm : samples) {
      c2 = std::max(c2, sm.ag / std::pow(1.0 + sm.af, cert.delta2));
    }
    cert.c2 = c2;
  }

  cert.pass = cert.superlinear_F && cert.dominated_G;
  if (cert.pass) {
    // Same superlinear bound for t + F gives the inverse-map constants.
    const double slope_if = ls_slope(lx, lyi);
    const double delta_i = std::max(1.01, std::min(cert.delta1, slope_if - 0.01));
    double c1i = 0.0;
    for (int i = 80; i >= -80; --i) {
      const double c = std::pow(10.0, i / 20.0);
      bool ok = true;
      for (const Sample& sm : samples) {
        if (sm.aif < c * std::pow(sm.t, delta_i) - 1.0 / c) {
          ok = false;
          break;
        }
      }
      if (ok) {
        c1i = c;
        break;
      }
    }
    if (c1i > 0.0) {
      cert.C1 = std::pow(1.0 / c1i, 1.0 / delta_i);
      cert.C2 = 1.0 / c1i;
      cert.C3 = cert.c2 * std::pow(2.0, cert.delta2);
      cert.C4 = 1.0 + cert.C1 * std::pow(cert.C2 + 1.0, 1.0 / delta_i);
    }
  }
  return cert;
}

SublinearCertificate audit_sublinear(const ScalarBC& g_bc, const DiscreteBoundary& b,
                                     double t_max) {
  SublinearCertificate cert;
  const std::vector<double> ts = sample_ts(t_max);
  std::vector<double> params{0.0};
  if (g_bc.parameter_dependent()) params.assign(b.param.begin(), b.param.end());
  std::vector<double> lx, ly;
  double all_tiny = true;
  for (double s : params) {
    for (double t : ts) {
      const double ag = std::abs(g_bc.eval(s, t));
      if (ag > 1e-14) all_tiny = false;
      if (std::abs(t) >= 0.01 * t_max) {
        lx.push_back(std::log1p(std::abs(t)));
        ly.push_back(std::log(std::max(ag, 1e-300)));
      }
    }
  }
  const double slope = all_tiny ? 0.0 : ls_slope(lx, ly);
  cert.pass = slope < 0.98;
  if (cert.pass) {
    cert.delta = std::min(0.97, std::max(0.0, slope) + 0.01);
    double c = 0.0;
    for (double s : params) {
      for (double t : ts) {
        c = std::max(c, std::abs(g_bc.eval(s, t)) / std::pow(1.0 + std::abs(t), cert.delta));
      }
    }
    cert.C = c;
  }
  return cert;
}

}  // namespace annulus
