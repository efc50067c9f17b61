#include "annulus/potentials.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Refinement safety: trapezoid truncation ~ exp(-N d / max|x'|) is pushed
// below 1e-16 by requiring N >= kRefineFactor * max|x'| / d.
constexpr double kRefineFactor = 45.0;

void check_dimension(int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("dimension must be 2 or 3");
}

void check_density(const DiscreteBoundary& b, const Eigen::VectorXd& v) {
  if (v.size() != b.node_count) throw std::invalid_argument("density length != node count");
}

void check_far_field(const DiscreteBoundary& b, Vec2 x) {
  const double d = b.curve->distance_to(x);
  if (!(d > 1e-3 * b.diameter())) {
    std::ostringstream msg;
    msg << "evaluation point (" << x.x << ", " << x.y << ") is within 1e-3 * diameter of the boundary";
    throw NearFieldError(msg.str());
  }
}
}  // namespace

double fundamental_solution(int dimension, double r) {
  check_dimension(dimension);
  if (!(r > 0.0)) throw std::domain_error("fundamental solution requires |x| > 0");
  if (dimension == 2) return std::log(r) / kTwoPi;
  return -1.0 / (4.0 * kPi * r);
}

double fundamental_solution(Vec2 x) { return fundamental_solution(2, x.norm()); }

double fundamental_solution(const std::array<double, 3>& x) {
  return fundamental_solution(3, std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
}

Vec2 grad_fundamental_solution(Vec2 x) {
  const double r2 = x.squared_norm();
  if (!(r2 > 0.0)) throw std::domain_error("gradient requires |x| > 0");
  return x * (1.0 / (kTwoPi * r2));
}

std::array<double, 3> grad_fundamental_solution(const std::array<double, 3>& x) {
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  if (!(r2 > 0.0)) throw std::domain_error("gradient requires |x| > 0");
  const double c = 1.0 / (4.0 * kPi * r2 * std::sqrt(r2));
  return {c * x[0], c * x[1], c * x[2]};
}

double single_layer_eval(const DiscreteBoundary& b, const Eigen::VectorXd& phi, Vec2 x) {
  check_density(b, phi);
  check_far_field(b, x);
  double v = 0.0;
  for (int j = 0; j < b.node_count; ++j) {
    v += phi[j] * fundamental_solution(x - b.node[j]) * b.weight[j];
  }
  return v;
}

double double_layer_eval(const DiscreteBoundary& b, const Eigen::VectorXd& psi, Vec2 x) {
  check_density(b, psi);
  check_far_field(b, x);
  double v = 0.0;
  for (int j = 0; j < b.node_count; ++j) {
    v -= psi[j] * b.normal[j].dot(grad_fundamental_solution(x - b.node[j])) * b.weight[j];
  }
  return v;
}

Vec2 grad_single_layer_eval(const DiscreteBoundary& b, const Eigen::VectorXd& phi, Vec2 x) {
  check_density(b, phi);
  check_far_field(b, x);
  Vec2 g{0.0, 0.0};
  for (int j = 0; j < b.node_count; ++j) {
    g += grad_fundamental_solution(x - b.node[j]) * (phi[j] * b.weight[j]);
  }
  return g;
}

namespace {
// Hessian of the plane fundamental solution applied to n:
//   H(z) n = (n |z|^2 - 2 (z.n) z) / (2 pi |z|^4)
inline Vec2 hessian_apply(Vec2 z, Vec2 n) {
  const double r2 = z.squared_norm();
  const double zn = z.dot(n);
  return (n * r2 - z * (2.0 * zn)) * (1.0 / (kTwoPi * r2 * r2));
}
}  // namespace

Vec2 grad_double_layer_eval(const DiscreteBoundary& b, const Eigen::VectorXd& psi, Vec2 x) {
  check_density(b, psi);
  check_far_field(b, x);
  Vec2 g{0.0, 0.0};
  for (int j = 0; j < b.node_count; ++j) {
    g -= hessian_apply(x - b.node[j], b.normal[j]) * (psi[j] * b.weight[j]);
  }
  return g;
}

Region classify_point(const Curve& outer, const Curve& inner, Vec2 p, double band_rel) {
  if (outer.distance_to(p) <= band_rel * outer.diameter()) return Region::Boundary;
  if (inner.distance_to(p) <= band_rel * inner.diameter()) return Region::Boundary;
  if (inner.contains(p)) return Region::Inner;
  if (outer.contains(p)) return Region::Annulus;
  return Region::Exterior;
}

TrigCoefficients TrigCoefficients::from_samples(const Eigen::VectorXd& values) {
  const int n = static_cast<int>(values.size());
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("sample count must be even and >= 2");
  const int half = n / 2;
  TrigCoefficients c;
  c.a.assign(half + 1, 0.0);
  c.b.assign(half, 0.0);
  for (int j = 0; j < n; ++j) {
    const double s = kTwoPi * j / n;
    const double cs = std::cos(s), sn = std::sin(s);
    // recurrences: cos((m+1)s) = 2 cos(s) cos(ms) - cos((m-1)s), same for sin
    double cm1 = 1.0, sm1 = 0.0;  // m = 0
    double cm = cs, sm = sn;      // m = 1
    c.a[0] += values[j];
    for (int m = 1; m < half; ++m) {
      c.a[m] += values[j] * cm;
      c.b[m] += values[j] * sm;
      const double c_next = 2.0 * cs * cm - cm1;
      const double s_next = 2.0 * cs * sm - sm1;
      cm1 = cm; sm1 = sm; cm = c_next; sm = s_next;
    }
    c.a[half] += values[j] * cm;
  }
  c.a[0] /= n;
  c.a[half] /= n;
  for (int m = 1; m < half; ++m) {
    c.a[m] *= 2.0 / n;
    c.b[m] *= 2.0 / n;
  }
  return c;
}

double TrigCoefficients::eval(double s) const {
  const int half = static_cast<int>(a.size()) - 1;
  const double cs = std::cos(s), sn = std::sin(s);
  double cm1 = 1.0, sm1 = 0.0;
  double cm = cs, sm = sn;
  double v = a[0];
  for (int m = 1; m < half; ++m) {
    v += a[m] * cm + b[m] * sm;
    const double c_next = 2.0 * cs * cm - cm1;
    const double s_next = 2.0 * cs * sm - sm1;
    cm1 = cm; sm1 = sm; cm = c_next; sm = s_next;
  }
  v += a[half] * cm;
  return v;
}

Eigen::VectorXd TrigCoefficients::resample(int node_count) const {
  Eigen::VectorXd out(node_count);
  for (int j = 0; j < node_count; ++j) out[j] = eval(kTwoPi * j / node_count);
  return out;
}

FieldEvaluator::FieldEvaluator(BoundaryPtr base) : base_(std::move(base)) {
  if (!base_) throw std::invalid_argument("null boundary");
  for (int j = 0; j < 4096; ++j) {
    max_speed_ = std::max(max_speed_, base_->curve->derivative(kTwoPi * j / 4096).norm());
  }
}

void FieldEvaluator::set_single_density(const Eigen::VectorXd& eta) {
  check_density(*base_, eta);
  eta_coef_ = TrigCoefficients::from_samples(eta);
  has_eta_ = true;
  for (auto& [n, lv] : levels_) lv.has_eta = false;
}

void FieldEvaluator::set_double_density(const Eigen::VectorXd& psi) {
  check_density(*base_, psi);
  psi_coef_ = TrigCoefficients::from_samples(psi);
  has_psi_ = true;
  for (auto& [n, lv] : levels_) lv.has_psi = false;
}

int FieldEvaluator::refinement_for(Vec2 x) const {
  const double d = base_->curve->distance_to(x);
  if (!(d > 1e-9 * base_->diameter())) {
    throw NearFieldError("evaluation point lies on or numerically touches the boundary");
  }
  const double needed = kRefineFactor * max_speed_ / d;
  // Past the node cap the rule saturates; the trapezoid error then grows
  // like exp(-max_nodes * d / max|x'|), still below ~2e-9 as long as the
  // exponent stays >= 20. Only closer points are rejected.
  if (needed > max_nodes) {
    if (max_nodes * d / max_speed_ >= 20.0) return max_nodes;
    std::ostringstream msg;
    msg << "point at distance " << d << " needs " << needed << " quadrature nodes, beyond the cap";
    throw NearFieldError(msg.str());
  }
  int n = base_->node_count;
  while (n < needed) n *= 2;
  return n;
}

FieldEvaluator::Level& FieldEvaluator::level(int n) const {
  auto it = levels_.find(n);
  if (it == levels_.end()) {
    Level lv;
    lv.node.resize(n);
    lv.normal.resize(n);
    lv.weight.resize(n);
    const double h = kTwoPi / n;
    for (int j = 0; j < n; ++j) {
      const double s = h * j;
      const Vec2 d = base_->curve->derivative(s);
      const double sp = d.norm();
      lv.node[j] = base_->curve->point(s);
      lv.normal[j] = Vec2{d.y, -d.x} * (1.0 / sp);
      lv.weight[j] = h * sp;
    }
    it = levels_.emplace(n, std::move(lv)).first;
  }
  return it->second;
}

const FieldEvaluator::Level& FieldEvaluator::level_for_target(Vec2 x, bool need_eta,
                                                              bool need_psi) const {
  if (need_eta && !has_eta_) throw std::logic_error("single-layer density not set");
  if (need_psi && !has_psi_) throw std::logic_error("double-layer density not set");
  const int n = refinement_for(x);
  Level& lv = level(n);
  if (need_eta && !lv.has_eta) {
    lv.eta = eta_coef_.resample(n);
    lv.has_eta = true;
  }
  if (need_psi && !lv.has_psi) {
    lv.psi = psi_coef_.resample(n);
    lv.has_psi = true;
  }
  return lv;
}

double FieldEvaluator::single_layer(Vec2 x) const {
  const Level& lv = level_for_target(x, true, false);
  double v = 0.0;
  for (std::size_t j = 0; j < lv.node.size(); ++j) {
    v += lv.eta[j] * fundamental_solution(x - lv.node[j]) * lv.weight[j];
  }
  return v;
}

double FieldEvaluator::double_layer(Vec2 x) const {
  const Level& lv = level_for_target(x, false, true);
  double v = 0.0;
  for (std::size_t j = 0; j < lv.node.size(); ++j) {
    v -= lv.psi[j] * lv.normal[j].dot(grad_fundamental_solution(x - lv.node[j])) * lv.weight[j];
  }
  return v;
}

Vec2 FieldEvaluator::grad_single_layer(Vec2 x) const {
  const Level& lv = level_for_target(x, true, false);
  Vec2 g{0.0, 0.0};
  for (std::size_t j = 0; j < lv.node.size(); ++j) {
    g += grad_fundamental_solution(x - lv.node[j]) * (lv.eta[j] * lv.weight[j]);
  }
  return g;
}

Vec2 FieldEvaluator::grad_double_layer(Vec2 x) const {
  const Level& lv = level_for_target(x, false, true);
  Vec2 g{0.0, 0.0};
  for (std::size_t j = 0; j < lv.node.size(); ++j) {
    g -= hessian_apply(x - lv.node[j], lv.normal[j]) * (lv.psi[j] * lv.weight[j]);
  }
  return g;
}

}  // namespace annulus
