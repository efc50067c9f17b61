#include "annulus/transmission_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = kTwoPi / 2.0;

double sup_norm(const Eigen::VectorXd& v) {
  return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
}

struct GaussRule {
  std::vector<double> node;    // on (-1, 1)
  std::vector<double> weight;
};

// Gauss-Legendre nodes by Newton iteration on the three-term recurrence.
const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  rule.node.resize(n);
  rule.weight.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.node[i] = -x;
    rule.node[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weight[i] = w;
    rule.weight[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

// Crossing parameters rho in (0, hi) of the ray c + rho * dir (|dir| = 1)
// with the curve, sorted increasing. Circles are intersected exactly;
// other curves are scanned through the containment indicator and the sign
// changes are bisected.
std::vector<double> ray_crossings(const Curve& curve, Vec2 c, Vec2 dir, double hi) {
  std::vector<double> out;
  const double lo_guard = 1e-12 * hi;
  if (curve.kind() == CurveKind::Circle) {
    const Vec2 d = c - curve.center();
    const double b = d.dot(dir);
    const double disc = b * b - (d.squared_norm() - curve.circle_radius() * curve.circle_radius());
    if (disc > 0.0) {
      const double s = std::sqrt(disc);
      for (double rho : {-b - s, -b + s}) {
        if (rho > lo_guard && rho < hi - lo_guard) out.push_back(rho);
      }
      std::sort(out.begin(), out.end());
    }
    return out;
  }
  const int scan = 128;
  bool prev = curve.contains(c);
  double prev_rho = 0.0;
  for (int k = 1; k <= scan; ++k) {
    const double rho = hi * k / scan;
    const bool cur = curve.contains(c + rho * dir);
    if (cur != prev) {
      double a = prev_rho, b = rho;
      for (int iter = 0; iter < 60 && b - a > 1e-15 * hi; ++iter) {
        const double m = 0.5 * (a + b);
        (curve.contains(c + m * dir) == prev ? a : b) = m;
      }
      const double m = 0.5 * (a + b);
      if (m > lo_guard && m < hi - lo_guard) out.push_back(m);
    }
    prev = cur;
    prev_rho = rho;
  }
  return out;
}

}  // namespace

double DensityState::sup_norm() const {
  return std::max({annulus::sup_norm(mu_o), annulus::sup_norm(mu), annulus::sup_norm(eta)});
}

double RadialBump::value(Vec2 x) const {
  const double u = (x - center).squared_norm() / (radius * radius);
  if (u >= 1.0) return 0.0;
  return scale * std::pow(1.0 - u, power);
}

Vec2 RadialBump::gradient(Vec2 x) const {
  const double u = (x - center).squared_norm() / (radius * radius);
  if (u >= 1.0) return {0.0, 0.0};
  const double dp = -power * std::pow(1.0 - u, power - 1);
  return (scale * dp * 2.0 / (radius * radius)) * (x - center);
}

double RadialBump::laplacian(Vec2 x) const {
  const double u = (x - center).squared_norm() / (radius * radius);
  if (u >= 1.0) return 0.0;
  const double dp = -power * std::pow(1.0 - u, power - 1);
  const double ddp = power * (power - 1) * std::pow(1.0 - u, power - 2);
  return scale * (4.0 / (radius * radius)) * (u * ddp + dp);
}

TransmissionProblem::TransmissionProblem(BoundaryPtr outer, BoundaryPtr inner,
                                         Eigen::VectorXd dirichlet_outer,
                                         ScalarBC transmission_F, ScalarBC flux_G,
                                         TransmissionOptions options)
    : outer_(std::move(outer)),
      inner_(std::move(inner)),
      f_o_(std::move(dirichlet_outer)),
      F_(std::move(transmission_F)),
      G_(std::move(flux_G)),
      options_(options) {
  if (!outer_ || !inner_) throw GeometryError("transmission problem needs two boundaries");
  if (!containment_check(*outer_->curve, *inner_->curve)) {
    throw GeometryError("inner curve must lie strictly inside the outer curve");
  }
  if (f_o_.size() != outer_->node_count) {
    std::ostringstream msg;
    msg << "Dirichlet data has " << f_o_.size() << " values for " << outer_->node_count
        << " outer nodes";
    throw ConfigError(msg.str());
  }
  if (!(options_.damping > 0.0 && options_.damping <= 1.0)) {
    throw ConfigError("damping must lie in (0, 1]");
  }

  v_i_ = assemble_V(inner_);
  w_i_ = assemble_W(inner_);
  wstar_i_ = assemble_Wstar(inner_);
  w_o_ = assemble_W(outer_);
  cross_v_io_ = assemble_cross(inner_, outer_, OpTag::CrossSingle);
  cross_w_io_ = assemble_cross(inner_, outer_, OpTag::CrossDouble);
  cross_w_oi_ = assemble_cross(outer_, inner_, OpTag::CrossDouble);
  dnw_oi_ = assemble_cross(outer_, inner_, OpTag::CrossNormalDeriv);
  half_w_o_ = std::make_unique<HalfPlusSolver>(w_o_);
  half_w_i_ = std::make_unique<HalfPlusSolver>(w_i_);
  j_ = assemble_J(*half_w_o_, cross_v_io_, dnw_oi_, wstar_i_);
  j_lu_.compute(j_.mat);
}

Eigen::VectorXd TransmissionProblem::solve_coupling(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = j_lu_.solve(rhs);
  const double residual = (j_.mat * x - rhs).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10 * std::max(1.0, sup_norm(rhs)))) {
    std::ostringstream msg;
    msg << "coupling operator solve left residual " << residual;
    throw LinearAlgebraError(msg.str());
  }
  return x;
}

DensityState TransmissionProblem::apply_map(const DensityState& state) const {
  DensityState next;
  const Eigen::VectorXd cross_w_mu = cross_w_io_.apply(state.mu);
  next.mu_o = half_w_o_->solve(f_o_ - cross_w_mu - cross_v_io_.apply(state.eta));
  const Eigen::VectorXd arg =
      cross_w_oi_.apply(state.mu_o) + v_i_.apply(state.eta) + 2.0 * w_i_.apply(state.mu);
  InvertOptions inv;
  inv.t_max = options_.invert_t_max;
  const Eigen::VectorXd h = invert_id_plus_F(F_, *inner_, arg, inv);
  next.mu = half_w_i_->solve(h);
  next.eta = solve_coupling(apply_superposition(G_, *inner_, h) -
                            dnw_oi_.apply(half_w_o_->solve(f_o_ - cross_w_mu)));
  return next;
}

std::array<double, 3> TransmissionProblem::residuals(const DensityState& state) const {
  const DensityState mapped = apply_map(state);
  return {sup_norm(mapped.mu_o - state.mu_o), sup_norm(mapped.mu - state.mu),
          sup_norm(mapped.eta - state.eta)};
}

std::pair<DensityState, SolveReport> TransmissionProblem::solve(const DensityState& initial) const {
  DensityState s = initial;
  SolveReport report;
  report.damping = options_.damping;
  report.tolerance = options_.tolerance;
  double best = std::numeric_limits<double>::infinity();
  int best_iteration = 0;
  for (int it = 1; it <= options_.max_iterations; ++it) {
    const DensityState mapped = apply_map(s);
    const std::array<double, 3> r = {sup_norm(mapped.mu_o - s.mu_o), sup_norm(mapped.mu - s.mu),
                                     sup_norm(mapped.eta - s.eta)};
    const double rmax = std::max({r[0], r[1], r[2]});
    report.iterations = it;
    report.final_residual = r;
    report.residual_history.push_back(rmax);
    if (rmax <= options_.tolerance) {
      report.converged = true;
      return {s, report};
    }
    if (rmax < best) {
      best = rmax;
      best_iteration = it;
    } else if (it - best_iteration >= options_.stall_window) {
      std::ostringstream msg;
      msg << "residual stalled at " << rmax << " (best " << best << " at iteration "
          << best_iteration << "); consider a smaller damping factor";
      report.diagnostic = msg.str();
      return {s, report};
    }
    const double theta = options_.damping;
    s.mu_o = (1.0 - theta) * s.mu_o + theta * mapped.mu_o;
    s.mu = (1.0 - theta) * s.mu + theta * mapped.mu;
    s.eta = (1.0 - theta) * s.eta + theta * mapped.eta;
    if (s.sup_norm() > options_.state_cap) {
      std::ostringstream msg;
      msg << "density sup-norm exceeded " << options_.state_cap << "; the iteration is diverging";
      report.diagnostic = msg.str();
      return {s, report};
    }
  }
  std::ostringstream msg;
  msg << "no convergence within " << options_.max_iterations << " iterations (residual "
      << report.residual_history.back() << ")";
  report.diagnostic = msg.str();
  return {s, report};
}

DensityState TransmissionProblem::zero_state() const {
  DensityState s;
  s.mu_o = Eigen::VectorXd::Zero(outer_->node_count);
  s.mu = Eigen::VectorXd::Zero(inner_->node_count);
  s.eta = Eigen::VectorXd::Zero(inner_->node_count);
  return s;
}

DensityState TransmissionProblem::radial_seed(double t_i) const {
  if (!outer_->curve->is_circle() || !inner_->curve->is_circle()) {
    throw ConfigError("radial seeding requires circular boundaries");
  }
  const double off = (outer_->curve->center() - inner_->curve->center()).norm();
  if (!(off <= 1e-12 * outer_->diameter())) {
    throw ConfigError("radial seeding requires concentric circles");
  }
  const double spread = f_o_.maxCoeff() - f_o_.minCoeff();
  if (!(spread <= 1e-9 * std::max(1.0, sup_norm(f_o_)))) {
    throw ConfigError("radial seeding requires constant outer Dirichlet data");
  }
  if (G_.parameter_dependent()) {
    throw ConfigError("radial seeding requires position-independent flux data");
  }
  const int n = inner_->node_count;
  const double g_ti = G_.eval(0.0, t_i);
  DensityState s;
  s.mu = Eigen::VectorXd::Constant(n, t_i);
  s.eta = solve_coupling(Eigen::VectorXd::Constant(n, g_ti) -
                         dnw_oi_.apply(half_w_o_->solve(f_o_)));
  s.mu_o = half_w_o_->solve(f_o_ - cross_v_io_.apply(s.eta));
  return s;
}

Eigen::VectorXd TransmissionProblem::trace_u_i(const DensityState& state) const {
  return half_w_i_->half_plus() * state.mu;
}

Eigen::VectorXd TransmissionProblem::trace_u_o_inner(const DensityState& state) const {
  return cross_w_oi_.apply(state.mu_o) + w_i_.mat * state.mu - 0.5 * state.mu +
         v_i_.apply(state.eta);
}

Eigen::VectorXd TransmissionProblem::trace_u_o_outer(const DensityState& state) const {
  return half_w_o_->half_plus() * state.mu_o + cross_w_io_.apply(state.mu) +
         cross_v_io_.apply(state.eta);
}

double TransmissionProblem::interior_mean(const DensityState& state) const {
  const Eigen::VectorXd tr = trace_u_i(state);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < inner_->node_count; ++j) {
    num += inner_->weight[j] * tr[j];
    den += inner_->weight[j];
  }
  return num / den;
}

FieldGrid TransmissionProblem::reconstruct(const DensityState& state,
                                           const std::vector<Vec2>& points,
                                           double cutoff_rel) const {
  FieldEvaluator outer_eval(outer_);
  outer_eval.set_double_density(state.mu_o);
  FieldEvaluator inner_eval(inner_);
  inner_eval.set_double_density(state.mu);
  inner_eval.set_single_density(state.eta);

  FieldGrid grid;
  grid.reserve(points.size());
  for (const Vec2 p : points) {
    const Region region = classify_point(*outer_->curve, *inner_->curve, p, cutoff_rel);
    if (region == Region::Boundary) {
      std::ostringstream msg;
      msg << "point (" << p.x << ", " << p.y << ") lies within the near-boundary band";
      throw NearFieldError(msg.str());
    }
    if (region == Region::Exterior) {
      std::ostringstream msg;
      msg << "point (" << p.x << ", " << p.y << ") lies outside the outer boundary";
      throw std::domain_error(msg.str());
    }
    FieldSample sample;
    sample.point = p;
    sample.region = region;
    if (region == Region::Inner) {
      sample.value = inner_eval.double_layer(p);
    } else {
      sample.value =
          outer_eval.double_layer(p) + inner_eval.double_layer(p) + inner_eval.single_layer(p);
    }
    grid.push_back(sample);
  }
  return grid;
}

DensityState TransmissionProblem::re_extract(const DensityState& state) const {
  DensityState out;
  out.mu = half_w_i_->solve(trace_u_i(state));
  out.mu_o = half_w_o_->solve(trace_u_o_outer(state) - cross_w_io_.apply(state.mu) -
                              cross_v_io_.apply(state.eta));
  const Eigen::VectorXd v_eta = trace_u_o_inner(state) - cross_w_oi_.apply(state.mu_o) -
                                (w_i_.mat * state.mu - 0.5 * state.mu);
  if (!v_i_lu_) {
    v_i_lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(v_i_.mat);
  }
  out.eta = v_i_lu_->solve(v_eta);
  const double residual = sup_norm(v_i_.mat * out.eta - v_eta);
  if (!(residual <= 1e-8 * std::max(1.0, sup_norm(v_eta)))) {
    std::ostringstream msg;
    msg << "single-layer trace solve left residual " << residual
        << "; the contour is too close to unit logarithmic capacity";
    throw LinearAlgebraError(msg.str());
  }
  return out;
}

WeakPairingResult TransmissionProblem::weak_flux_pairing(const DensityState& state,
                                                         const RadialBump& bump,
                                                         WeakPairingOptions quad) const {
  const Curve& outer_curve = *outer_->curve;
  const Curve& inner_curve = *inner_->curve;
  if (!outer_curve.contains(bump.center) ||
      outer_curve.distance_to(bump.center) <=
          bump.radius + 1e-3 * outer_curve.diameter()) {
    throw GeometryError("bump support must lie strictly inside the outer boundary");
  }
  if (quad.radial_nodes < 2 || quad.angular_nodes < 4) {
    throw ConfigError("weak pairing quadrature needs at least 2 radial and 4 angular nodes");
  }

  const Eigen::VectorXd u_i_tr = trace_u_i(state);
  const Eigen::VectorXd u_o_tr = trace_u_o_inner(state);
  const Eigen::VectorXd g_vals = apply_superposition(G_, *inner_, u_i_tr);

  WeakPairingResult result;
  for (int j = 0; j < inner_->node_count; ++j) {
    const Vec2 x = inner_->node[j];
    result.boundary_term +=
        inner_->weight[j] * (u_o_tr[j] - u_i_tr[j]) * inner_->normal[j].dot(bump.gradient(x));
    result.rhs += inner_->weight[j] * g_vals[j] * bump.value(x);
  }

  FieldEvaluator outer_eval(outer_);
  outer_eval.set_double_density(state.mu_o);
  FieldEvaluator inner_eval(inner_);
  inner_eval.set_double_density(state.mu);
  inner_eval.set_single_density(state.eta);

  const GaussRule& rule = gauss_rule(quad.radial_nodes);
  const double dtheta = kTwoPi / quad.angular_nodes;
  for (int k = 0; k < quad.angular_nodes; ++k) {
    const double theta = dtheta * k;
    const Vec2 dir{std::cos(theta), std::sin(theta)};
    std::vector<double> breaks = ray_crossings(inner_curve, bump.center, dir, bump.radius);
    breaks.insert(breaks.begin(), 0.0);
    breaks.push_back(bump.radius);
    for (size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
      const double a = breaks[seg], b = breaks[seg + 1];
      if (!(b - a > 1e-14 * bump.radius)) continue;
      const Vec2 mid = bump.center + (0.5 * (a + b)) * dir;
      if (!outer_curve.contains(mid)) {
        throw GeometryError("bump support leaves the computational domain");
      }
      const bool interior = inner_curve.contains(mid);
      double segment = 0.0;
      for (int g = 0; g < quad.radial_nodes; ++g) {
        const double rho = 0.5 * (a + b) + 0.5 * (b - a) * rule.node[g];
        const Vec2 x = bump.center + rho * dir;
        const double u = interior ? inner_eval.double_layer(x)
                                  : outer_eval.double_layer(x) + inner_eval.double_layer(x) +
                                        inner_eval.single_layer(x);
        segment += 0.5 * (b - a) * rule.weight[g] * u * bump.laplacian(x) * rho;
      }
      result.volume_term += dtheta * segment;
    }
  }
  result.lhs = result.boundary_term + result.volume_term;
  return result;
}

}  // namespace annulus
