#include "annulus/perturbation_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {
namespace {

double sup_norm(const Eigen::VectorXd& v) {
  return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
}

// Node values of dH/dt at (x_j, f_j).
Eigen::VectorXd nodewise_dt(const ScalarBC& h, const DiscreteBoundary& b,
                            const Eigen::VectorXd& f) {
  Eigen::VectorXd out(b.node_count);
  for (int j = 0; j < b.node_count; ++j) out[j] = h.eval_dt(b.param[j], f[j]);
  return out;
}

}  // namespace

double PerturbState::sup_norm() const {
  double m = 0.0;
  if (mu_o.size() > 0) m = std::max(m, mu_o.cwiseAbs().maxCoeff());
  if (eta_o.size() > 0) m = std::max(m, eta_o.cwiseAbs().maxCoeff());
  if (eta_i.size() > 0) m = std::max(m, eta_i.cwiseAbs().maxCoeff());
  return m;
}

PerturbedProblem::PerturbedProblem(BoundaryPtr outer, BoundaryPtr inner,
                                   Eigen::VectorXd dirichlet_outer, double lambda,
                                   ScalarBC phi, ScalarBC flux_g,
                                   TransmissionOptions picard_options)
    : outer_(std::move(outer)),
      inner_(std::move(inner)),
      f_o_(std::move(dirichlet_outer)),
      lambda_(lambda),
      phi_(std::move(phi)),
      g_(std::move(flux_g)),
      picard_options_(picard_options) {
  if (!outer_ || !inner_) throw GeometryError("perturbed problem needs two boundaries");
  if (!containment_check(*outer_->curve, *inner_->curve)) {
    throw GeometryError("inner curve must lie strictly inside the outer curve");
  }
  if (f_o_.size() != outer_->node_count) {
    std::ostringstream msg;
    msg << "Dirichlet data has " << f_o_.size() << " values for " << outer_->node_count
        << " outer nodes";
    throw ConfigError(msg.str());
  }
  if (!(lambda_ > 0.0)) throw ConfigError("the linear transmission coefficient must be positive");
  if (!(picard_options_.damping > 0.0 && picard_options_.damping <= 1.0)) {
    throw ConfigError("damping must lie in (0, 1]");
  }

  equilibrium_ = equilibrium_density(*inner_);
  if (std::abs(equilibrium_.c) < 1e-6) {
    std::ostringstream msg;
    msg << "inner curve has near-unit logarithmic capacity (equilibrium constant "
        << equilibrium_.c
        << "); the single-layer operator is degenerate there. Rescale the geometry "
           "(multiply all lengths by a factor away from the degenerate scale) and retry";
    throw CapacityError(msg.str());
  }

  v_i_ = assemble_V(inner_);
  wstar_i_ = assemble_Wstar(inner_);
  w_o_ = assemble_W(outer_);
  cross_v_io_ = assemble_cross(inner_, outer_, OpTag::CrossSingle);
  cross_w_oi_ = assemble_cross(outer_, inner_, OpTag::CrossDouble);
  dnw_oi_ = assemble_cross(outer_, inner_, OpTag::CrossNormalDeriv);
  half_w_o_ = std::make_unique<HalfPlusSolver>(w_o_);
  j_lambda_ = assemble_J_lambda(*half_w_o_, cross_v_io_, dnw_oi_, wstar_i_, lambda_);
  j_lambda_lu_.compute(j_lambda_.mat);

  const int ni = inner_size();
  half_plus_wstar_ = wstar_i_.mat + 0.5 * Eigen::MatrixXd::Identity(ni, ni);
  minus_half_wstar_ = wstar_i_.mat - 0.5 * Eigen::MatrixXd::Identity(ni, ni);
}

Eigen::VectorXd PerturbedProblem::solve_coupling(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = j_lambda_lu_.solve(rhs);
  const double residual = (j_lambda_.mat * x - rhs).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10 * std::max(1.0, sup_norm(rhs)))) {
    std::ostringstream msg;
    msg << "weighted coupling operator solve left residual " << residual;
    throw LinearAlgebraError(msg.str());
  }
  return x;
}

Eigen::VectorXd PerturbedProblem::pack(const PerturbState& s) const {
  const int no = outer_size();
  const int ni = inner_size();
  if (s.mu_o.size() != no || s.eta_o.size() != ni || s.eta_i.size() != ni) {
    throw ConfigError("state component lengths do not match the discretization");
  }
  Eigen::VectorXd x(dof());
  x.segment(0, no) = s.mu_o;
  x.segment(no, ni) = s.eta_o;
  x.segment(no + ni, ni) = s.eta_i;
  return x;
}

PerturbState PerturbedProblem::unpack(const Eigen::VectorXd& x) const {
  const int no = outer_size();
  const int ni = inner_size();
  if (x.size() != dof()) throw ConfigError("packed state has the wrong length");
  PerturbState s;
  s.mu_o = x.segment(0, no);
  s.eta_o = x.segment(no, ni);
  s.eta_i = x.segment(no + ni, ni);
  return s;
}

PerturbState PerturbedProblem::zero_state() const {
  PerturbState s;
  s.mu_o = Eigen::VectorXd::Zero(outer_size());
  s.eta_o = Eigen::VectorXd::Zero(inner_size());
  s.eta_i = Eigen::VectorXd::Zero(inner_size());
  return s;
}

Eigen::VectorXd PerturbedProblem::inner_trace(const PerturbState& s) const {
  return (cross_w_oi_.apply(s.mu_o) + v_i_.apply(s.eta_i)) / lambda_;
}

std::array<Eigen::VectorXd, 3> PerturbedProblem::residual_blocks(double eps,
                                                                 const PerturbState& s) const {
  const Eigen::VectorXd trace = inner_trace(s);
  std::array<Eigen::VectorXd, 3> r;
  r[0] = half_w_o_->half_plus() * s.mu_o + cross_v_io_.apply(s.eta_o) - f_o_;
  r[1] = v_i_.apply(s.eta_o - s.eta_i) - eps * apply_superposition(phi_, *inner_, trace);
  r[2] = half_plus_wstar_ * s.eta_o - (minus_half_wstar_ * s.eta_i) / lambda_ +
         ((lambda_ - 1.0) / lambda_) * dnw_oi_.apply(s.mu_o) -
         apply_superposition(g_, *inner_, trace);
  return r;
}

Eigen::VectorXd PerturbedProblem::residual(double eps, const PerturbState& s) const {
  const auto blocks = residual_blocks(eps, s);
  const int no = outer_size();
  const int ni = inner_size();
  Eigen::VectorXd r(dof());
  r.segment(0, no) = blocks[0];
  r.segment(no, ni) = blocks[1];
  r.segment(no + ni, ni) = blocks[2];
  return r;
}

double PerturbedProblem::residual_norm(double eps, const PerturbState& s) const {
  return sup_norm(residual(eps, s));
}

Eigen::MatrixXd PerturbedProblem::jacobian(double eps, const PerturbState& s) const {
  const int no = outer_size();
  const int ni = inner_size();
  const Eigen::VectorXd trace = inner_trace(s);
  const Eigen::VectorXd phi_t = nodewise_dt(phi_, *inner_, trace);
  const Eigen::VectorXd g_t = nodewise_dt(g_, *inner_, trace);
  const Eigen::MatrixXd& a = cross_w_oi_.mat;  // outer double layer traced inside
  const Eigen::MatrixXd& v = v_i_.mat;

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dof(), dof());
  // Outer Dirichlet row: linear in (mu_o, eta_o).
  jac.block(0, 0, no, no) = half_w_o_->half_plus();
  jac.block(0, no, no, ni) = cross_v_io_.mat;
  // Single-layer matching row: V(eta_o - eta_i) - eps * Phi(trace).
  jac.block(no, 0, ni, no) = -(eps / lambda_) * (phi_t.asDiagonal() * a);
  jac.block(no, no, ni, ni) = v;
  jac.block(no, no + ni, ni, ni) = -v - (eps / lambda_) * (phi_t.asDiagonal() * v);
  // Flux row.
  jac.block(no + ni, 0, ni, no) =
      ((lambda_ - 1.0) / lambda_) * dnw_oi_.mat - (g_t.asDiagonal() * a) / lambda_;
  jac.block(no + ni, no, ni, ni) = half_plus_wstar_;
  jac.block(no + ni, no + ni, ni, ni) =
      -minus_half_wstar_ / lambda_ - (g_t.asDiagonal() * v) / lambda_;
  return jac;
}

PerturbState PerturbedProblem::solve_epsilon_zero(PicardReport* report) const {
  const SublinearCertificate cert = audit_sublinear(g_, *inner_);
  if (!cert.pass) {
    std::ostringstream msg;
    msg << "flux nonlinearity failed the sub-linear growth audit (exponent estimate "
        << cert.delta << "); the startup fixed-point argument needs |G(x,t)| <= C(1+|t|)^d, d < 1";
    throw ConfigError(msg.str());
  }

  const double theta = picard_options_.damping;
  const double tol = picard_options_.tolerance;
  const int ni = inner_size();
  const double beta_num = lambda_ / (lambda_ + 1.0);
  const double beta_cor = (lambda_ - 1.0) / (lambda_ + 1.0);

  // Constant part: the normal derivative of the eps-free outer harmonic field.
  const Eigen::VectorXd dn_f = dnw_oi_.apply(half_w_o_->solve(f_o_));

  PicardReport local;
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(ni);
  bool converged = false;
  for (int it = 1; it <= picard_options_.max_iterations; ++it) {
    const Eigen::VectorXd mu_o = half_w_o_->solve(f_o_ - cross_v_io_.apply(eta));
    const Eigen::VectorXd trace = (cross_w_oi_.apply(mu_o) + v_i_.apply(eta)) / lambda_;
    const Eigen::VectorXd rhs =
        beta_num * apply_superposition(g_, *inner_, trace) - beta_cor * dn_f;
    const Eigen::VectorXd eta_next = solve_coupling(rhs);

    const double res = sup_norm(eta_next - eta);
    local.iterations = it;
    local.final_residual = res;
    local.residual_history.push_back(res);
    if (!std::isfinite(res)) {
      local.diagnostic = "startup iteration produced a non-finite update";
      break;
    }
    if (res <= tol) {
      eta = eta_next;
      converged = true;
      break;
    }
    eta = (1.0 - theta) * eta + theta * eta_next;
    if (sup_norm(eta) > picard_options_.state_cap) {
      local.diagnostic = "startup density exceeded the sup-norm cap; the iteration is diverging";
      break;
    }
  }
  local.converged = converged;
  if (!converged && local.diagnostic.empty()) {
    std::ostringstream msg;
    msg << "startup fixed-point iteration stopped at residual " << local.final_residual
        << " after " << local.iterations << " iterations (tolerance " << tol << ")";
    local.diagnostic = msg.str();
  }
  if (report != nullptr) {
    *report = local;
  } else if (!converged) {
    throw ConvergenceError(local.diagnostic);
  }

  PerturbState s;
  s.mu_o = half_w_o_->solve(f_o_ - cross_v_io_.apply(eta));
  s.eta_o = eta;
  s.eta_i = eta;
  return s;
}

PerturbState PerturbedProblem::radial_seed(double t_i) const {
  if (!outer_->curve->is_circle() || !inner_->curve->is_circle()) {
    throw GeometryError("radial seeding needs concentric circles");
  }
  const Vec2 co = outer_->curve->center();
  const Vec2 ci = inner_->curve->center();
  const double offset = std::hypot(co.x - ci.x, co.y - ci.y);
  if (offset > 1e-12 * outer_->diameter()) {
    throw GeometryError("radial seeding needs concentric circles");
  }
  const double spread = f_o_.maxCoeff() - f_o_.minCoeff();
  if (spread > 1e-9 * std::max(1.0, sup_norm(f_o_))) {
    throw GeometryError("radial seeding needs constant outer Dirichlet data");
  }
  if (g_.parameter_dependent()) {
    throw GeometryError("radial seeding needs position-independent flux data");
  }
  const double g_val = g_.eval(0.0, t_i);
  PerturbState s;
  s.eta_o = Eigen::VectorXd::Constant(inner_size(), g_val);
  s.eta_i = s.eta_o;
  s.mu_o = half_w_o_->solve(f_o_ - cross_v_io_.apply(s.eta_o));
  return s;
}

BranchPoint PerturbedProblem::newton_solve(double eps, const PerturbState& initial,
                                           const NewtonOptions& opts) const {
  if (!(opts.tolerance > 0.0)) throw ConfigError("Newton tolerance must be positive");
  PerturbState s = initial;
  int used = 0;
  double rn = residual_norm(eps, s);
  bool converged = rn <= opts.tolerance;
  while (!converged && used < opts.max_iterations) {
    if (!std::isfinite(rn)) throw ConvergenceError("Newton residual became non-finite");
    const Eigen::MatrixXd jac = jacobian(eps, s);
    const Eigen::VectorXd r = residual(eps, s);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const Eigen::VectorXd delta = lu.solve(r);
    const double lin_res = (jac * delta - r).cwiseAbs().maxCoeff();
    if (!(lin_res <= 1e-10 * std::max(1.0, sup_norm(r)))) {
      std::ostringstream msg;
      msg << "singular Jacobian (near fold): linear solve left residual " << lin_res
          << " at eps=" << eps;
      throw LinearAlgebraError(msg.str());
    }
    const Eigen::VectorXd x = pack(s) - delta;
    s = unpack(x);
    ++used;
    if (s.sup_norm() > opts.state_cap) {
      std::ostringstream msg;
      msg << "Newton iterates diverged (state sup-norm " << s.sup_norm() << ") at eps=" << eps;
      throw ConvergenceError(msg.str());
    }
    rn = residual_norm(eps, s);
    converged = rn <= opts.tolerance;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "Newton did not reach tolerance " << opts.tolerance << " within "
        << opts.max_iterations << " iterations at eps=" << eps << " (residual " << rn << ")";
    throw ConvergenceError(msg.str());
  }

  BranchPoint bp;
  bp.eps = eps;
  bp.state = s;
  bp.iterations = used;
  bp.residual = rn;
  bp.sigma_min = smallest_singular_value(jacobian(eps, s));
  return bp;
}

ContinuationResult PerturbedProblem::continue_in_epsilon(const ContinuationOptions& opts) const {
  if (std::abs(opts.eps_start) > 1e-12) {
    throw ConfigError(
        "continuation without an explicit initial state starts at eps = 0 (startup solve)");
  }
  return continue_in_epsilon(opts, solve_epsilon_zero());
}

ContinuationResult PerturbedProblem::continue_in_epsilon(const ContinuationOptions& opts,
                                                         const PerturbState& initial) const {
  if (!(opts.initial_step > 0.0)) throw ConfigError("continuation step must be positive");
  if (!(opts.fold_step_fraction > 0.0 && opts.fold_step_fraction < 1.0)) {
    throw ConfigError("fold step fraction must lie in (0, 1)");
  }

  ContinuationResult result;
  std::mt19937 rng(opts.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double span = opts.eps_end - opts.eps_start;
  const double dir = span >= 0.0 ? 1.0 : -1.0;
  const double eps_scale = std::max({1.0, std::abs(opts.eps_start), std::abs(opts.eps_end)});
  const double eps_tol = 1e-12 * eps_scale;

  // Audit one random direction of the Jacobian against central differences
  // and track the flux-response slope; both feed the run diagnostics.
  bool gamma_warned = false;
  const auto audit_point = [&](const BranchPoint& bp) {
    const Eigen::VectorXd gt = gamma_tilde(bp.state);
    const double gmin = gt.size() > 0 ? gt.minCoeff() : 0.0;
    if (result.points.size() == 1 || gmin < result.gamma_tilde_min) result.gamma_tilde_min = gmin;
    if (gmin < 0.0 && !gamma_warned) {
      gamma_warned = true;
      std::ostringstream msg;
      msg << "flux-response slope went negative (min " << gmin << " at eps=" << bp.eps
          << "); the contraction analysis assumes it nonnegative - continuing anyway";
      result.warnings.push_back(msg.str());
    }
    if (!opts.fd_spot_check) return;
    Eigen::VectorXd delta(dof());
    for (int j = 0; j < delta.size(); ++j) delta[j] = gauss(rng);
    const double dn = delta.norm();
    if (dn == 0.0) return;
    delta /= dn;
    const double h = 1e-6;
    const Eigen::VectorXd x = pack(bp.state);
    const Eigen::VectorXd fwd = residual(bp.eps, unpack(x + h * delta));
    const Eigen::VectorXd bwd = residual(bp.eps, unpack(x - h * delta));
    const Eigen::VectorXd fd = (fwd - bwd) / (2.0 * h);
    const Eigen::VectorXd jd = jacobian(bp.eps, bp.state) * delta;
    const double rel = sup_norm(fd - jd) / std::max(1e-12, sup_norm(jd));
    if (rel > result.fd_check_max) result.fd_check_max = rel;
    if (rel > 1e-6) {
      std::ostringstream msg;
      msg << "Jacobian/finite-difference mismatch " << rel << " at eps=" << bp.eps
          << " exceeds 1e-6";
      result.warnings.push_back(msg.str());
    }
  };

  BranchPoint first = newton_solve(opts.eps_start, initial, opts.newton);
  result.points.push_back(first);
  audit_point(result.points.back());

  // Interior samples to land on exactly, then the endpoint.
  std::vector<double> targets;
  for (double t : opts.must_hit) {
    if ((t - opts.eps_start) * dir > eps_tol && (opts.eps_end - t) * dir > eps_tol) {
      targets.push_back(t);
    }
  }
  std::sort(targets.begin(), targets.end(),
            [dir](double a, double b) { return a * dir < b * dir; });
  targets.erase(std::unique(targets.begin(), targets.end(),
                            [eps_tol](double a, double b) { return std::abs(a - b) <= eps_tol; }),
                targets.end());
  if (std::abs(span) > eps_tol) targets.push_back(opts.eps_end);

  double h = opts.initial_step;
  double cur = opts.eps_start;
  std::size_t tidx = 0;
  int attempts = 0;
  bool stopped = false;

  while (tidx < targets.size() && !stopped) {
    if (++attempts > opts.max_steps) {
      std::ostringstream msg;
      msg << "continuation stopped after " << opts.max_steps << " corrector attempts at eps="
          << cur;
      result.warnings.push_back(msg.str());
      break;
    }
    const double target = targets[tidx];
    double next = cur + dir * h;
    if ((next - target) * dir >= -eps_tol) next = target;  // clamp, never overshoot

    bool accepted = false;
    std::string failure;
    try {
      const PerturbState& predictor = result.points.back().state;
      BranchPoint cand = newton_solve(next, predictor, opts.newton);
      const double jump =
          sup_norm(pack(cand.state) - pack(predictor)) / (1.0 + predictor.sup_norm());
      if (jump > opts.jump_guard) {
        std::ostringstream msg;
        msg << "corrector moved " << jump << " relative units at eps=" << next
            << ", beyond the branch-jump guard";
        failure = msg.str();
      } else {
        result.points.push_back(std::move(cand));
        accepted = true;
      }
    } catch (const LinearAlgebraError& e) {
      failure = e.what();
    } catch (const ConvergenceError& e) {
      failure = e.what();
    }

    if (accepted) {
      cur = next;
      audit_point(result.points.back());
      if (std::abs(cur - target) <= eps_tol) ++tidx;
      h = std::min(opts.initial_step, 2.0 * h);
      continue;
    }

    h *= 0.5;
    if (h < opts.fold_step_fraction * opts.initial_step) {
      const double sigma_last = result.points.back().sigma_min;
      const double sigma_first = result.points.front().sigma_min;
      const bool absolute = sigma_last < opts.fold_sigma;
      const bool collapsed = sigma_last < opts.fold_sigma_collapse * sigma_first;
      result.fold_detected = absolute || collapsed;
      result.fold_eps = result.points.back().eps;
      std::ostringstream msg;
      if (result.fold_detected) {
        msg << "fold declared at eps=" << result.fold_eps << ": step underflowed (h=" << h
            << " < " << opts.fold_step_fraction * opts.initial_step
            << ") and the smallest singular value " << sigma_last
            << (absolute ? " is below the absolute threshold " : " collapsed below ")
            << (absolute ? opts.fold_sigma : opts.fold_sigma_collapse * sigma_first)
            << " (branch started at " << sigma_first << "). Last corrector failure: " << failure;
      } else {
        msg << "step underflow at eps=" << result.fold_eps
            << " without singular-value collapse (sigma " << sigma_last << ", branch started at "
            << sigma_first << "); stopping without a fold flag. Last corrector failure: "
            << failure;
        result.warnings.push_back(msg.str());
      }
      result.fold_message = msg.str();
      stopped = true;
    }
  }

  result.reached_end = tidx == targets.size();
  result.final_step = h;
  result.sigma_first = result.points.front().sigma_min;
  result.sigma_last = result.points.back().sigma_min;
  return result;
}

double PerturbedProblem::interior_mean(const PerturbState& s) const {
  const Eigen::VectorXd trace = inner_trace(s);
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < inner_->node_count; ++j) {
    num += inner_->weight[j] * trace[j];
    den += inner_->weight[j];
  }
  return num / den;
}

Eigen::VectorXd PerturbedProblem::gamma_tilde(const PerturbState& s) const {
  return nodewise_dt(g_, *inner_, inner_trace(s));
}

double PerturbedProblem::uniqueness_probe(const BranchPoint& bp, double noise_magnitude,
                                          unsigned seed, const NewtonOptions& opts) const {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd x = pack(bp.state);
  Eigen::VectorXd noisy = x;
  for (int j = 0; j < noisy.size(); ++j) noisy[j] += noise_magnitude * unif(rng);
  const BranchPoint resolved = newton_solve(bp.eps, unpack(noisy), opts);
  return sup_norm(pack(resolved.state) - x);
}

FieldGrid PerturbedProblem::reconstruct(const PerturbState& s, const std::vector<Vec2>& points,
                                        double cutoff_rel) const {
  FieldEvaluator outer_eval(outer_);
  outer_eval.set_double_density(s.mu_o);
  FieldEvaluator inner_outer_side(inner_);
  inner_outer_side.set_single_density(s.eta_o);
  FieldEvaluator inner_inner_side(inner_);
  inner_inner_side.set_single_density(s.eta_i);

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
      sample.value = (outer_eval.double_layer(p) + inner_inner_side.single_layer(p)) / lambda_;
    } else {
      sample.value = outer_eval.double_layer(p) + inner_outer_side.single_layer(p);
    }
    grid.push_back(sample);
  }
  return grid;
}

}  // namespace annulus
