#include <doctest.h>

#include <cmath>
#include <random>

#include "annulus/errors.hpp"
#include "annulus/perturbation_solver.hpp"
#include "annulus/radial_oracle.hpp"
#include "support.hpp"

using namespace annulus;
using testsupport::benchmark_t_o;

namespace {

// Perturbed benchmark: u_o = lambda u_i + eps Phi(u_i) with lambda = 1/2,
// Phi(t) = t^3 - 2t^2 + t/2 + 1, unit flux term. At eps = 0 the inner
// value is exactly 2; the branch folds at (t, eps) = (1, 1).
PerturbedProblem benchmark_perturbed(int nodes) {
  auto outer = discretize(Curve::circle({0.0, 0.0}, 2.0), nodes);
  auto inner = discretize(Curve::circle({0.0, 0.0}, 0.75), nodes);
  Eigen::VectorXd f_o = Eigen::VectorXd::Constant(nodes, benchmark_t_o());
  auto phi = ScalarBC::polynomial({1.0, 0.5, -2.0, 1.0});
  auto g = ScalarBC::constant(1.0);
  return PerturbedProblem(outer, inner, std::move(f_o), 0.5, phi, g);
}

RadialProblem radial_reference(double eps) {
  RadialProblem p;
  p.dimension = 2;
  p.outer_radius = 2.0;
  p.inner_radius = 0.75;
  p.t_o = benchmark_t_o();
  p.lambda = 0.5;
  p.eps = eps;
  p.phi = ScalarBC::polynomial({1.0, 0.5, -2.0, 1.0});
  p.g = ScalarBC::constant(1.0);
  p.f = ScalarBC::polynomial({0.0, 1.0});  // unused by the small-root form
  return p;
}

PerturbState noised(const PerturbState& s, double amp, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  PerturbState out = s;
  for (int j = 0; j < out.mu_o.size(); ++j) out.mu_o[j] += u(gen);
  for (int j = 0; j < out.eta_o.size(); ++j) out.eta_o[j] += u(gen);
  for (int j = 0; j < out.eta_i.size(); ++j) out.eta_i[j] += u(gen);
  return out;
}

}  // namespace

TEST_CASE("pack and unpack are inverse") {
  auto prob = benchmark_perturbed(16);
  std::mt19937 gen(7u);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd x(prob.dof());
  for (int j = 0; j < x.size(); ++j) x[j] = n(gen);
  CHECK((prob.pack(prob.unpack(x)) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("startup solve recovers the linear-problem value") {
  auto prob = benchmark_perturbed(64);
  PicardReport report;
  auto state = prob.solve_epsilon_zero(&report);
  CHECK(report.converged);
  const Eigen::VectorXd u_i = prob.inner_trace(state);
  CHECK((u_i.array() - 2.0).abs().maxCoeff() < 1e-6);
  CHECK(prob.interior_mean(state) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(prob.residual_norm(0.0, state) < 1e-8);
}

TEST_CASE("radial seed satisfies the full residual at the exact root") {
  auto prob = benchmark_perturbed(64);
  // 0.5 * 2 + ratio = t_o exactly, so t = 2 solves the eps = 0 problem
  auto seed = prob.radial_seed(2.0);
  CHECK(prob.residual_norm(0.0, seed) < 1e-8);
  CHECK(prob.interior_mean(seed) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("analytic Jacobian agrees with central differences") {
  auto prob = benchmark_perturbed(32);
  auto base = prob.solve_epsilon_zero();
  std::mt19937 gen(2024u);
  std::normal_distribution<double> n(0.0, 1.0);

  for (double eps : {0.0, 0.3}) {
    for (int trial = 0; trial < 2; ++trial) {
      Eigen::VectorXd x = prob.pack(base);
      for (int j = 0; j < x.size(); ++j) x[j] += 0.1 * n(gen);
      const PerturbState s = prob.unpack(x);
      const Eigen::MatrixXd J = prob.jacobian(eps, s);

      Eigen::VectorXd d(x.size());
      for (int j = 0; j < d.size(); ++j) d[j] = n(gen);
      d.normalize();
      const double h = 1e-5;
      const Eigen::VectorXd fd =
          (prob.residual(eps, prob.unpack(x + h * d)) -
           prob.residual(eps, prob.unpack(x - h * d))) /
          (2.0 * h);
      const Eigen::VectorXd jd = J * d;
      const double rel =
          (jd - fd).cwiseAbs().maxCoeff() / std::max(1.0, jd.cwiseAbs().maxCoeff());
      CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("Newton corrector lands on the radial oracle root") {
  auto prob = benchmark_perturbed(64);
  const double eps = 0.3;
  RadialRootOptions ropt;
  auto roots = radial_small_roots(radial_reference(eps), ropt);
  REQUIRE(roots.size() == 1);

  auto seed = prob.radial_seed(2.0);
  auto bp = prob.newton_solve(eps, noised(seed, 1e-2, 99u));
  CHECK(bp.eps == eps);
  CHECK(bp.residual <= NewtonOptions{}.tolerance);
  CHECK(bp.iterations <= NewtonOptions{}.max_iterations);
  CHECK(bp.sigma_min > 1e-3);
  CHECK(prob.interior_mean(bp.state) == doctest::Approx(roots[0]).epsilon(1e-8));
}

TEST_CASE("continuation tracks the branch to an interior target") {
  auto prob = benchmark_perturbed(64);
  ContinuationOptions opts;
  opts.eps_end = 0.5;
  opts.must_hit = {0.25};
  auto result = prob.continue_in_epsilon(opts);

  REQUIRE(result.reached_end);
  CHECK_FALSE(result.fold_detected);
  CHECK(result.warnings.empty());
  CHECK(result.fd_check_max < 1e-6);
  CHECK(result.gamma_tilde_min >= -1e-12);  // constant flux term: slope zero
  CHECK(result.sigma_first > 1e-3);
  CHECK(result.sigma_last > 1e-3);

  REQUIRE(!result.points.empty());
  const auto& last = result.points.back();
  CHECK(last.eps == doctest::Approx(0.5).epsilon(1e-15));
  auto roots = radial_small_roots(radial_reference(0.5), {});
  REQUIRE(roots.size() == 1);
  CHECK(prob.interior_mean(last.state) == doctest::Approx(roots[0]).epsilon(1e-7));

  // the must-hit sample is present
  bool hit = false;
  for (const auto& p : result.points)
    if (std::abs(p.eps - 0.25) < 1e-14) hit = true;
  CHECK(hit);
}

TEST_CASE("continuation detects the fold near eps = 1") {
  auto prob = benchmark_perturbed(64);
  ContinuationOptions opts;
  opts.eps_end = 1.2;
  auto result = prob.continue_in_epsilon(opts);

  CHECK_FALSE(result.reached_end);
  REQUIRE(result.fold_detected);
  CHECK(result.fold_eps >= 0.95);
  CHECK(result.fold_eps <= 1.05);
  CHECK(!result.fold_message.empty());
  CHECK(result.final_step < opts.fold_step_fraction * opts.initial_step);
  // interior value approaches the tangency state t = 1
  CHECK(prob.interior_mean(result.points.back().state) ==
        doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("re-solve after noise returns to the same branch point") {
  auto prob = benchmark_perturbed(64);
  ContinuationOptions opts;
  opts.eps_end = 0.4;
  auto result = prob.continue_in_epsilon(opts);
  REQUIRE(result.reached_end);

  for (const auto& bp : result.points) {
    if (bp.sigma_min < 1e-3) continue;
    const double dist = prob.uniqueness_probe(bp, 1e-3, 31u);
    CHECK(dist <= 10.0 * NewtonOptions{}.tolerance);
  }
}

TEST_CASE("flux-response monitor is zero for a constant flux term") {
  auto prob = benchmark_perturbed(32);
  auto state = prob.solve_epsilon_zero();
  CHECK(prob.gamma_tilde(state).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inner curve with unit logarithmic capacity is rejected") {
  auto outer = discretize(Curve::circle({0.0, 0.0}, 2.0), 32);
  auto inner = discretize(Curve::circle({0.0, 0.0}, 1.0), 32);
  Eigen::VectorXd f_o = Eigen::VectorXd::Constant(32, 1.0);
  CHECK_THROWS_AS(PerturbedProblem(outer, inner, std::move(f_o), 0.5,
                                   ScalarBC::constant(0.0), ScalarBC::constant(1.0)),
                  CapacityError);
}

TEST_CASE("Newton reports divergence from a hopeless start") {
  auto prob = benchmark_perturbed(32);
  PerturbState wild = prob.zero_state();
  wild.mu_o.setConstant(1e7);
  wild.eta_o.setConstant(-1e7);
  wild.eta_i.setConstant(1e7);
  NewtonOptions tight;
  tight.max_iterations = 4;
  CHECK_THROWS_AS(prob.newton_solve(0.5, wild, tight), ConvergenceError);
}
