#include <doctest.h>

#include <cmath>
#include <random>

#include "annulus/errors.hpp"
#include "annulus/transmission_solver.hpp"
#include "support.hpp"

using namespace annulus;
using testsupport::benchmark_t_o;
using testsupport::benchmark_u_o_at_1;

namespace {

// Two-phase benchmark: concentric circles r = 0.75, R = 2, cubic
// transmission map F(t) = t^3 - 2t^2 + t + 1, unit flux term, constant
// outer data chosen so the scalar reduction is t (t - 1)^2 = 0.
TransmissionProblem benchmark_problem(int nodes, TransmissionOptions opts = {}) {
  auto outer = discretize(Curve::circle({0.0, 0.0}, 2.0), nodes);
  auto inner = discretize(Curve::circle({0.0, 0.0}, 0.75), nodes);
  Eigen::VectorXd f_o = Eigen::VectorXd::Constant(nodes, benchmark_t_o());
  auto F = ScalarBC::polynomial({1.0, 1.0, -2.0, 1.0});
  auto G = ScalarBC::constant(1.0);
  return TransmissionProblem(outer, inner, std::move(f_o), F, G, opts);
}

DensityState add_noise(const DensityState& s, double amp, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  DensityState out = s;
  for (int j = 0; j < out.mu_o.size(); ++j) out.mu_o[j] += u(gen);
  for (int j = 0; j < out.mu.size(); ++j) out.mu[j] += u(gen);
  for (int j = 0; j < out.eta.size(); ++j) out.eta[j] += u(gen);
  return out;
}

}  // namespace

TEST_CASE("radial seeds are fixed points of the map") {
  auto prob = benchmark_problem(64);
  for (double t_i : {0.0, 1.0}) {
    auto seed = prob.radial_seed(t_i);
    auto res = prob.residuals(seed);
    for (double r : res) CHECK(std::abs(r) < 1e-6);  // observed ~1e-14
    CHECK(prob.interior_mean(seed) == doctest::Approx(t_i).epsilon(1e-10));
  }
}

TEST_CASE("two distinct branches from the two radial seeds") {
  auto prob = benchmark_problem(64);

  auto [s0, r0] = prob.solve(prob.radial_seed(0.0));
  REQUIRE(r0.converged);
  auto [s1, r1] = prob.solve(prob.radial_seed(1.0));
  REQUIRE(r1.converged);

  const Eigen::VectorXd u0 = prob.trace_u_i(s0);
  const Eigen::VectorXd u1 = prob.trace_u_i(s1);
  CHECK(u0.cwiseAbs().maxCoeff() < 1e-6);
  CHECK((u1.array() - 1.0).abs().maxCoeff() < 1e-6);

  // same outer trace on the unit circle for both branches
  for (const auto* s : {&s0, &s1}) {
    auto grid = prob.reconstruct(*s, {Vec2{1.0, 0.0}, Vec2{0.0, -1.0}});
    REQUIRE(grid.size() == 2);
    for (const auto& sample : grid) {
      CHECK(sample.region == Region::Annulus);
      CHECK(sample.value == doctest::Approx(benchmark_u_o_at_1()).epsilon(1e-6));
    }
  }

  // outer Dirichlet data is met
  const Eigen::VectorXd outer_trace = prob.trace_u_o_outer(s0);
  CHECK((outer_trace.array() - benchmark_t_o()).abs().maxCoeff() < 1e-8);

  // interface trace satisfies the transmission map u_o = F(u_i)
  const Eigen::VectorXd inner_o = prob.trace_u_o_inner(s1);
  for (int j = 0; j < inner_o.size(); ++j)
    CHECK(inner_o[j] == doctest::Approx(1.0).epsilon(1e-6));  // F(1) = 1
}

TEST_CASE("zero seed converges to the stable branch") {
  auto prob = benchmark_problem(64);
  auto [state, report] = prob.solve(prob.zero_state());
  REQUIRE(report.converged);
  CHECK(report.iterations < 200);
  CHECK(prob.interior_mean(state) == doctest::Approx(0.0).epsilon(1e-8));
  REQUIRE(!report.residual_history.empty());
  CHECK(report.residual_history.back() < report.residual_history.front());
  CHECK(report.residual_history.back() <= prob.options().tolerance);
}

TEST_CASE("perturbed seed returns to its branch") {
  auto prob = benchmark_problem(64);
  auto noisy = add_noise(prob.radial_seed(0.0), 1e-2, 42u);
  auto [state, report] = prob.solve(noisy);
  REQUIRE(report.converged);
  CHECK(prob.interior_mean(state) == doctest::Approx(0.0).epsilon(1e-8));
  auto res = prob.residuals(state);
  for (double r : res) CHECK(std::abs(r) <= prob.options().tolerance);
}

TEST_CASE("density extraction from traces reproduces the state") {
  auto prob = benchmark_problem(64);
  auto [state, report] = prob.solve(prob.radial_seed(1.0));
  REQUIRE(report.converged);
  auto back = prob.re_extract(state);
  CHECK((back.mu_o - state.mu_o).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((back.mu - state.mu).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((back.eta - state.eta).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("weak form of the flux jump holds against bump tests") {
  auto prob = benchmark_problem(96);
  auto [state, report] = prob.solve(prob.radial_seed(0.0));
  REQUIRE(report.converged);

  SUBCASE("bump straddling the interface") {
    RadialBump bump;
    bump.center = {0.0, 0.0};
    bump.radius = 1.5;
    bump.power = 3;
    const double edge = 1.0 - (0.75 * 0.75) / (1.5 * 1.5);
    bump.scale = 1.0 / (edge * edge * edge);  // phi = 1 on the interface
    auto wp = prob.weak_flux_pairing(state, bump);
    CHECK(wp.rhs ==
          doctest::Approx(2.0 * testsupport::kPi * 0.75).epsilon(1e-10));
    CHECK(std::abs(wp.lhs - wp.rhs) < 1e-3);  // observed ~1e-13
  }

  SUBCASE("bump supported away from the interface sees no jump") {
    RadialBump bump;
    bump.center = {1.375, 0.0};
    bump.radius = 0.3;
    bump.power = 3;
    bump.scale = 1.0;
    auto wp = prob.weak_flux_pairing(state, bump);
    CHECK(std::abs(wp.rhs) < 1e-12);
    CHECK(std::abs(wp.lhs) < 1e-3);  // observed ~1e-15
  }
}

TEST_CASE("reconstruction matches the radial profile and guards regions") {
  auto prob = benchmark_problem(64);
  auto [state, report] = prob.solve(prob.radial_seed(1.0));
  REQUIRE(report.converged);

  auto grid = prob.reconstruct(
      state, {Vec2{0.0, 0.0}, Vec2{0.3, 0.2}, Vec2{1.4, 0.0}, Vec2{0.0, 1.2}});
  REQUIRE(grid.size() == 4);
  CHECK(grid[0].region == Region::Inner);
  CHECK(grid[0].value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(grid[1].region == Region::Inner);
  CHECK(grid[1].value == doctest::Approx(1.0).epsilon(1e-6));

  // annulus values agree with the one-dimensional profile
  // u_o(|x|) = t_o - (log(R) - log(|x|)) * r * g(t_i)  [slope r from flux]
  auto radial_value = [&](double rho) {
    return benchmark_t_o() - 0.75 * (std::log(2.0) - std::log(rho));
  };
  CHECK(grid[2].value == doctest::Approx(radial_value(1.4)).epsilon(1e-8));
  CHECK(grid[3].value == doctest::Approx(radial_value(1.2)).epsilon(1e-8));

  CHECK_THROWS_AS(prob.reconstruct(state, {Vec2{3.0, 0.0}}), std::domain_error);
  CHECK_THROWS_AS(prob.reconstruct(state, {Vec2{0.75001, 0.0}}), NearFieldError);
}

TEST_CASE("iteration reports a stall instead of looping forever") {
  TransmissionOptions opts;
  opts.max_iterations = 5;  // deliberately too few from the zero seed
  auto prob = benchmark_problem(32, opts);
  auto [state, report] = prob.solve(prob.zero_state());
  CHECK_FALSE(report.converged);
  CHECK(!report.diagnostic.empty());
  (void)state;
}
