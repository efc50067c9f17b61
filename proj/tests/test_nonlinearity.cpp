#include <doctest.h>

#include <cmath>

#include "annulus/errors.hpp"
#include "annulus/geometry.hpp"
#include "annulus/nonlinearity.hpp"
#include "support.hpp"

using namespace annulus;

TEST_CASE("polynomial evaluation and derivative") {
  auto bc = ScalarBC::polynomial({1.0, 1.0, -2.0, 1.0});  // 1 + t - 2t^2 + t^3
  CHECK(bc.eval(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(bc.eval(0.3, 1.0) == doctest::Approx(1.0));
  CHECK(bc.eval(0.0, 2.0) == doctest::Approx(3.0));
  CHECK(bc.eval_dt(0.0, 2.0) == doctest::Approx(1.0 - 8.0 + 12.0));
  const double h = 1e-6;
  CHECK(bc.eval_dt(0.0, 0.7) ==
        doctest::Approx((bc.eval(0.0, 0.7 + h) - bc.eval(0.0, 0.7 - h)) / (2.0 * h))
            .epsilon(1e-8));
  CHECK_FALSE(bc.parameter_dependent());
  CHECK(bc.degree() == 3);
}

TEST_CASE("trigonometric coefficient modulation") {
  auto bc = ScalarBC::polynomial({0.0, 1.0});  // t
  TrigSeries mod;
  mod.cos_coef = {0.5, 0.25};  // 0.5 + 0.25 cos s added to coefficient 1
  bc.modulate_coefficient(1, mod);
  CHECK(bc.parameter_dependent());
  const double s = 1.1, t = 2.0;
  const double c1 = 1.0 + 0.5 + 0.25 * std::cos(s);
  CHECK(bc.eval(s, t) == doctest::Approx(c1 * t).epsilon(1e-14));
  CHECK(bc.eval_dt(s, t) == doctest::Approx(c1).epsilon(1e-14));
  auto coeffs = bc.coefficients_at(s);
  CHECK(coeffs[1] == doctest::Approx(c1).epsilon(1e-14));
}

TEST_CASE("superposition applies the map nodewise") {
  auto b = discretize(Curve::circle({0.0, 0.0}, 1.5), 16);
  auto bc = ScalarBC::polynomial({0.0, 0.0, 1.0});  // t^2
  Eigen::VectorXd f(16);
  for (int j = 0; j < 16; ++j) f[j] = j * 0.1;
  const Eigen::VectorXd out = apply_superposition(bc, *b, f);
  for (int j = 0; j < 16; ++j) CHECK(out[j] == doctest::Approx(f[j] * f[j]).epsilon(1e-14));
}

TEST_CASE("polynomial root finder: sign changes and tangential touches") {
  // t (t-1)^2 = t^3 - 2 t^2 + t
  const std::vector<double> cubic{0.0, 1.0, -2.0, 1.0};
  // without a touch tolerance every reported value is a genuine root and the
  // sign-change root is always among them (the tangential root at 1 may or
  // may not be hit exactly by the monotone-piece subdivision)
  auto plain = poly_real_roots(cubic, -10.0, 10.0);
  REQUIRE(!plain.empty());
  CHECK(plain[0] == doctest::Approx(0.0).epsilon(1e-10));
  for (double r : plain)
    CHECK(std::abs(testsupport::poly_eval(cubic, r)) < 1e-9);
  // with a touch tolerance the double root is contractually included
  auto with_touch = poly_real_roots(cubic, -10.0, 10.0, 1e-8);
  REQUIRE(with_touch.size() == 2);
  CHECK(with_touch[0] == doctest::Approx(0.0));
  CHECK(with_touch[1] == doctest::Approx(1.0).epsilon(1e-6));

  // three simple roots
  auto three = poly_real_roots({-6.0, 11.0, -6.0, 1.0}, 0.0, 10.0);
  REQUIRE(three.size() == 3);
  CHECK(three[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(three[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(three[2] == doctest::Approx(3.0).epsilon(1e-12));

  // no roots in the window
  CHECK(poly_real_roots({1.0, 0.0, 1.0}, -5.0, 5.0).empty());
}

TEST_CASE("pointwise inversion of t + F(x,t)") {
  auto b = discretize(Curve::circle({0.0, 0.0}, 1.0), 32);
  auto F = ScalarBC::polynomial({1.0, 1.0, -2.0, 1.0});
  // t + F is strictly increasing (derivative 3t^2 - 4t + 2 > 0)
  Eigen::VectorXd t_true(32), rhs(32);
  for (int j = 0; j < 32; ++j) {
    t_true[j] = -2.0 + 4.0 * j / 31.0;
    rhs[j] = t_true[j] + F.eval(b->param[j], t_true[j]);
  }
  const Eigen::VectorXd t_rec = invert_id_plus_F(F, *b, rhs);
  CHECK((t_rec - t_true).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("inversion rejects non-injective maps") {
  auto b = discretize(Curve::circle({0.0, 0.0}, 1.0), 8);
  // t + F = t^3 - 3t: three crossings of level 1 inside [-t_max, t_max]
  auto F = ScalarBC::polynomial({0.0, -4.0, 0.0, 1.0});
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(8);
  CHECK_THROWS_AS(invert_id_plus_F(F, *b, rhs), NonInvertibleError);
}

TEST_CASE("growth audit accepts the benchmark pair and rejects a linear-growth G") {
  auto b = discretize(Curve::circle({0.0, 0.0}, 0.75), 32);
  auto F = ScalarBC::polynomial({1.0, 1.0, -2.0, 1.0});
  auto G1 = ScalarBC::constant(1.0);
  auto cert = audit_growth(F, G1, *b);
  CHECK(cert.pass);
  CHECK(cert.superlinear_F);
  CHECK(cert.dominated_G);
  CHECK(cert.delta1 > 1.0);
  CHECK(cert.delta2 < 1.0);

  // G growing like F itself is not dominated (delta2 would need 1)
  auto bad = audit_growth(F, F, *b);
  CHECK_FALSE(bad.pass);

  // linear F is not superlinear
  auto lin = audit_growth(ScalarBC::polynomial({0.0, 1.0}), G1, *b);
  CHECK_FALSE(lin.superlinear_F);
}

TEST_CASE("sublinear audit for the perturbed flux term") {
  auto b = discretize(Curve::circle({0.0, 0.0}, 0.75), 32);
  CHECK(audit_sublinear(ScalarBC::constant(1.0), *b).pass);
  CHECK(audit_sublinear(ScalarBC::constant(-3.5), *b).pass);
  CHECK_FALSE(audit_sublinear(ScalarBC::polynomial({0.0, 1.0}), *b).pass);
  CHECK_FALSE(audit_sublinear(ScalarBC::polynomial({0.0, 0.0, 0.5}), *b).pass);
}
