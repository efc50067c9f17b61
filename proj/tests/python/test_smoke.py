"""End-to-end smoke tests of the Python bindings."""
import math

import numpy as np
import pytest

import annulus_bem as ab

T_O = 1.0 + 0.75 * math.log(8.0 / 3.0)


def make_boundaries(n=64):
    outer = ab.discretize(ab.Curve.circle(0.0, 0.0, 2.0), n)
    inner = ab.discretize(ab.Curve.circle(0.0, 0.0, 0.75), n)
    return outer, inner


def benchmark_problem(n=64):
    outer, inner = make_boundaries(n)
    f_o = np.full(n, T_O)
    transmission = ab.ScalarBC.polynomial([1.0, 1.0, -2.0, 1.0])
    flux = ab.ScalarBC.constant(1.0)
    return ab.TransmissionProblem(outer, inner, f_o, transmission, flux)


def test_geometry_round_trip():
    curve = ab.Curve.circle(0.0, 0.0, 0.75)
    assert curve.is_circle
    assert curve.diameter == pytest.approx(1.5)
    assert curve.contains(0.1, 0.2)
    assert not curve.contains(1.0, 0.0)

    boundary = ab.discretize(curve, 32)
    assert boundary.node_count == 32
    assert boundary.perimeter == pytest.approx(1.5 * math.pi, rel=1e-12)
    pts = boundary.nodes
    assert pts.shape == (32, 2)
    assert np.allclose(np.hypot(pts[:, 0], pts[:, 1]), 0.75)
    assert boundary.weights.sum() == pytest.approx(1.5 * math.pi, rel=1e-12)


def test_odd_node_count_rejected():
    with pytest.raises(ab.GeometryError):
        ab.discretize(ab.Curve.circle(0.0, 0.0, 1.0), 9)


def test_scalar_bc():
    cubic = ab.ScalarBC.polynomial([1.0, 1.0, -2.0, 1.0])
    assert cubic(0.0, 2.0) == pytest.approx(3.0)
    assert cubic.eval_dt(0.0, 2.0) == pytest.approx(5.0)
    assert ab.ScalarBC.constant(4.0)(1.3, -7.0) == pytest.approx(4.0)


def test_general_solver_two_branches():
    prob = benchmark_problem()

    state0, report0 = prob.solve(prob.zero_state())
    assert report0.converged
    assert prob.interior_mean(state0) == pytest.approx(0.0, abs=1e-8)

    state1, report1 = prob.solve(prob.radial_seed(1.0))
    assert report1.converged
    assert prob.interior_mean(state1) == pytest.approx(1.0, abs=1e-8)
    trace = prob.trace_u_i(state1)
    assert np.max(np.abs(trace - 1.0)) < 1e-6

    samples = prob.reconstruct(state1, [(1.0, 0.0), (0.0, 0.0)])
    x, y, region, value = samples[0]
    assert region == "annulus"
    assert value == pytest.approx(T_O - 0.75 * math.log(2.0), abs=1e-8)
    assert samples[1][2] == "inner"
    assert samples[1][3] == pytest.approx(1.0, abs=1e-6)


def test_perturbed_branch_and_fold():
    n = 64
    outer, inner = make_boundaries(n)
    f_o = np.full(n, T_O)
    phi = ab.ScalarBC.polynomial([1.0, 0.5, -2.0, 1.0])
    flux = ab.ScalarBC.constant(1.0)
    prob = ab.PerturbedProblem(outer, inner, f_o, 0.5, phi, flux)

    eps0 = prob.solve_epsilon_zero()
    assert prob.interior_mean(eps0) == pytest.approx(2.0, abs=1e-6)
    assert prob.residual_norm(0.0, eps0) < 1e-8

    result = prob.continue_in_epsilon(eps_end=0.5, must_hit=[0.5])
    assert result.reached_end
    assert not result.fold_detected
    last = result.points[-1]
    assert last.eps == pytest.approx(0.5)
    # closed-form value: root of t^3 - 2 t^2 + 1.5 t - 1
    assert prob.interior_mean(last.state) == pytest.approx(1.4406197, abs=1e-5)


def test_radial_oracle():
    p = ab.RadialProblem()
    p.outer_radius = 2.0
    p.inner_radius = 0.75
    p.t_o = T_O
    p.f = ab.ScalarBC.polynomial([1.0, 1.0, -2.0, 1.0])
    p.g = ab.ScalarBC.constant(1.0)
    assert p.ratio() == pytest.approx(0.75 * math.log(8.0 / 3.0), rel=1e-14)

    roots = ab.radial_roots(p, detect_tangential=True)
    assert len(roots) == 2
    assert roots[0] == pytest.approx(0.0, abs=1e-9)
    assert roots[1] == pytest.approx(1.0, abs=1e-6)

    assert ab.radial_outer_field(p, roots[0], 2.0) == pytest.approx(T_O)
    assert ab.gamma_fundamental(2, 1.0) == pytest.approx(0.0)
    assert ab.gamma_fundamental(3, 1.0) == pytest.approx(-1.0 / (4 * math.pi))


def test_capacity_guard():
    unit = ab.discretize(ab.Curve.circle(0.0, 0.0, 1.0), 64)
    assert abs(ab.equilibrium_constant(unit)) < 1e-10

    small = ab.discretize(ab.Curve.circle(0.0, 0.0, 0.75), 64)
    assert ab.equilibrium_constant(small) == pytest.approx(
        0.75 * math.log(0.75), abs=1e-10)

    outer = ab.discretize(ab.Curve.circle(0.0, 0.0, 2.0), 64)
    f_o = np.full(64, 1.0)
    with pytest.raises(ab.CapacityError):
        ab.PerturbedProblem(outer, unit, f_o, 0.5,
                            ab.ScalarBC.constant(0.0), ab.ScalarBC.constant(1.0))
