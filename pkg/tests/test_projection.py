import math
from dataclasses import replace

import numpy as np
import pytest

from _gen import random_master, random_pair
from beamcpp.curves import CircleArc, Helix, HermiteSpline, Line
from beamcpp.errors import AmbiguousProjectionError, ProjectionError
from beamcpp.projection import (
    Multiplicity,
    SolverSettings,
    bilateral_cpp,
    brute_force_oracle,
    tube_surface_cpp,
    unilateral_cpp,
)

X, Y, Z = np.eye(3)


def brute_point_distance(x, curve, n=10_000):
    ts = np.linspace(curve.t_lo, curve.t_hi, n, endpoint=not curve.periodic)
    d = np.linalg.norm(curve.points(ts) - x, axis=1)
    return ts, d


def test_unilateral_foot_of_perpendicular():
    rep = unilateral_cpp([0, 0, 5], Line([0, 0, 0], X, -3.0, 3.0))
    assert rep.kind == Multiplicity.UNIQUE
    s = rep.solutions[0]
    assert s.t2 == pytest.approx(0.0, abs=1e-14)
    assert s.kinematics.d == pytest.approx(5.0, abs=1e-14)
    assert s.residual < 1e-12


def test_unilateral_circle_center_is_continuum():
    rep = unilateral_cpp([0, 0, 0], CircleArc(np.zeros(3), 1.5, X, Y))
    assert rep.kind == Multiplicity.CONTINUUM
    assert all(s.kinematics.d == pytest.approx(1.5, abs=1e-14) for s in rep.solutions)


def test_unilateral_outside_circle_rejects_maximum():
    rbar = 1.5
    circle = CircleArc(np.zeros(3), rbar, X, Y)
    x = np.array([2 * rbar, 0, 0])
    rep = unilateral_cpp(x, circle)
    assert rep.kind == Multiplicity.UNIQUE
    s = rep.solutions[0]
    ts, d = brute_point_distance(x, circle)
    assert s.t2 == pytest.approx(ts[np.argmin(d)], abs=1e-12)
    assert s.kinematics.d == pytest.approx(d.min(), abs=1e-12)
    assert s.kinematics.d == pytest.approx(rbar, abs=1e-14)
    assert any(r.t2 == pytest.approx(math.pi, abs=1e-9) for r in rep.rejected)


@pytest.mark.parametrize("seed", range(25))
def test_unilateral_matches_dense_sampling(seed):
    rng = np.random.default_rng(seed)
    curve, x = random_master(rng)
    rep = unilateral_cpp(x, curve)
    ts, d = brute_point_distance(x, curve)
    best = rep.best
    assert best.kinematics.d == pytest.approx(d.min(), abs=1e-6)
    assert best.kinematics.d <= d.min() + 1e-12


def test_unilateral_failure_is_reported():
    # one crippled Newton step per start, and the foot lies outside every sign-change bracket
    bad = SolverSettings(n_start=2, max_newton_iter=1, max_fallback_iter=0, accept_tol=1e-300,
                         newton_tol=1e-300)
    arc = CircleArc(np.zeros(3), 1.0, X, Y, 0.0, 3.0)
    x = 2.0 * np.array([math.cos(0.1), math.sin(0.1), 0.0])
    with pytest.raises(ProjectionError):
        unilateral_cpp(x, arc, bad)


def test_bilateral_skew_lines():
    rep = bilateral_cpp(Line([0, 0, 0], X, -1, 1), Line([0, 0, 1], Y, -1, 1))
    assert rep.kind == Multiplicity.UNIQUE
    s = rep.solutions[0]
    np.testing.assert_allclose(s.x1, [0, 0, 0], atol=1e-14)
    np.testing.assert_allclose(s.x2, [0, 0, 1], atol=1e-14)
    assert s.kinematics.d == pytest.approx(1.0, abs=1e-14)
    assert math.degrees(s.kinematics.alpha) == pytest.approx(90.0)
    assert s.kinematics.normal == pytest.approx((0.0, 0.0, -1.0))
    assert brute_force_oracle(Line([0, 0, 0], X, -1, 1), Line([0, 0, 1], Y, -1, 1)).kind == \
        Multiplicity.UNIQUE


def test_bilateral_parallel_lines_continuum():
    a, b = Line([0, 0, 0], X, 0, 10), Line([0, 0, 2], X, 0, 10)
    for rep in (bilateral_cpp(a, b), brute_force_oracle(a, b)):
        assert rep.kind == Multiplicity.CONTINUUM
        d = [s.kinematics.d for s in rep.solutions]
        assert max(d) - min(d) < 1e-12 * 2.0


def test_bilateral_helix_axis_continuum():
    helix = Helix(np.zeros(3), Z, 2.0, 14.0)
    axis = Line([0, 0, 0], Z, -50.0, 140.0)
    rep = bilateral_cpp(axis, helix)
    assert rep.kind == Multiplicity.CONTINUUM
    assert rep.best.kinematics.d == pytest.approx(2.0, abs=1e-12)


def test_bilateral_circle_axis_continuum():
    axis = Line([0, 0, 0], Z, -4.0, 4.0)
    circle = CircleArc(np.zeros(3), 2.0, X, Y)
    for rep in (bilateral_cpp(axis, circle), brute_force_oracle(axis, circle)):
        assert rep.kind == Multiplicity.CONTINUUM
        assert rep.spread < 1e-9 * 2.0


def test_bilateral_multiple_minima():
    # a wave-shaped spline over a straight line dips to it twice
    spline = HermiteSpline([[0, 0, 2], [1, 0, 1], [2, 0, 2], [3, 0, 1], [4, 0, 2]],
                           [[1, 0, 0]] * 5)
    line = Line([-1, 0, 0], X, 0.0, 6.0)
    newton = bilateral_cpp(spline, line)
    oracle = brute_force_oracle(spline, line)
    assert newton.kind == oracle.kind == Multiplicity.MULTIPLE
    assert [(s.t1, s.t2) for s in newton.solutions] == [(1.0, 2.0), (3.0, 4.0)]
    for a, b in zip(newton.solutions, oracle.solutions):
        assert (a.t1, a.t2) == pytest.approx((b.t1, b.t2), abs=1e-6)


def test_minimum_at_an_interval_end_is_boundary():
    spline = HermiteSpline([[0, 0, 1], [1, 0, 2], [2, 0, 1], [3, 0, 2]], [[1, 0, 0]] * 4)
    line = Line([-1, 0, 0], X, 0.0, 5.0)
    newton = bilateral_cpp(spline, line)
    assert newton.kind == brute_force_oracle(spline, line).kind == Multiplicity.UNIQUE
    assert any(s.t1 == 0.0 for s in newton.boundary_solutions)


def test_boundary_solutions_flagged():
    # lines that would meet beyond their ends
    a, b = Line([0, 0, 0], X, 0, 1), Line([3, 0, 1], Y, 0, 1)
    rep = bilateral_cpp(a, b)
    assert rep.kind == Multiplicity.BOUNDARY
    assert rep.boundary_solutions and all(s.boundary for s in rep.boundary_solutions)
    assert brute_force_oracle(a, b).kind == Multiplicity.BOUNDARY


@pytest.mark.parametrize("seed", range(10))
def test_bilateral_interior_solutions_are_stationary(seed):
    slave, master = random_pair(np.random.default_rng(100 + seed))
    rep = bilateral_cpp(slave, master)
    for s in rep.solutions:
        assert s.residual < 1e-9
        assert s.hessian_min > 0


def test_workers_do_not_change_results():
    slave, master = random_pair(np.random.default_rng(3))
    base = SolverSettings()
    one = bilateral_cpp(slave, master, base)
    many = bilateral_cpp(slave, master, replace(base, workers=4))
    assert one == many
    helix = Helix(np.zeros(3), Z, 2.0, 14.0)
    axis = Line([0, 0, 0], Z, -50.0, 140.0)
    assert bilateral_cpp(axis, helix, base) == bilateral_cpp(axis, helix, replace(base, workers=3))


def test_tube_surface_around_line():
    s = tube_surface_cpp([0, 0, 5], Line([0, 0, 0], X, -2, 2), 1.0)
    np.testing.assert_allclose(s.x2, [0, 0, 1], atol=1e-14)
    assert s.kinematics.gap == pytest.approx(4.0, abs=1e-14)


def test_tube_surface_at_circle_center_is_ambiguous():
    with pytest.raises(AmbiguousProjectionError):
        tube_surface_cpp([0, 0, 0], CircleArc(np.zeros(3), 1.0, X, Y), 0.2)


def test_tube_surface_on_centerline_is_ambiguous():
    with pytest.raises(AmbiguousProjectionError):
        tube_surface_cpp([0.5, 0, 0], Line([0, 0, 0], X, -2, 2), 0.2)


def test_oracle_requires_samples():
    with pytest.raises(ValueError):
        brute_force_oracle(Line([0, 0, 0], X), Line([0, 0, 1], Y), 50)
