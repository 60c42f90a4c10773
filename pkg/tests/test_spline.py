import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import Delaunay

from hazmon.spline import (SplinePath, basis_matrix, fit_to_polyline, polyline_length,
                           sample_times, straight_spline, uniform_knots)
from hazmon.sim import lawnmower_path


def cox_de_boor(i, k, t, knots):
    """Textbook recursion, one basis function at a time."""
    if k == 0:
        return 1.0 if knots[i] <= t < knots[i + 1] else 0.0
    out = 0.0
    if knots[i + k] > knots[i]:
        out += (t - knots[i]) / (knots[i + k] - knots[i]) * cox_de_boor(i, k - 1, t, knots)
    if knots[i + k + 1] > knots[i + 1]:
        out += ((knots[i + k + 1] - t) / (knots[i + k + 1] - knots[i + 1])
                * cox_de_boor(i + 1, k - 1, t, knots))
    return out


def random_path(rng, n=9, k=3, tf=20.0):
    return SplinePath(rng.uniform(-50, 50, (n, 2)), 0.0, tf, k)


def test_constant_and_collinear_control_points():
    p = SplinePath(np.tile([3.0, -2.0], (7, 1)), 0.0, 5.0)
    t = np.linspace(0, 5, 50)
    assert np.allclose(p.eval(t), [3.0, -2.0], atol=1e-12)
    vel, _ = p.derivatives(t)
    assert np.allclose(vel, 0.0, atol=1e-12)
    line = SplinePath(np.column_stack([np.arange(7.0), 2 * np.arange(7.0)]), 0.0, 5.0)
    pts = line.eval(t)
    assert np.allclose(pts[:, 1], 2 * pts[:, 0], atol=1e-10)


def test_eval_matches_recursive_oracle(rng):
    p = random_path(rng)
    ts = rng.uniform(p.t0, p.tf, 100)
    oracle = np.array([[cox_de_boor(i, p.k, t, p.knots) for i in range(p.n_ctrl)] for t in ts])
    assert np.max(np.abs(oracle @ p.control_points - p.eval(ts))) <= 1e-10


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_partition_of_unity(k):
    knots = uniform_knots(0.0, 7.0, 12, k)
    B = basis_matrix(knots, k, np.linspace(0.0, 7.0, 1000))
    assert np.max(np.abs(B.sum(axis=1) - 1.0)) <= 1e-12


def test_derivatives_match_central_differences(rng):
    h = 1e-5
    for _ in range(10):
        p = random_path(rng)
        ts = rng.uniform(p.t0 + 0.01, p.tf - 0.01, 50)
        vel, acc = p.derivatives(ts)
        fd_v = (p.eval(ts + h) - p.eval(ts - h)) / (2 * h)
        fd_a = (p.derivatives(ts + h)[0] - p.derivatives(ts - h)[0]) / (2 * h)
        assert np.max(np.linalg.norm(fd_v - vel, axis=1) / np.linalg.norm(vel, axis=1)) <= 1e-5
        assert np.max(np.linalg.norm(fd_a - acc, axis=1)
                      / np.maximum(np.linalg.norm(acc, axis=1), 1.0)) <= 1e-5


def test_straight_line_kinematics():
    p = straight_spline((0.0, 0.0), (50.0, 0.0), 10.0)
    for s in p.kinematics(np.linspace(0, 10, 7)):
        assert s.v == pytest.approx(5.0) and s.u == pytest.approx(0.0, abs=1e-12)
        assert s.kappa == pytest.approx(0.0, abs=1e-12)
    vel, _ = p.derivatives(np.linspace(0, 10, 7))
    assert np.allclose(vel, [5.0, 0.0])


def test_circle_curvature_and_identity():
    R = 80.0
    theta = np.linspace(0, np.pi, 400)
    arc = np.column_stack([R * np.cos(theta), R * np.sin(theta)])
    p = fit_to_polyline(arc, 3, 30, 20.0)
    ks = p.kinematics(np.linspace(2, 18, 40))
    for s in ks:
        assert abs(s.kappa) == pytest.approx(1 / R, rel=0.02)
        assert s.kappa * s.v == pytest.approx(s.u, rel=1e-12, abs=1e-15)


def test_arc_length_straight_10m(rng):
    for _ in range(20):
        a = rng.uniform(-100, 100, 2)
        ang = rng.uniform(0, 2 * np.pi)
        b = a + 10.0 * np.array([np.cos(ang), np.sin(ang)])
        p = straight_spline(a, b, rng.uniform(0.5, 5.0), int(rng.integers(4, 12)))
        assert abs(p.arc_length() - 10.0) <= 1e-6


def test_arc_length_dense_chord_oracle(rng):
    p = random_path(rng)
    pts = p.eval(np.linspace(p.t0, p.tf, 1_000_000))
    chord = np.linalg.norm(np.diff(pts, axis=0), axis=1).sum()
    assert abs(p.arc_length() - chord) / chord < 1e-5


def test_polyline_spline_longer_than_chord():
    p = fit_to_polyline([(0, 0), (50, 40), (100, 0)], 3, 8, 10.0)
    assert p.arc_length() >= 100.0


def test_fit_to_polyline_examples():
    p = fit_to_polyline([(0.0, 0.0), (30.0, 40.0)], 3, 8, 5.0)
    assert p.arc_length() == pytest.approx(50.0, rel=1e-3)
    assert np.allclose(p.eval(0.0), [0, 0], atol=1e-9)
    assert np.allclose(p.eval(5.0), [30, 40], atol=1e-9)
    lm = lawnmower_path((0.0, 0.0), (300.0, 0.0), 1500.0, 33.93)
    fit = fit_to_polyline(lm, 3, 200, 100.0, n_samples=4000)
    assert fit.arc_length() == pytest.approx(polyline_length(lm), rel=0.02)
    assert np.allclose(fit.eval(100.0), lm[-1], atol=1e-9)


def test_sample_times_cover_horizon():
    t = sample_times(0.0, 1.05, 0.1)
    assert t[0] == 0.0 and t[-1] == 1.05 and len(t) == 12
    assert np.max(np.diff(t)) <= 0.1 + 1e-12


def test_times_outside_horizon_rejected():
    with pytest.raises(ValueError):
        straight_spline((0, 0), (1, 0), 1.0).eval(1.5)


@given(st.integers(0, 10_000), st.integers(0, 8))
def test_local_support(seed, i):
    rng = np.random.default_rng(seed)
    p = random_path(rng)
    cp = p.control_points.copy()
    cp[i] += rng.normal(size=2)
    q = p.with_control_points(cp)
    ts = np.linspace(p.t0, p.tf, 500)
    changed = np.any(np.abs(q.eval(ts) - p.eval(ts)) > 0, axis=1)
    lo, hi = p.knots[i], p.knots[i + p.k + 1]
    assert np.all((ts[changed] >= lo) & (ts[changed] <= hi))


@given(st.integers(0, 10_000), st.floats(0.0, 1.0))
def test_convex_hull(seed, frac):
    rng = np.random.default_rng(seed)
    p = random_path(rng)
    t = p.t0 + frac * p.duration
    B = p.basis(t)[0]
    active = p.control_points[B > 0]
    if len(active) < 3:
        return
    hull = Delaunay(active)
    point = p.eval(t)
    assert hull.find_simplex(point, tol=1e-9) >= 0
