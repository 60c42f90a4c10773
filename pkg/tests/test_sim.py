from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from hazmon.budget import edge_budgets
from hazmon.geometry import RectDomain
from hazmon.hazard import HazardField, HazardParams, detect_prob
from hazmon.optimizer import (EdgePlanningProblem, KinematicBounds, PlannerConfig,
                              cell_grid_points, objective_gamma)
from hazmon.routing import FleetSpec, route_edges, vehicle_edges
from hazmon.sim import (ScenarioSpec, _end_velocities, build_routes, detect_with_thresholds,
                        generate_scenario, lawnmower_path, lawnmower_spline,
                        miss_log_probability, plan_route, run_pipeline, straight_path,
                        traverse_and_detect)
from hazmon.spline import polyline_length, straight_spline

PARAMS = HazardParams()
SPEC = ScenarioSpec()


def test_scenario_determinism_and_counts():
    spec = replace(SPEC, n_known=5, n_unknown=50)
    a, b = generate_scenario(spec, 42), generate_scenario(spec, 42)
    assert np.array_equal(a.known, b.known) and np.array_equal(a.unknown, b.unknown)
    assert a.n_pseudo == b.n_pseudo and a.detect_seed == b.detect_seed
    assert a.known.shape == (5, 2) and a.unknown.shape == (50, 2)
    assert np.all(a.domain.contains(a.known)) and np.all(a.domain.contains(a.unknown))
    assert not np.array_equal(generate_scenario(spec, 43).known, a.known)


def test_known_nodes_uniform():
    spec = replace(SPEC, n_known=5, n_unknown=0)
    pts = np.vstack([generate_scenario(spec, s).known for s in range(2000)])
    counts = np.histogram2d(pts[:, 0], pts[:, 1], bins=10, range=[[0, 1000], [0, 1000]])[0]
    assert stats.chisquare(counts.ravel()).pvalue > 0.01


def test_count_ranges_inclusive():
    seen = {generate_scenario(replace(SPEC, n_unknown=0), s).n_known for s in range(300)}
    assert seen == set(range(5, 16))


def test_lawnmower_examples():
    straight = lawnmower_path((0, 0), (100, 0), 100.0, 33.93)
    assert np.array_equal(straight, [[0, 0], [100, 0]])
    with pytest.raises(ValueError):
        lawnmower_path((0, 0), (100, 0), 50.0, 33.93)
    assert PARAMS.rung_spacing == pytest.approx(33.93, abs=5e-3)


@given(st.floats(20, 800), st.floats(1.0, 6.0), st.floats(0, 2 * np.pi))
def test_lawnmower_length(L, stretch, ang):
    end = L * np.array([np.cos(ang), np.sin(ang)])
    pts = lawnmower_path((0.0, 0.0), end, L * stretch, PARAMS.rung_spacing)
    assert polyline_length(pts) == pytest.approx(L * stretch, rel=0.01)
    assert np.allclose(pts[0], 0) and np.allclose(pts[-1], end)


def test_lawnmower_spline_meets_budget():
    for budget in (450.0, 900.0, 1600.0):
        p = lawnmower_spline((100.0, 100.0), (400.0, 300.0), budget, PARAMS)
        assert p.arc_length() == pytest.approx(budget, rel=1e-6)


def test_traverse_no_hazards_and_sure_detection():
    path = straight_spline((0.0, 0.0), (100.0, 0.0), 10.0)
    found, samples = traverse_and_detect(path, np.zeros((0, 2)), PARAMS, 1)
    assert len(found) == 0 and len(samples) == len(path.sample_times(PARAMS.delta_s))
    found, samples = traverse_and_detect(path, samples[[5]], PARAMS, 2)
    assert list(found) == [0]


def test_detection_rate_matches_analytic_expectation():
    path = straight_spline((0.0, 0.0), (60.0, 0.0), 6.0)
    hazards = np.array([[30.0, 25.0], [10.0, 40.0], [70.0, 30.0]])
    samples = path.eval(path.sample_times(PARAMS.delta_s))
    expected = 1 - np.prod(1 - detect_prob(samples[:, None], hazards[None], PARAMS.beta_sense),
                           axis=0)
    rng = np.random.default_rng(5)
    n = 10_000
    hits = np.zeros(3)
    for _ in range(n):
        found, _ = traverse_and_detect(path, hazards, PARAMS, rng)
        hits[found] += 1
    sigma = np.sqrt(n * expected * (1 - expected))
    assert np.all(np.abs(hits - n * expected) <= 3 * sigma)


def test_threshold_detection_has_bernoulli_rate():
    log_miss = np.log(np.array([0.9, 0.5, 0.2]))
    rng = np.random.default_rng(9)
    n = 20_000
    hits = np.zeros(3)
    for _ in range(n):
        hits[detect_with_thresholds(log_miss, rng.random(3))] += 1
    p = 1 - np.exp(log_miss)
    assert np.all(np.abs(hits - n * p) <= 4 * np.sqrt(n * p * (1 - p)))


def test_miss_log_probability_matches_product():
    rng = np.random.default_rng(1)
    s = rng.uniform(0, 100, (30, 2))
    h = rng.uniform(0, 100, (4, 2))
    want = np.log(np.prod(1 - detect_prob(s[:, None], h[None], PARAMS.beta_sense), axis=0))
    assert np.allclose(miss_log_probability(s, h, PARAMS), want, rtol=1e-12)


@pytest.fixture(scope="module")
def small_scenario():
    spec = replace(SPEC, n_known=5, n_pseudo=1)
    return generate_scenario(spec, 3)


def test_pipeline_smoke(small_scenario):
    sc = small_scenario
    rows = run_pipeline(sc, trial=0)
    by = {r.method: r for r in rows}
    assert set(by) == {"original", "node-cvt", "edge-cvt", "optimized", "lawnmower", "straight"}
    _, route = build_routes(sc)
    assert by["straight"].path_length == pytest.approx(route.total_length, rel=1e-6)
    for m in ("optimized", "lawnmower"):
        assert by[m].path_length <= sc.total_budget * 1.005
    for r in rows:
        assert 0 <= r.discovered <= len(sc.unknown)


def test_samples_accumulate_in_route_order(small_scenario):
    sc = small_scenario
    _, route = build_routes(sc)
    cfg = PlannerConfig()
    plans = plan_route(route, sc, "optimized", cfg)
    budgets, sv = edge_budgets(route, sc.fleet, sc.domain)
    v0, vf = _end_velocities(vehicle_edges(route)[0], cfg.nominal_speed(KinematicBounds()))
    field = HazardField(sc.known, sc.params)
    for i, p in enumerate(plans):
        # recompute each edge's objective from the union of earlier samples
        prob = EdgePlanningProblem(p.edge.a, p.edge.b, v0[i], vf[i], p.budget,
                                   cell_grid_points(sv, i), field, KinematicBounds())
        if p.gamma is not None:
            assert objective_gamma(p.path, prob) == pytest.approx(p.gamma, abs=1e-12)
        field = field.with_samples(p.samples)
    assert field.n_samples == sum(len(p.samples) for p in plans)
    assert sum(p.budget for p in plans) == pytest.approx(sc.fleet.max_distance[0], abs=1e-6)


def test_zero_margin_planned_path_is_straight():
    sc = generate_scenario(replace(SPEC, n_known=4, n_pseudo=0), 8)
    original, route = build_routes(sc)
    assert route is original
    sc = replace(sc, fleet=FleetSpec((route.total_length,)), total_budget=route.total_length)
    opt = plan_route(route, sc, "optimized")
    st_ = plan_route(route, sc, "straight")
    for a, b in zip(opt, st_):
        L = a.edge.length
        assert a.path.arc_length() <= L * 1.005
        ts = np.linspace(a.path.t0, a.path.tf, 200)
        d = a.path.eval(ts) - np.asarray(a.edge.a)
        u = a.edge.direction
        assert np.max(np.abs(d[:, 0] * u[1] - d[:, 1] * u[0])) <= 0.1 * L
        assert np.allclose(a.path.eval(a.path.tf), b.path.eval(b.path.tf), atol=0.5)


def test_unknown_method_rejected(small_scenario):
    with pytest.raises(ValueError):
        run_pipeline(small_scenario, ["zigzag"])
