import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hazmon.budget import (SegmentVoronoi, allocate_budget, build_segment_voronoi, edge_budgets,
                           marginal_budget)
from hazmon.geometry import RectDomain, Segment, UniformGrid
from hazmon.routing import FleetSpec, NodeSet, Route, solve_vrp

DOM = RectDomain(0, 1000, 0, 1000)


def fake_sv(areas):
    edges = tuple(Segment((0.0, i), (1.0, i)) for i in range(len(areas)))
    return SegmentVoronoi(edges, UniformGrid(DOM, 2, 2), np.zeros(4, int), np.asarray(areas))


def test_single_edge_owns_domain():
    sv = build_segment_voronoi([Segment((100.0, 100.0), (900.0, 300.0))], DOM, 50)
    assert sv.areas[0] == DOM.area


def test_mirror_edges_split_evenly():
    edges = [Segment((200.0, 100.0), (200.0, 900.0)), Segment((800.0, 100.0), (800.0, 900.0))]
    sv = build_segment_voronoi(edges, DOM, 200)
    row = DOM.area / 200
    assert abs(sv.areas[0] - sv.areas[1]) <= row


def test_areas_stable_under_refinement(rng):
    for _ in range(5):
        pts = rng.uniform(100, 900, (3, 2, 2))
        edges = [Segment(a, b) for a, b in pts]
        coarse = build_segment_voronoi(edges, DOM, 200).areas
        fine = build_segment_voronoi(edges, DOM, 400).areas
        big = fine > 0.05 * DOM.area
        assert np.all(np.abs(coarse - fine)[big] <= 0.02 * fine[big])


def test_allocation_examples():
    assert np.allclose(allocate_budget(fake_sv([1.0, 1.0]), 5000).per_edge, [2500, 2500])
    got = allocate_budget(fake_sv(np.array([0.6, 0.3, 0.1]) * DOM.area), 5000).per_edge
    assert np.allclose(got, [3000, 1500, 500])
    with pytest.raises(ValueError):
        allocate_budget(fake_sv([1.0]), 0.0)


def route_from(depot, pts, cap):
    return solve_vrp(NodeSet(depot, pts), FleetSpec((cap,)))


def test_zero_margin_gives_edge_lengths():
    nodes = NodeSet((0.0, 0.0), [(300.0, 0.0), (300.0, 400.0)])
    r = solve_vrp(nodes, FleetSpec((1200.0,)))
    fleet = FleetSpec((r.total_length,))
    budgets, _ = edge_budgets(r, fleet, DOM)
    assert marginal_budget(r, fleet)[0] == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(budgets[0], [300.0, 400.0, 500.0])


def test_margin_split_by_area():
    r = route_from((500.0, 500.0), [(500.0, 800.0), (200.0, 500.0)], 5000.0)
    budgets, sv = edge_budgets(r, FleetSpec((5000.0,)), DOM)
    lengths = np.array([e.length for e in sv.edges])
    margin = 5000.0 - r.total_length
    assert np.allclose(budgets[0], lengths + margin * sv.areas / sv.areas.sum(), atol=1e-6)


def test_single_edge_gets_whole_margin():
    # a lone out-and-back is two edges on the same line; merge them by hand
    sv = build_segment_voronoi([Segment((0.0, 0.0), (10.0, 0.0))], DOM, 20)
    assert allocate_budget(sv, 700.0).per_edge[0] == 700.0


def test_budget_exceeding_route_rejected():
    r = route_from((0.0, 0.0), [(300.0, 400.0)], 1000.0)
    with pytest.raises(ValueError):
        marginal_budget(r, FleetSpec((900.0,)))


def test_conservation_on_random_routes(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 12))
        nv = int(rng.integers(1, 3))
        nodes = NodeSet((500.0, 500.0), rng.uniform(0, 1000, (n, 2)))
        fleet = FleetSpec.uniform(nv, 5000.0 / nv if nv > 1 else 5000.0)
        try:
            r = solve_vrp(nodes, fleet)
        except ValueError:
            continue
        budgets, sv = edge_budgets(r, fleet, DOM)
        for m, b in enumerate(budgets):
            worst = max(worst, abs(b.sum() - fleet.max_distance[m]))
        assert sv.counts.sum() == sv.grid.n_cells
        assert sv.areas.sum() == DOM.area
    assert worst <= 1e-6


@given(st.lists(st.floats(1.0, 1e6), min_size=2, max_size=8), st.integers(0, 7),
       st.floats(1.0, 100.0))
def test_allocation_monotone_in_area(areas, k, factor):
    k = k % len(areas)
    base = allocate_budget(fake_sv(areas), 5000.0).per_edge
    grown = list(areas)
    grown[k] *= factor
    after = allocate_budget(fake_sv(grown), 5000.0).per_edge
    assert after[k] >= base[k] - 1e-9
    assert after.sum() == pytest.approx(5000.0, abs=1e-6)
