import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hazmon.geometry import RectDomain, Segment, point_segment_distance
from hazmon.metrics import cell_center_coverage, edge_cells, edge_coverage, metrics_grid

DOM = RectDomain(0, 1000, 0, 1000)
GRID = metrics_grid(DOM)


def brute_cells(edge, grid, n=200_001):
    # dense points along the edge, plus exact ties at cell borders handled by
    # snapping each point to every cell whose closed box contains it
    t = np.linspace(0, 1, n)[:, None]
    pts = np.asarray(edge.a) + t * (np.asarray(edge.b) - np.asarray(edge.a))
    fx = (pts[:, 0] - grid.domain.x_min) / grid.dx
    fy = (pts[:, 1] - grid.domain.y_min) / grid.dy
    cells = set()
    for cx in (np.floor(fx), np.ceil(fx) - 1):
        for cy in (np.floor(fy), np.ceil(fy) - 1):
            ok = ((cx >= 0) & (cx < grid.nx) & (cy >= 0) & (cy < grid.ny)
                  & (fx >= cx) & (fx <= cx + 1) & (fy >= cy) & (fy <= cy + 1))
            cells.update((cy[ok] * grid.nx + cx[ok]).astype(int).tolist())
    return cells


def test_no_edges():
    rep = edge_coverage([], GRID)
    assert rep.ecr == 0.0 and rep.edv == 0.0


def test_full_row_edge():
    rep = edge_coverage([Segment((0.0, 510.0), (1000.0, 510.0))], GRID)
    assert rep.ecr == pytest.approx(0.02)
    assert rep.edv == pytest.approx(0.02 * 0.98)


def test_edge_cells_match_dense_sampling(rng):
    for _ in range(30):
        a, b = rng.uniform(0, 1000, (2, 2))
        e = Segment(a, b)
        assert set(edge_cells(e, GRID).tolist()) >= brute_cells(e, GRID, 20_001)
        # every reported cell is within the segment's reach
        for c in edge_cells(e, GRID):
            r, q = divmod(int(c), GRID.nx)
            box_center = np.array([(q + 0.5) * GRID.dx, (r + 0.5) * GRID.dy])
            assert point_segment_distance(box_center, e) <= np.hypot(GRID.dx, GRID.dy) / 2 + 1e-9


segs = st.tuples(st.floats(0, 1000), st.floats(0, 1000), st.floats(0, 1000), st.floats(0, 1000))


@given(st.lists(segs, min_size=1, max_size=6), segs)
def test_adding_edge_never_reduces_ecr_and_raster_is_lower_bound(base, extra):
    edges = [Segment((a, b), (c, d)) for a, b, c, d in base if np.hypot(a - c, b - d) > 1e-3]
    more = edges + [Segment((extra[0], extra[1]), (extra[2], extra[3]))] \
        if np.hypot(extra[0] - extra[2], extra[1] - extra[3]) > 1e-3 else edges
    before = edge_coverage(edges, GRID).ecr
    assert edge_coverage(more, GRID).ecr >= before
    assert cell_center_coverage(edges, GRID) <= before
