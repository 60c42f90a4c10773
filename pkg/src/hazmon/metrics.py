"""Route coverage metrics on a uniform grid: edge coverage ratio and edge density variance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import RectDomain, Segment, UniformGrid, point_segment_distance

METRIC_RESOLUTION = 50


@dataclass(frozen=True)
class CoverageReport:
    ecr: float
    edv: float
    counts: np.ndarray   # (ny, nx) number of edges crossing each cell
    grid: UniformGrid


def metrics_grid(domain: RectDomain, n: int = METRIC_RESOLUTION) -> UniformGrid:
    return UniformGrid(domain, n, n)


def _clip_to_band(a, b, lo, hi):
    """Parameter interval of segment ``a->b`` with ``lo <= y <= hi`` (closed), or None."""
    ay, by = a[1], b[1]
    dy = by - ay
    if dy == 0.0:
        return (0.0, 1.0) if lo <= ay <= hi else None
    t1, t2 = (lo - ay) / dy, (hi - ay) / dy
    tmin, tmax = max(0.0, min(t1, t2)), min(1.0, max(t1, t2))
    return (tmin, tmax) if tmin <= tmax else None


def edge_cells(edge: Segment, grid: UniformGrid) -> np.ndarray:
    """Flat indices of all grid cells the segment touches (closed cells).

    The segment is clipped to each grid row in turn; the x-extent of the
    clipped piece gives the column range directly.
    """
    a = np.asarray(edge.a)
    b = np.asarray(edge.b)
    dom = grid.domain
    dx, dy = grid.dx, grid.dy
    y_lo, y_hi = min(a[1], b[1]), max(a[1], b[1])
    if y_hi < dom.y_min or y_lo > dom.y_max:
        return np.zeros(0, dtype=int)
    r0 = max(0, math.ceil((y_lo - dom.y_min) / dy) - 1)
    r1 = min(grid.ny - 1, math.floor((y_hi - dom.y_min) / dy))
    cells = []
    for r in range(r0, r1 + 1):
        band = _clip_to_band(a, b, dom.y_min + r * dy, dom.y_min + (r + 1) * dy)
        if band is None:
            continue
        xa = a[0] + band[0] * (b[0] - a[0])
        xb = a[0] + band[1] * (b[0] - a[0])
        x_lo, x_hi = min(xa, xb), max(xa, xb)
        if x_hi < dom.x_min or x_lo > dom.x_max:
            continue
        c0 = max(0, math.ceil((x_lo - dom.x_min) / dx) - 1)
        c1 = min(grid.nx - 1, math.floor((x_hi - dom.x_min) / dx))
        cells.extend(r * grid.nx + c for c in range(c0, c1 + 1))
    return np.unique(np.array(cells, dtype=int))


def edge_counts(edges: Sequence[Segment], grid: UniformGrid) -> np.ndarray:
    counts = np.zeros(grid.n_cells, dtype=int)
    for e in edges:
        counts[edge_cells(e, grid)] += 1
    return counts.reshape(grid.ny, grid.nx)


def coverage_from_counts(counts: np.ndarray, grid: UniformGrid) -> CoverageReport:
    x = counts.ravel().astype(float)
    ecr = float(np.count_nonzero(x)) / x.size
    edv = float(np.mean((x - x.mean()) ** 2))
    return CoverageReport(ecr, edv, counts, grid)


def edge_coverage(edges: Sequence[Segment], grid: UniformGrid) -> CoverageReport:
    """ECR (fraction of cells crossed by any edge) and EDV (population variance
    of per-cell edge counts)."""
    return coverage_from_counts(edge_counts(edges, grid), grid)


def cell_center_coverage(edges: Sequence[Segment], grid: UniformGrid) -> float:
    """Rasterized ECR: a cell counts when an edge passes within its inscribed circle.

    Always a lower bound on :func:`edge_coverage`'s ECR.
    """
    if len(edges) == 0:
        return 0.0
    r = 0.5 * min(grid.dx, grid.dy)
    hit = np.zeros(grid.n_cells, dtype=bool)
    for e in edges:
        hit |= np.asarray(point_segment_distance(grid.centers, e)) <= r
    return float(hit.mean())
