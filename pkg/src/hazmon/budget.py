"""Segment-Voronoi partition of the domain and per-edge path budgets.

Every grid cell is attributed to the route edge nearest its center. An edge's
share of the domain area decides its share of the vehicle's spare distance
(the marginal budget); the planner receives the edge's own length plus that
share, so each edge can at least be flown straight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import RectDomain, Segment, UniformGrid, distances_to_segments, segment_endpoints
from .routing import FleetSpec, Route, vehicle_edges

DEFAULT_RESOLUTION = 200


@dataclass(frozen=True)
class SegmentVoronoi:
    edges: tuple[Segment, ...]
    grid: UniformGrid
    assignment: np.ndarray   # per-cell nearest-edge index
    areas: np.ndarray        # per-edge area in m^2
    counts: np.ndarray | None = None   # per-edge number of grid cells (exact)

    def cell_mask(self, k: int) -> np.ndarray:
        return self.assignment == k

    def bounding_box(self, k: int) -> tuple[float, float, float, float] | None:
        """Box around the grid cells assigned to edge ``k`` (None if it owns none)."""
        mask = self.cell_mask(k)
        if not mask.any():
            return None
        c = self.grid.centers[mask]
        hx, hy = 0.5 * self.grid.dx, 0.5 * self.grid.dy
        return (c[:, 0].min() - hx, c[:, 0].max() + hx, c[:, 1].min() - hy, c[:, 1].max() + hy)


@dataclass(frozen=True)
class BudgetAllocation:
    total: float
    per_edge: np.ndarray


def nearest_edge(points, edges: Sequence[Segment]) -> np.ndarray:
    """Index of the closest edge for each point; ties go to the lowest index."""
    a, b = segment_endpoints(edges)
    out = np.empty(len(points), dtype=int)
    for lo in range(0, len(points), 8192):
        d = distances_to_segments(points[lo:lo + 8192], a, b)
        out[lo:lo + 8192] = np.argmin(d, axis=1)   # argmin returns first minimum
    return out


def build_segment_voronoi(edges: Sequence[Segment], domain: RectDomain,
                          grid_resolution: int | tuple[int, int] = DEFAULT_RESOLUTION
                          ) -> SegmentVoronoi:
    if len(edges) == 0:
        raise ValueError("segment Voronoi needs at least one edge")
    nx, ny = (grid_resolution, grid_resolution) if np.isscalar(grid_resolution) else grid_resolution
    grid = UniformGrid(domain, int(nx), int(ny))
    assignment = nearest_edge(grid.centers, edges)
    counts = np.bincount(assignment, minlength=len(edges))
    areas = counts * grid.cell_area
    return SegmentVoronoi(tuple(edges), grid, assignment, areas, counts)


def allocate_budget(sv: SegmentVoronoi, total: float) -> BudgetAllocation:
    """Split ``total`` across edges in proportion to their Voronoi areas."""
    if not total > 0:
        raise ValueError("budget must be positive")
    return BudgetAllocation(float(total), _proportional(sv.areas, total))


def _proportional(areas: np.ndarray, total: float) -> np.ndarray:
    areas = np.asarray(areas, dtype=float)
    s = areas.sum()
    if not s > 0:
        raise ValueError("edges own no area; cannot allocate")
    return total * areas / s


def marginal_budget(route: Route, fleet: FleetSpec) -> np.ndarray:
    """Distance left per vehicle after flying its route: ``D_m - length_m``."""
    margin = np.array(fleet.max_distance) - np.array(route.lengths)
    if np.any(margin < -1e-9):
        raise ValueError(f"route exceeds a vehicle budget (margins {margin})")
    return np.maximum(margin, 0.0)


def edge_budgets(route: Route, fleet: FleetSpec, domain: RectDomain,
                 grid_resolution: int = DEFAULT_RESOLUTION,
                 sv: SegmentVoronoi | None = None) -> tuple[list[np.ndarray], SegmentVoronoi]:
    """Per-vehicle lists of planner budgets, one per route edge.

    Edge ``e`` of vehicle ``m`` gets ``len(e) + margin_m * A_e / sum(A)`` where
    the area sum runs over vehicle ``m``'s edges, so each vehicle's budgets add
    up to its distance cap. A vehicle whose edges own no area at all spreads
    its margin by edge length instead.
    """
    per_vehicle = vehicle_edges(route)
    flat = [e for edges in per_vehicle for e in edges]
    if sv is None:
        sv = build_segment_voronoi(flat, domain, grid_resolution)
    margins = marginal_budget(route, fleet)
    out = []
    start = 0
    for m, edges in enumerate(per_vehicle):
        areas = sv.areas[start:start + len(edges)]
        lengths = np.array([e.length for e in edges])
        weights = areas if areas.sum() > 0 else lengths
        budgets = lengths + _proportional(weights, margins[m]) if margins[m] > 0 else lengths.copy()
        # absorb rounding so the vehicle total is exactly its cap
        budgets[np.argmax(budgets)] += fleet.max_distance[m] - budgets.sum()
        out.append(budgets)
        start += len(edges)
    return out, sv
