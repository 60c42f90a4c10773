"""Planar primitives: points, segments, rectangular domains and uniform grids.

Points are plain length-2 float arrays (or ``(N, 2)`` arrays for sets of
points). Segments and domains are small frozen dataclasses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ON_SEGMENT_TOL = 1e-9


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise ValueError(f"expected a 2-D point, got shape {np.shape(p)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point coordinates must be finite, got {arr}")
    return arr


def as_points(ps) -> np.ndarray:
    """Coerce to an ``(N, 2)`` float array (``N`` may be zero)."""
    arr = np.asarray(ps, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2))
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


@dataclass(frozen=True)
class Segment:
    a: tuple[float, float]
    b: tuple[float, float]

    def __post_init__(self):
        a = tuple(float(v) for v in as_point(self.a))
        b = tuple(float(v) for v in as_point(self.b))
        if a == b:
            raise ValueError(f"zero-length segment at {a}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return float(np.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1]))

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.a) + np.asarray(self.b))

    @property
    def direction(self) -> np.ndarray:
        """Unit vector from ``a`` to ``b``."""
        return (np.asarray(self.b) - np.asarray(self.a)) / self.length


@dataclass(frozen=True)
class RectDomain:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("domain bounds must be finite")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate domain {vals}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max)])

    def contains(self, pts, tol: float = 0.0) -> np.ndarray | bool:
        arr = np.asarray(pts, dtype=float)
        x, y = arr[..., 0], arr[..., 1]
        inside = ((x >= self.x_min - tol) & (x <= self.x_max + tol)
                  & (y >= self.y_min - tol) & (y <= self.y_max + tol))
        return bool(inside) if inside.ndim == 0 else inside

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.random((n, 2))
        return np.column_stack([self.x_min + u[:, 0] * self.width,
                                self.y_min + u[:, 1] * self.height])


@dataclass(frozen=True)
class UniformGrid:
    """``nx`` by ``ny`` equal cells tiling a rectangular domain.

    Cells are numbered row-major: cell ``iy * nx + ix``.
    """

    domain: RectDomain
    nx: int
    ny: int
    centers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one cell per axis")
        xs = self.domain.x_min + (np.arange(self.nx) + 0.5) * self.dx
        ys = self.domain.y_min + (np.arange(self.ny) + 0.5) * self.dy
        gx, gy = np.meshgrid(xs, ys)
        centers = np.column_stack([gx.ravel(), gy.ravel()])
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)

    @property
    def dx(self) -> float:
        return self.domain.width / self.nx

    @property
    def dy(self) -> float:
        return self.domain.height / self.ny

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def cell_area(self) -> float:
        return self.domain.area / self.n_cells

    def x_edges(self) -> np.ndarray:
        return self.domain.x_min + np.arange(self.nx + 1) * self.dx

    def y_edges(self) -> np.ndarray:
        return self.domain.y_min + np.arange(self.ny + 1) * self.dy


def project_factor(p, s: Segment) -> float | np.ndarray:
    """Unclamped projection parameter of ``p`` onto the line through ``s``.

    ``t = 0`` at ``s.a`` and ``t = 1`` at ``s.b``. Accepts a single point or an
    ``(N, 2)`` array.
    """
    p = np.asarray(p, dtype=float)
    a = np.asarray(s.a)
    ab = np.asarray(s.b) - a
    t = ((p - a) @ ab) / (ab @ ab)
    return float(t) if np.ndim(t) == 0 else t


def point_segment_distance(p, s: Segment) -> float | np.ndarray:
    """Euclidean distance from ``p`` to segment ``s`` (endpoint cases included)."""
    p = np.asarray(p, dtype=float)
    a = np.asarray(s.a)
    b = np.asarray(s.b)
    t = np.asarray(project_factor(p, s))
    foot = a + np.clip(t, 0.0, 1.0)[..., None] * (b - a)
    # explicit endpoint branches keep the t<0 / t>1 cases exact
    d = np.where(t < 0.0, np.linalg.norm(p - a, axis=-1),
                 np.where(t > 1.0, np.linalg.norm(p - b, axis=-1),
                          np.linalg.norm(p - foot, axis=-1)))
    return float(d) if d.ndim == 0 else d


def segment_endpoints(edges: Sequence[Segment]) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([e.a for e in edges], dtype=float).reshape(-1, 2)
    b = np.array([e.b for e in edges], dtype=float).reshape(-1, 2)
    return a, b


def distances_to_segments(points, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix ``(N, M)`` from ``N`` points to ``M`` segments ``a[j]->b[j]``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    rel = pts[:, None, :] - a[None, :, :]
    t = np.einsum("nmj,mj->nm", rel, ab) / denom
    t = np.clip(t, 0.0, 1.0)
    diff = rel - t[..., None] * ab[None, :, :]
    return np.sqrt(np.einsum("nmj,nmj->nm", diff, diff))


def min_distance_to_edge_set(p, edges: Sequence[Segment]) -> float | np.ndarray:
    """Distance from ``p`` (one point or ``(N, 2)``) to the nearest edge."""
    if len(edges) == 0:
        raise ValueError("distance to an empty edge set is undefined")
    a, b = segment_endpoints(edges)
    p = np.asarray(p, dtype=float)
    d = distances_to_segments(p, a, b).min(axis=1)
    return float(d[0]) if p.ndim == 1 else d


def on_segment(p, s: Segment, tol: float = ON_SEGMENT_TOL) -> bool:
    return bool(point_segment_distance(p, s) <= tol)
