"""Uniform B-spline trajectories over a time horizon ``[t0, tf]``.

The knot vector runs ``k`` uniform spacings past each end of the horizon,
``(t0 - k*dt, ..., t0, ..., tf, ..., tf + k*dt)``, so every time in the
horizon sees a full set of ``k + 1`` non-zero basis functions. The spline is
therefore not clamped: endpoint positions and velocities are whatever the
control points make them, and the planner pins them with constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import as_points

V_EPS = 1e-6
GL_ORDER = 5
GL_INTERVALS = 100


class DegenerateVelocity(ValueError):
    pass


def uniform_knots(t0: float, tf: float, n_ctrl: int, k: int) -> np.ndarray:
    n_int = n_ctrl - k
    if n_int < 1:
        raise ValueError(f"need more than {k} control points for degree {k}")
    dt = (tf - t0) / n_int
    return t0 + dt * np.arange(-k, n_int + k + 1)


def basis_matrix(knots: np.ndarray, k: int, t, deriv: int = 0) -> np.ndarray:
    """Cox-de Boor basis values (or derivatives) at times ``t``.

    Returns an array of shape ``(len(t), len(knots) - k - 1)``. Intervals are
    half-open ``[t_i, t_{i+1})``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    knots = np.asarray(knots, dtype=float)
    if deriv > k:
        return np.zeros((len(t), len(knots) - k - 1))
    return _basis(knots, k, t, deriv)


def _basis(knots, p, t, r):
    if p == 0:
        lo, hi = knots[:-1], knots[1:]
        return ((t[:, None] >= lo[None, :]) & (t[:, None] < hi[None, :])).astype(float)
    n = len(knots) - p - 1
    left_den = knots[p:p + n] - knots[:n]
    right_den = knots[p + 1:p + 1 + n] - knots[1:1 + n]
    left_inv = np.divide(1.0, left_den, out=np.zeros_like(left_den), where=left_den > 0)
    right_inv = np.divide(1.0, right_den, out=np.zeros_like(right_den), where=right_den > 0)
    if r == 0:
        lower = _basis(knots, p - 1, t, 0)
        left = (t[:, None] - knots[None, :n]) * left_inv * lower[:, :n]
        right = (knots[None, p + 1:p + 1 + n] - t[:, None]) * right_inv * lower[:, 1:n + 1]
        return left + right
    lower = _basis(knots, p - 1, t, r - 1)
    return p * (lower[:, :n] * left_inv - lower[:, 1:n + 1] * right_inv)


@dataclass(frozen=True)
class KinematicSample:
    t: float
    position: np.ndarray
    v: float
    u: float
    kappa: float


@dataclass(frozen=True)
class SplinePath:
    """Planar B-spline ``p(t) = sum_i B_{i,k}(t) c_i`` on ``[t0, tf]``.

    ``k`` is the polynomial degree; the default cubic gives continuous
    acceleration, which the turn-rate and curvature limits need.
    """

    control_points: np.ndarray
    t0: float
    tf: float
    k: int = 3
    knots: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cp = as_points(self.control_points).copy()
        cp.setflags(write=False)
        if not (self.tf > self.t0):
            raise ValueError(f"empty time horizon [{self.t0}, {self.tf}]")
        if self.k < 1:
            raise ValueError("spline degree must be at least 1")
        object.__setattr__(self, "control_points", cp)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "tf", float(self.tf))
        object.__setattr__(self, "knots", uniform_knots(self.t0, self.tf, len(cp), self.k))

    @property
    def n_ctrl(self) -> int:
        return len(self.control_points)

    @property
    def duration(self) -> float:
        return self.tf - self.t0

    def _check_times(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        span = self.duration
        slack = 1e-12 * max(1.0, abs(self.t0), abs(self.tf))
        if np.any(t < self.t0 - slack) or np.any(t > self.tf + slack) or not np.all(np.isfinite(t)):
            raise ValueError(f"times outside the horizon [{self.t0}, {self.tf}]")
        return np.clip(t, self.t0, self.t0 + span)

    def basis(self, t, deriv: int = 0) -> np.ndarray:
        return basis_matrix(self.knots, self.k, self._check_times(t), deriv)

    def eval(self, t) -> np.ndarray:
        """Position(s) at ``t``: shape ``(2,)`` for a scalar, else ``(N, 2)``."""
        out = self.basis(t) @ self.control_points
        return out[0] if np.ndim(t) == 0 else out

    def derivatives(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Velocity and acceleration vectors at ``t``."""
        vel = self.basis(t, 1) @ self.control_points
        acc = self.basis(t, 2) @ self.control_points
        if np.ndim(t) == 0:
            return vel[0], acc[0]
        return vel, acc

    def kinematics(self, t) -> KinematicSample | list[KinematicSample]:
        pos = np.atleast_2d(self.eval(t))
        vel, acc = self.derivatives(np.atleast_1d(t))
        v, u, kappa = kinematic_quantities(vel, acc)
        if np.any(v <= V_EPS):
            raise DegenerateVelocity(f"speed below {V_EPS} m/s; turn rate undefined")
        ts = np.atleast_1d(t)
        samples = [KinematicSample(float(ts[i]), pos[i], float(v[i]), float(u[i]), float(kappa[i]))
                   for i in range(len(ts))]
        return samples[0] if np.ndim(t) == 0 else samples

    def arc_length(self) -> float:
        """Length by composite 5-point Gauss-Legendre over 100 sub-intervals."""
        tq, wq = gauss_legendre_nodes(self.t0, self.tf)
        vel = self.basis(tq, 1) @ self.control_points
        return float(wq @ np.linalg.norm(vel, axis=1))

    def sample_times(self, delta_s: float) -> np.ndarray:
        return sample_times(self.t0, self.tf, delta_s)

    def with_control_points(self, cp) -> "SplinePath":
        return SplinePath(cp, self.t0, self.tf, self.k)


def kinematic_quantities(vel: np.ndarray, acc: np.ndarray):
    """Speed, turn rate and signed curvature from velocity/acceleration rows."""
    v = np.hypot(vel[:, 0], vel[:, 1])
    cross = vel[:, 0] * acc[:, 1] - vel[:, 1] * acc[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = cross / v ** 2
        kappa = u / v
    return v, u, kappa


def gauss_legendre_nodes(a: float, b: float, order: int = GL_ORDER,
                         intervals: int = GL_INTERVALS):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, intervals + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def sample_times(t0: float, tf: float, delta_s: float) -> np.ndarray:
    """Sampling instants from ``t0`` to ``tf`` at (at most) ``delta_s`` spacing.

    Both ends are included; the interior spacing is ``(tf - t0) / n`` with
    ``n = ceil((tf - t0) / delta_s)``.
    """
    if delta_s <= 0:
        raise ValueError("sampling period must be positive")
    n = n_sample_intervals(tf - t0, delta_s)
    return np.linspace(t0, tf, n + 1)


def n_sample_intervals(duration: float, delta_s: float) -> int:
    return max(1, int(math.ceil(duration / delta_s - 1e-9)))


def polyline_length(points) -> float:
    pts = as_points(points)
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


def resample_polyline(points, n: int) -> np.ndarray:
    """``n`` points equally spaced in arc length along a polyline."""
    pts = as_points(points)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.linspace(0.0, cum[-1], n)
    return np.column_stack([np.interp(s, cum, pts[:, 0]), np.interp(s, cum, pts[:, 1])])


def fit_to_polyline(waypoints, k: int = 3, n_ctrl: int = 8, horizon: float = 1.0,
                    n_samples: int | None = None) -> SplinePath:
    """Least-squares spline through an arc-length parameterized polyline.

    The polyline is resampled at ``n_samples`` points (default ``10 * n_ctrl``)
    assigned to times proportional to arc length over ``[0, horizon]``. The
    first and last waypoints are interpolated exactly (equality-constrained
    least squares).
    """
    pts = as_points(waypoints)
    if len(pts) < 2:
        raise ValueError("need at least two waypoints")
    if polyline_length(pts) <= 0:
        raise ValueError("waypoints have zero total length")
    n_samples = 10 * n_ctrl if n_samples is None else int(n_samples)
    if n_ctrl > n_samples:
        raise ValueError(f"{n_ctrl} control points exceed {n_samples} waypoint samples")
    if n_ctrl < k + 1:
        raise ValueError(f"need at least {k + 1} control points for degree {k}")

    targets = resample_polyline(pts, n_samples)
    ts = np.linspace(0.0, horizon, n_samples)
    knots = uniform_knots(0.0, horizon, n_ctrl, k)
    A = basis_matrix(knots, k, ts)
    E = basis_matrix(knots, k, [0.0, horizon])
    rhs_eq = np.vstack([pts[0], pts[-1]])
    # KKT system for min ||A C - P||^2 s.t. E C = endpoints
    kkt = np.block([[2.0 * A.T @ A, E.T], [E, np.zeros((2, 2))]])
    rhs = np.vstack([2.0 * A.T @ targets, rhs_eq])
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    cp = sol[:n_ctrl]
    # enforce interpolation to round-off after the least-squares solve
    resid = rhs_eq - E @ cp
    cp = cp + np.linalg.lstsq(E, resid, rcond=None)[0]
    return SplinePath(cp, 0.0, horizon, k)


def straight_spline(start, end, duration: float, n_ctrl: int = 8, k: int = 3) -> SplinePath:
    """Constant-speed straight-line spline (control points evenly on the line)."""
    start = np.asarray(start, float)
    end = np.asarray(end, float)
    n_int = n_ctrl - k
    # Greville abscissae reproduce affine functions exactly
    s = (np.arange(n_ctrl) - (k - 1) / 2.0) / n_int
    cp = start[None, :] + s[:, None] * (end - start)[None, :]
    return SplinePath(cp, 0.0, duration, k)
