"""Per-edge informative path planning.

For one route edge, find B-spline control points and a final time that
minimize the mean hazard posterior ``Gamma`` over evaluation points in the
edge's Voronoi cell, subject to start/end position and velocity, speed,
turn-rate and curvature limits at the sampling instants, and an arc length
matching the edge budget.

Sampling is modelled at ``N + 1`` instants evenly spread over ``[0, tf]``
(``N`` is fixed per problem from the budget and the nominal speed), so in
normalized time the sample sites are fixed fractions of the curve and
``Gamma`` depends on the control points only. The final time enters the
kinematic limits and the endpoint velocities.

The solver is an augmented Lagrangian outer loop around L-BFGS-B. Endpoint
position and velocity conditions are linear in the control points and are
eliminated exactly by solving for two control points at each end.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .budget import SegmentVoronoi, nearest_edge
from .geometry import as_point, as_points
from .hazard import HazardField
from .spline import (SplinePath, basis_matrix, gauss_legendre_nodes, kinematic_quantities,
                     n_sample_intervals, uniform_knots)

log = logging.getLogger(__name__)

CELL_GRID = 15
_X_FLOOR = 1e-300
_Z_CLIP = 700.0


class InfeasibleInit(ValueError):
    pass


@dataclass(frozen=True)
class KinematicBounds:
    v_lb: float = 2.0
    v_ub: float = 20.0
    u_lb: float = -1.0
    u_ub: float = 1.0
    kappa_ub: float = 0.2

    def __post_init__(self):
        if not (0 < self.v_lb < self.v_ub):
            raise ValueError("need 0 < v_lb < v_ub")
        if not (self.u_lb < 0 < self.u_ub) or not self.kappa_ub > 0:
            raise ValueError("turn-rate bounds must bracket zero and kappa_ub be positive")

    @property
    def v_nominal(self) -> float:
        return 0.5 * (self.v_lb + self.v_ub)


@dataclass(frozen=True)
class PlannerConfig:
    k: int = 3
    cp_spacing: float = 50.0        # metres of budget per control point
    min_ctrl: int = 8
    v_nominal: float | None = None  # default: midpoint of the speed bounds
    max_outer: int = 4
    max_inner: int = 30
    mu0: float = 100.0
    mu_growth: float = 10.0
    mu_max: float = 1e8
    objective_weight: float = 100.0
    budget_tol: float = 0.005
    budget_target: float = 0.002
    kin_tol: float = 1e-3
    pos_tol: float = 0.5
    vel_tol: float = 0.1
    init_budget_tol: float = 0.05
    rel_stop: float = 1e-6

    def n_ctrl(self, budget: float) -> int:
        return max(self.min_ctrl, 2 * self.k + 2, int(np.ceil(budget / self.cp_spacing)))

    def nominal_speed(self, bounds: KinematicBounds) -> float:
        return bounds.v_nominal if self.v_nominal is None else float(self.v_nominal)


@dataclass(frozen=True)
class EdgePlanningProblem:
    start: np.ndarray
    end: np.ndarray
    v_start: np.ndarray
    v_end: np.ndarray
    budget: float
    grid: np.ndarray
    field: HazardField
    bounds: KinematicBounds = KinematicBounds()
    n_samples: int = 0   # sampling intervals along the edge; 0 -> derive from budget

    def __post_init__(self):
        for name in ("start", "end", "v_start", "v_end"):
            object.__setattr__(self, name, as_point(getattr(self, name)))
        grid = as_points(self.grid)
        if len(grid) == 0:
            raise ValueError("evaluation grid is empty")
        object.__setattr__(self, "grid", grid)
        chord = float(np.linalg.norm(self.end - self.start))
        if self.budget < chord * (1 - 1e-9):
            raise ValueError(f"budget {self.budget:.3f} m is shorter than the edge ({chord:.3f} m)")
        if self.n_samples <= 0:
            n = n_sample_intervals(self.budget / self.bounds.v_nominal, self.field.params.delta_s)
            object.__setattr__(self, "n_samples", n)

    @property
    def chord(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def sample_fractions(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_samples + 1)


@dataclass
class PlannedTrajectory:
    path: SplinePath
    gamma: float
    gamma_init: float
    residuals: dict
    sample_times: np.ndarray
    success: bool
    status: str = "ok"
    outer_iterations: int = 0
    evaluations: int = 0

    @property
    def tf(self) -> float:
        return self.path.tf


# --- objective kernel -------------------------------------------------------

class GammaKernel:
    """Mean posterior over fixed evaluation points as a function of new sample sites.

    Everything that does not depend on the new samples (prior, past-sample
    likelihood, false-alarm evidence) is folded into one log-odds offset per
    evaluation point.
    """

    def __init__(self, grid: np.ndarray, field: HazardField, n_new: int):
        self.grid = as_points(grid)
        self.beta = field.params.beta_sense
        prior = field.prior(self.grid)
        n_total = field.n_samples + n_new
        p_fa = field.params.p_fa
        with np.errstate(divide="ignore"):
            offset = (np.log(prior) - np.log1p(-prior) + field.loglik(self.grid)
                      - n_total * np.log1p(-p_fa))
        self.origin = self.grid.mean(axis=0)
        self.gc = self.grid - self.origin
        self.g2 = (self.gc * self.gc).sum(axis=1)
        self.offset = np.clip(np.nan_to_num(offset, nan=0.0, posinf=_Z_CLIP, neginf=-_Z_CLIP),
                              -_Z_CLIP, _Z_CLIP)

    def value_and_grad(self, pts: np.ndarray, need_grad: bool = True):
        # centred coordinates keep the expanded square distance accurate
        p = pts - self.origin
        x = self.g2[:, None] + (p * p).sum(axis=1)[None, :]
        x -= 2.0 * (self.gc @ p.T)
        x *= self.beta
        np.maximum(x, _X_FLOOR, out=x)
        np.negative(x, out=x)
        em = np.expm1(x, out=x)                                  # exp(-beta d^2) - 1
        lm = np.log(-em)                                         # log(1 - exp(-beta d^2))
        z = self.offset + lm.sum(axis=1)
        phi = expit(np.clip(z, -_Z_CLIP, _Z_CLIP))
        gamma = float(phi.mean())
        if not need_grad:
            return gamma, None
        # phi (1 - phi) / (1 - exp(-x)) in log space: the factor lm cancels the
        # singular 1 / (1 - exp(-x)) when a sample sits on an evaluation point
        log_w = -np.logaddexp(0.0, -z) - np.logaddexp(0.0, z)
        coef = np.exp(log_w[:, None] - lm)
        coef *= 1.0 + em
        coef *= 2.0 * self.beta / len(phi)
        grad = p * coef.sum(axis=0)[:, None] - coef.T @ self.gc
        return gamma, grad


def _sample_basis(path: SplinePath, n_samples: int) -> np.ndarray:
    tau = np.linspace(0.0, 1.0, n_samples + 1)
    knots = uniform_knots(0.0, 1.0, path.n_ctrl, path.k)
    return basis_matrix(knots, path.k, tau)


def sample_points(path: SplinePath, n_samples: int) -> np.ndarray:
    return path.eval(np.linspace(path.t0, path.tf, n_samples + 1))


def objective_gamma(path: SplinePath, problem: EdgePlanningProblem) -> float:
    """Mean posterior over ``problem.grid`` after sampling along ``path``.

    Past samples in ``problem.field`` are included; the new samples are the
    ``problem.n_samples + 1`` evenly timed points of ``path``.
    """
    kern = GammaKernel(problem.grid, problem.field, problem.n_samples + 1)
    return kern.value_and_grad(sample_points(path, problem.n_samples), need_grad=False)[0]


def gradient_gamma(path: SplinePath, problem: EdgePlanningProblem):
    """Exact gradient of :func:`objective_gamma`.

    Returns ``(d_control_points, d_tf)``; ``d_control_points`` has the shape
    of ``path.control_points``. Sample sites sit at fixed fractions of the
    horizon, so with the control points held fixed ``Gamma`` does not change
    with ``tf`` and ``d_tf`` is exactly zero.
    """
    kern = GammaKernel(problem.grid, problem.field, problem.n_samples + 1)
    B = _sample_basis(path, problem.n_samples)
    _, g_pts = kern.value_and_grad(B @ path.control_points)
    return B.T @ g_pts, 0.0


# --- evaluation points ----------------------------------------------------------

def cell_grid_points(sv: SegmentVoronoi, k: int, n: int = CELL_GRID) -> np.ndarray:
    """``n x n`` evenly spaced points over edge ``k``'s cell bounding box, kept
    only where edge ``k`` is the nearest edge."""
    box = sv.bounding_box(k)
    edges = list(sv.edges)
    if box is not None:
        x0, x1, y0, y1 = box
        xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
        ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
        gx, gy = np.meshgrid(xs, ys)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        pts = pts[nearest_edge(pts, edges) == k]
        if len(pts):
            return pts
        cells = sv.grid.centers[sv.cell_mask(k)]
        if len(cells):
            idx = np.linspace(0, len(cells) - 1, min(len(cells), n * n)).round().astype(int)
            return cells[np.unique(idx)]
    return sv.edges[k].midpoint[None, :]


# --- constraint machinery -----------------------------------------------------------

class _Parameterization:
    """Control points as an affine function of free control points and ``tf``.

    Two control points at each end are solved from the endpoint position and
    velocity conditions, which therefore hold by construction.
    """

    def __init__(self, n_ctrl: int, k: int, problem: EdgePlanningProblem):
        if n_ctrl < 2 * k:
            raise ValueError(f"need at least {2 * k} control points")
        knots = uniform_knots(0.0, 1.0, n_ctrl, k)
        ends = np.array([0.0, 1.0])
        vals = basis_matrix(knots, k, ends)
        ders = basis_matrix(knots, k, ends, 1)
        A = np.vstack([vals[0], ders[0], vals[1], ders[1]])        # (4, n)
        dep = np.array([0, k - 1, n_ctrl - k, n_ctrl - 1])
        free = np.setdiff1d(np.arange(n_ctrl), dep)
        A_dep_inv = np.linalg.inv(A[:, dep])
        self.n_ctrl, self.dep, self.free = n_ctrl, dep, free
        # C_dep = A_dep^-1 (R0 + R1 tf - A_free C_free)
        self.K_free = -A_dep_inv @ A[:, free]                      # (4, n_free)
        R0 = np.vstack([problem.start, [0.0, 0.0], problem.end, [0.0, 0.0]])
        R1 = np.vstack([[0.0, 0.0], problem.v_start, [0.0, 0.0], problem.v_end])
        self.c0 = A_dep_inv @ R0                                     # (4, 2)
        self.c1 = A_dep_inv @ R1

    def control_points(self, z: np.ndarray, tf: float) -> np.ndarray:
        C = np.empty((self.n_ctrl, 2))
        C[self.free] = z
        C[self.dep] = self.c0 + self.c1 * tf + self.K_free @ z
        return C

    def pullback(self, gC: np.ndarray):
        """Map a gradient w.r.t. all control points to (free points, tf)."""
        gdep = gC[self.dep]
        gz = gC[self.free] + self.K_free.T @ gdep
        gtf = float(np.sum(self.c1 * gdep))
        return gz, gtf


class _Evaluator:
    def __init__(self, problem: EdgePlanningProblem, n_ctrl: int, k: int, cfg: PlannerConfig):
        self.problem, self.cfg, self.k = problem, cfg, k
        knots = uniform_knots(0.0, 1.0, n_ctrl, k)
        tau = problem.sample_fractions()
        self.B = basis_matrix(knots, k, tau)
        self.D1 = basis_matrix(knots, k, tau, 1)
        self.D2 = basis_matrix(knots, k, tau, 2)
        tq, wq = gauss_legendre_nodes(0.0, 1.0)
        self.Dq, self.wq = basis_matrix(knots, k, tq, 1), wq
        self.param = _Parameterization(n_ctrl, k, problem)
        self.n_evals = 0

    @cached_property
    def kernel(self) -> GammaKernel:
        p = self.problem
        return GammaKernel(p.grid, p.field, p.n_samples + 1)

    def arc_length(self, C):
        return float(self.wq @ np.linalg.norm(self.Dq @ C, axis=1))

    def constraints(self, C: np.ndarray, tf: float, need_grad: bool):
        """Normalized inequality constraints ``g <= 0`` and budget equality ``h = 0``.

        With ``need_grad`` also returns a closure mapping inequality weights to
        (dC, dtf) and the gradient of ``h``.
        """
        b = self.problem.bounds
        a = self.D1 @ C
        acc = self.D2 @ C
        s = np.maximum(np.hypot(a[:, 0], a[:, 1]), 1e-12)
        cross = a[:, 0] * acc[:, 1] - a[:, 1] * acc[:, 0]
        v = s / tf
        u = cross / (tf * s ** 2)
        kap = cross / s ** 3
        g = np.concatenate([
            (b.v_lb - v) / b.v_lb, (v - b.v_ub) / b.v_ub,
            (u - b.u_ub) / abs(b.u_ub), (b.u_lb - u) / abs(b.u_lb),
            (kap - b.kappa_ub) / b.kappa_ub, (-kap - b.kappa_ub) / b.kappa_ub,
        ])
        sq = self.Dq @ C
        sn = np.maximum(np.hypot(sq[:, 0], sq[:, 1]), 1e-12)
        L = float(self.wq @ sn)
        h = (L - self.problem.budget) / self.problem.budget
        if not need_grad:
            return g, h, None, None

        m = len(v)
        dcross_da = np.column_stack([acc[:, 1], -acc[:, 0]])
        dcross_db = np.column_stack([-a[:, 1], a[:, 0]])
        ahat = a / s[:, None]
        dv_da = ahat / tf
        dv_dtf = -v / tf
        du_da = dcross_da / (tf * s ** 2)[:, None] - (2 * cross / (tf * s ** 3))[:, None] * ahat
        du_db = dcross_db / (tf * s ** 2)[:, None]
        du_dtf = -u / tf
        dk_da = dcross_da / (s ** 3)[:, None] - (3 * cross / s ** 4)[:, None] * ahat
        dk_db = dcross_db / (s ** 3)[:, None]

        def pull(w):
            w1, w2, w3, w4, w5, w6 = (w[i * m:(i + 1) * m] for i in range(6))
            cv = -w1 / b.v_lb + w2 / b.v_ub
            cu = w3 / abs(b.u_ub) - w4 / abs(b.u_lb)
            ck = (w5 - w6) / b.kappa_ub
            ga = cv[:, None] * dv_da + cu[:, None] * du_da + ck[:, None] * dk_da
            gb = cu[:, None] * du_db + ck[:, None] * dk_db
            gC = self.D1.T @ ga + self.D2.T @ gb
            gtf = float(cv @ dv_dtf + cu @ du_dtf)
            return gC, gtf

        dh_dC = self.Dq.T @ ((self.wq / sn)[:, None] * sq) / self.problem.budget
        return g, h, pull, dh_dC


def verify_trajectory(path: SplinePath, problem: EdgePlanningProblem) -> dict:
    """Recompute every constraint residual from the spline itself.

    Uses only the public :class:`SplinePath` evaluation routines, never the
    optimizer's internal matrices. Kinematic entries are relative
    violations (0 when satisfied).
    """
    b = problem.bounds
    ts = np.linspace(path.t0, path.tf, problem.n_samples + 1)
    vel, acc = path.derivatives(ts)
    v, u, kap = kinematic_quantities(vel, acc)
    v0, _ = path.derivatives(path.t0)
    vf, _ = path.derivatives(path.tf)
    L = path.arc_length()
    return {
        "start_position": float(np.linalg.norm(path.eval(path.t0) - problem.start)),
        "end_position": float(np.linalg.norm(path.eval(path.tf) - problem.end)),
        "start_velocity": float(np.linalg.norm(v0 - problem.v_start)),
        "end_velocity": float(np.linalg.norm(vf - problem.v_end)),
        "speed_low": float(max(0.0, np.max((b.v_lb - v) / b.v_lb))),
        "speed_high": float(max(0.0, np.max((v - b.v_ub) / b.v_ub))),
        "turn_rate": float(max(0.0, np.max((u - b.u_ub) / abs(b.u_ub)),
                               np.max((b.u_lb - u) / abs(b.u_lb)))),
        "curvature": float(max(0.0, np.max((np.abs(kap) - b.kappa_ub) / b.kappa_ub))),
        "budget": float(abs(L - problem.budget) / problem.budget),
        "arc_length": float(L),
    }


def residuals_ok(res: dict, cfg: PlannerConfig) -> bool:
    return (res["start_position"] <= cfg.pos_tol and res["end_position"] <= cfg.pos_tol
            and res["start_velocity"] <= cfg.vel_tol and res["end_velocity"] <= cfg.vel_tol
            and max(res["speed_low"], res["speed_high"], res["turn_rate"],
                    res["curvature"]) <= cfg.kin_tol
            and res["budget"] <= cfg.budget_tol)


def _al_solve(ev: _Evaluator, init: SplinePath, objective, score, cfg: PlannerConfig,
              first_feasible: bool = False):
    """Augmented Lagrangian over L-BFGS-B starting from ``init``.

    ``objective(C)`` returns ``(value, dvalue/dC)``; ``score(C)`` ranks
    feasible iterates (lower is better). Returns ``(best, least_bad, outer)``
    where ``best`` is ``(score, C, tf)`` for the best verified-feasible
    iterate or None, and ``least_bad`` is ``(violation, score, C, tf)``.
    With ``first_feasible`` the search stops at the first feasible iterate.
    """
    problem, par = ev.problem, ev.param
    tf_ref = float(init.tf)
    z_ref = init.control_points[par.free].copy()
    scale = max(1.0, problem.budget / init.n_ctrl)
    nz = z_ref.size

    def unpack(x):
        return z_ref + scale * x[:nz].reshape(-1, 2), tf_ref * x[nz]

    lam = np.zeros(6 * (problem.n_samples + 1))
    lam_h = 0.0
    mu = cfg.mu0

    def fun(x):
        ev.n_evals += 1
        z, tf = unpack(x)
        C = par.control_points(z, tf)
        val, gC = objective(C)
        g, h, pull, dh_dC = ev.constraints(C, tf, need_grad=True)
        act = np.maximum(0.0, lam + mu * g)
        val += (act @ act - lam @ lam) / (2.0 * mu) + lam_h * h + 0.5 * mu * h * h
        gCk, gtf = pull(act)
        gC = gC + gCk + (lam_h + mu * h) * dh_dC
        gz, gtf_dep = par.pullback(gC)
        return val, np.concatenate([scale * gz.ravel(), [tf_ref * (gtf + gtf_dep)]])

    best = None
    least_bad = None

    def consider(C, tf):
        nonlocal best, least_bad
        g, h, _, _ = ev.constraints(C, tf, need_grad=False)
        kin = float(max(0.0, g.max()))
        sc = score(C)
        if kin <= cfg.kin_tol and abs(h) <= cfg.budget_tol:
            if best is None or sc < best[0]:
                if residuals_ok(verify_trajectory(SplinePath(C, 0.0, tf, init.k), problem), cfg):
                    best = (sc, C, tf)
        viol = max(kin / cfg.kin_tol, abs(h) / cfg.budget_tol)
        if least_bad is None or viol < least_bad[0]:
            least_bad = (viol, sc, C, tf)
        return g, h, kin, sc

    bounds = [(None, None)] * nz + [(0.05, 20.0)]
    x = np.zeros(nz + 1)
    x[nz] = 1.0
    consider(*unpack_to_C(par, unpack, x))
    outer = 0
    prev = None
    for outer in range(1, cfg.max_outer + 1):
        res = minimize(fun, x, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": cfg.max_inner, "maxfun": 2 * cfg.max_inner,
                                "ftol": 1e-12, "gtol": 1e-9})
        x = res.x
        C, tf = unpack_to_C(par, unpack, x)
        g, h, kin, sc = consider(C, tf)
        log.debug("outer %d: score %.6f kin %.2e budget %.2e mu %.0e nfev %d",
                  outer, sc, kin, h, mu, res.nfev)
        if first_feasible and best is not None:
            break
        lam = np.maximum(0.0, lam + mu * g)
        lam_h = lam_h + mu * h
        if kin > 0.25 * cfg.kin_tol or abs(h) > cfg.budget_target:
            mu = min(cfg.mu_max, mu * cfg.mu_growth)
        elif prev is not None and abs(prev - sc) <= cfg.rel_stop * max(abs(sc), 1e-12):
            break
        prev = sc
    return best, least_bad, outer


def unpack_to_C(par: _Parameterization, unpack, x):
    z, tf = unpack(x)
    return par.control_points(z, tf), tf


def _check_init_budget(problem: EdgePlanningProblem, init: SplinePath, cfg: PlannerConfig):
    L0 = init.arc_length()
    if abs(L0 - problem.budget) > cfg.init_budget_tol * problem.budget:
        raise InfeasibleInit(
            f"initial path length {L0:.1f} m is more than {cfg.init_budget_tol:.0%} "
            f"off the budget {problem.budget:.1f} m")


def restore_feasibility(problem: EdgePlanningProblem, raw: SplinePath,
                        config: PlannerConfig | None = None) -> tuple[SplinePath, bool]:
    """Feasible spline closest to ``raw`` in control-point distance.

    Returns ``(path, feasible)``. If ``raw`` already satisfies every
    constraint it is returned unchanged. Otherwise the endpoint conditions
    are imposed and the control points and ``tf`` are adjusted as little as
    needed to meet the kinematic limits and the budget; ``feasible`` is
    False when that does not succeed, in which case the least-violating
    iterate is returned.
    """
    cfg = config or PlannerConfig()
    _check_init_budget(problem, raw, cfg)
    if residuals_ok(verify_trajectory(raw, problem), cfg):
        return raw, True
    ev = _Evaluator(problem, raw.n_ctrl, raw.k, cfg)
    ref = raw.control_points
    w = 1.0 / (max(1.0, problem.budget / raw.n_ctrl) ** 2 * raw.n_ctrl)

    def objective(C):
        d = C - ref
        return w * float(np.sum(d * d)), 2.0 * w * d

    def score(C):
        d = C - ref
        return float(np.sum(d * d))

    best, least_bad, _ = _al_solve(ev, raw, objective, score, cfg, first_feasible=True)
    if best is not None:
        return SplinePath(best[1], 0.0, best[2], raw.k), True
    return SplinePath(least_bad[2], 0.0, least_bad[3], raw.k), False


def plan_edge(problem: EdgePlanningProblem, init: SplinePath,
              config: PlannerConfig | None = None) -> PlannedTrajectory:
    """Locally minimize ``Gamma`` from ``init`` subject to the edge constraints.

    Returns the best iterate that satisfies every constraint tolerance (as
    checked by :func:`verify_trajectory`); a feasible ``init`` is itself a
    candidate, so the result never has a higher ``Gamma`` than it. If no
    iterate is feasible within ``config.max_outer`` outer iterations, the
    least-violating one is returned with ``success=False`` and
    ``status="max_iterations"``.

    Raises
    ------
    InfeasibleInit
        If ``init``'s arc length misses the budget by more than 5%.
    """
    cfg = config or PlannerConfig()
    _check_init_budget(problem, init, cfg)
    ev = _Evaluator(problem, init.n_ctrl, init.k, cfg)
    kern = ev.kernel
    w_obj = cfg.objective_weight
    gamma_init = kern.value_and_grad(ev.B @ init.control_points, need_grad=False)[0]

    def objective(C):
        gamma, g_pts = kern.value_and_grad(ev.B @ C)
        return w_obj * gamma, w_obj * (ev.B.T @ g_pts)

    def score(C):
        return kern.value_and_grad(ev.B @ C, need_grad=False)[0]

    best, least_bad, outer = _al_solve(ev, init, objective, score, cfg)
    if residuals_ok(verify_trajectory(init, problem), cfg):
        if best is None or gamma_init <= best[0]:
            best = (gamma_init, init.control_points, init.tf)

    if best is not None:
        gamma, C, tf = best
        status, success = "ok", True
    else:
        _, gamma, C, tf = least_bad
        status, success = "max_iterations", False
        log.warning("edge planner found no feasible iterate after %d outer iterations", outer)
    path = SplinePath(C, 0.0, tf, init.k)
    residuals = verify_trajectory(path, problem)
    success = success and residuals_ok(residuals, cfg)
    return PlannedTrajectory(path, gamma, gamma_init, residuals,
                             np.linspace(0.0, tf, problem.n_samples + 1), success, status,
                             outer, ev.n_evals)
