"""Experiment engine: scenarios, baseline paths, traversal with detection, trials.

Two trial types are supported. A coverage trial compares the route on the
known nodes alone (``original``) against routes augmented with pseudo-nodes
placed by uniform (``node-cvt``) or edge-distance (``edge-cvt``) weighted
CVT, scored by edge coverage metrics. A discovery trial flies the
edge-CVT route with one of three per-edge path types (``optimized``,
``lawnmower``, ``straight``) and counts unknown hazards detected along the
way.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .budget import SegmentVoronoi, build_segment_voronoi, edge_budgets
from .cvt import CvtConfig, generate_pseudo_nodes
from .geometry import RectDomain, Segment, as_point, as_points
from .hazard import HazardField, HazardParams, detect_prob, sample_unknown_hazards
from .metrics import edge_coverage, metrics_grid
from .optimizer import (EdgePlanningProblem, InfeasibleInit, KinematicBounds, PlannerConfig,
                        cell_grid_points, plan_edge, restore_feasibility)
from .routing import FleetSpec, NodeSet, Route, SolverConfig, route_edges, solve_vrp, vehicle_edges
from .spline import (SplinePath, fit_to_polyline, kinematic_quantities, straight_spline)

log = logging.getLogger(__name__)

COVERAGE_METHODS = ("original", "node-cvt", "edge-cvt")
PATH_METHODS = ("optimized", "lawnmower", "straight")
ALL_METHODS = COVERAGE_METHODS + PATH_METHODS
TRIAL_TIME_LIMIT = 60.0


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _count(value, rng: np.random.Generator) -> int:
    if np.isscalar(value):
        return int(value)
    lo, hi = value
    return int(rng.integers(int(lo), int(hi) + 1))


@dataclass(frozen=True)
class ScenarioSpec:
    """Ranges from which scenarios are drawn.

    ``n_known`` and ``n_pseudo`` are an int or an inclusive ``(lo, hi)`` range.
    """

    domain: RectDomain = RectDomain(0.0, 1000.0, 0.0, 1000.0)
    n_known: int | tuple[int, int] = (5, 15)
    n_pseudo: int | tuple[int, int] = (1, 5)
    n_unknown: int = 50
    n_vehicles: int = 1
    total_budget: float = 5000.0
    depot: tuple[float, float] | None = None
    params: HazardParams = HazardParams()
    cvt: CvtConfig = CvtConfig()


@dataclass(frozen=True)
class Scenario:
    domain: RectDomain
    depot: np.ndarray
    known: np.ndarray
    unknown: np.ndarray
    fleet: FleetSpec
    total_budget: float
    params: HazardParams
    cvt: CvtConfig
    n_pseudo: int
    seed: int
    detect_seed: int = 0

    @property
    def n_known(self) -> int:
        return len(self.known)


def generate_scenario(spec: ScenarioSpec, seed: int) -> Scenario:
    """Draw a scenario; ``seed`` determines every random choice."""
    s_count, s_known, s_unknown, s_cvt, s_detect = np.random.SeedSequence(seed).spawn(5)
    rng = np.random.default_rng(s_count)
    n_known = _count(spec.n_known, rng)
    n_pseudo = _count(spec.n_pseudo, rng)
    if n_known < 1 or n_pseudo < 0:
        raise ValueError("need at least one known node and a non-negative pseudo-node count")
    depot = spec.domain.center if spec.depot is None else as_point(spec.depot)
    known = spec.domain.sample_uniform(np.random.default_rng(s_known), n_known)
    unknown = sample_unknown_hazards(known, spec.params, spec.domain, spec.n_unknown, s_unknown)
    fleet = FleetSpec.uniform(spec.n_vehicles, spec.total_budget / spec.n_vehicles)
    cvt = replace(spec.cvt, n_pseudo=max(1, n_pseudo),
                  seed=int(s_cvt.generate_state(1)[0]))
    return Scenario(spec.domain, depot, known, unknown, fleet, spec.total_budget, spec.params,
                    cvt, n_pseudo, int(seed), int(s_detect.generate_state(1)[0]))


# --- baseline paths ---------------------------------------------------------

def lawnmower_path(start, end, budget: float, rung_spacing: float) -> np.ndarray:
    """Back-and-forth polyline from ``start`` to ``end`` of length ``budget``.

    Rungs are perpendicular to the segment, ``rung_spacing`` apart (rounded
    so they divide the segment evenly), and alternate sides of it; the sweep
    width is whatever makes the total length equal ``budget``.
    """
    start, end = as_point(start), as_point(end)
    d = end - start
    L = float(np.hypot(*d))
    if L == 0.0:
        raise ValueError("start and end coincide")
    if budget < L * (1 - 1e-12):
        raise ValueError(f"budget {budget:.3f} m is shorter than the segment ({L:.3f} m)")
    if budget <= L * (1 + 1e-12):
        return np.vstack([start, end])
    n = max(1, int(round(L / rung_spacing)))
    w = (budget - L) / n
    along = d / L
    perp = np.array([-along[1], along[0]])
    pts = [start]
    side = 1.0
    pts.append(start + side * 0.5 * w * perp)
    for i in range(1, n + 1):
        base = start + along * (L * i / n)
        pts.append(base + side * 0.5 * w * perp)
        if i < n:
            side = -side
            pts.append(base + side * 0.5 * w * perp)
    pts.append(end)
    return np.array(pts)


WEAVE_SHAPES = (0.0, 1.0, 2.0, 4.0)   # 0 is a sinusoid; larger values square off the wave


def _weave_offsets(x: np.ndarray, L: float, n: int, sharpness: float) -> np.ndarray:
    phi = np.pi * n * x / L
    if sharpness == 0.0:
        return np.sin(phi)
    return np.tanh(sharpness * np.sin(phi)) / np.tanh(sharpness)


def _max_curvature(y: np.ndarray, dx: float) -> float:
    d1 = np.gradient(y, dx)
    d2 = np.gradient(d1, dx)
    return float(np.max(np.abs(d2) / (1.0 + d1 ** 2) ** 1.5))


def lawnmower_weave(start, end, budget: float, rung_spacing: float,
                    n_points: int | None = None) -> np.ndarray:
    """Smooth counterpart of :func:`lawnmower_path` as a dense polyline.

    The curve alternates sides of the segment with the lawnmower's rung
    spacing (one half-wave per rung gap), its offset a sinusoid or a
    rounded square wave with amplitude chosen so the length equals
    ``budget``. Of the candidate wave shapes the one with the smallest
    peak curvature is returned.
    """
    start, end = as_point(start), as_point(end)
    d = end - start
    L = float(np.hypot(*d))
    if budget < L * (1 - 1e-12):
        raise ValueError(f"budget {budget:.3f} m is shorter than the segment ({L:.3f} m)")
    n = max(1, int(round(L / rung_spacing)))
    m = n_points or max(400, 80 * n)
    x = np.linspace(0.0, L, m)
    dx = x[1] - x[0]
    along = d / L
    perp = np.array([-along[1], along[0]])
    if budget <= L * (1 + 1e-9):
        y = np.zeros(m)
    else:
        best = None
        for c in WEAVE_SHAPES:
            g = _weave_offsets(x, L, n, c)
            dg = np.diff(g)

            def excess(A):
                return float(np.hypot(dx, A * dg).sum()) - budget

            hi = budget
            while excess(hi) < 0:
                hi *= 2.0
            A = brentq(excess, 0.0, hi, xtol=1e-9 * budget, rtol=1e-14)
            kap = _max_curvature(A * g, dx)
            if best is None or kap < best[0]:
                best = (kap, A * g)
        y = best[1]
    return start + x[:, None] * along[None, :] + y[:, None] * perp[None, :]


def lawnmower_ctrl_count(start, end, budget: float, rung_spacing: float,
                         cfg: PlannerConfig) -> int:
    L = float(np.linalg.norm(as_point(end) - as_point(start)))
    n_half_waves = max(1, int(round(L / rung_spacing)))
    return max(cfg.n_ctrl(budget), 3 * n_half_waves + 4)


def _retime(path: SplinePath, bounds: KinematicBounds, n_check: int = 400) -> SplinePath:
    """Slow the path down (never speed it up) until turn rate and speed fit the bounds."""
    ts = np.linspace(path.t0, path.tf, n_check)
    v, u, _ = kinematic_quantities(*path.derivatives(ts))
    scale = max(1.0,
                float(np.max(np.abs(u))) / (0.9 * min(bounds.u_ub, -bounds.u_lb)),
                float(np.max(v)) / (0.95 * bounds.v_ub))
    # slowing down scales speed and turn rate by 1/scale; keep the lower speed bound
    scale = min(scale, max(1.0, float(np.min(v)) / (1.05 * bounds.v_lb)))
    if scale == 1.0:
        return path
    return SplinePath(path.control_points, path.t0, path.t0 + scale * path.duration, path.k)


def lawnmower_spline(start, end, budget: float, params: HazardParams,
                     cfg: PlannerConfig | None = None,
                     bounds: KinematicBounds = KinematicBounds(),
                     max_refits: int = 8) -> SplinePath:
    """Spline through :func:`lawnmower_weave` whose arc length matches ``budget``.

    The weave's target length is corrected until the fitted curve's arc
    length is within 1e-6 of ``budget`` (relative). The curve is timed for
    the nominal speed, then slowed uniformly if its turns would exceed the
    turn-rate or speed limits.
    """
    cfg = cfg or PlannerConfig()
    start, end = as_point(start), as_point(end)
    L = float(np.linalg.norm(end - start))
    s = params.rung_spacing
    n_ctrl = lawnmower_ctrl_count(start, end, budget, s, cfg)
    horizon = budget / cfg.nominal_speed(bounds)
    if budget <= L * (1 + 1e-9):
        return straight_spline(start, end, horizon, n_ctrl, cfg.k)
    target = budget
    for _ in range(max_refits):
        weave = lawnmower_weave(start, end, target, s)
        path = fit_to_polyline(weave, cfg.k, n_ctrl, horizon, n_samples=max(10 * n_ctrl, 200))
        got = path.arc_length()
        if abs(got - budget) <= 1e-6 * budget:
            break
        # stretch the weave's excess length in proportion to the shortfall
        target = L + (target - L) * (budget - L) / max(got - L, 1e-9 * budget)
    return _retime(path, bounds)


def feasible_lawnmower(problem: EdgePlanningProblem,
                       cfg: PlannerConfig | None = None) -> tuple[SplinePath, bool]:
    """Lawnmower spline adjusted to meet the edge's endpoint and kinematic constraints.

    Serves both as the lawnmower baseline and as the optimizer's starting
    point. Returns ``(path, feasible)``. When the adjustment fails the raw
    weave is returned instead, so the flown length still matches the budget.
    """
    cfg = cfg or PlannerConfig()
    raw = lawnmower_spline(problem.start, problem.end, problem.budget, problem.field.params,
                           cfg, problem.bounds)
    path, ok = restore_feasibility(problem, raw, cfg)
    return (path, True) if ok else (raw, False)


def straight_path(start, end, bounds: KinematicBounds = KinematicBounds(),
                  cfg: PlannerConfig | None = None) -> SplinePath:
    """Straight segment flown at the nominal speed."""
    cfg = cfg or PlannerConfig()
    start, end = as_point(start), as_point(end)
    L = float(np.linalg.norm(end - start))
    return straight_spline(start, end, L / cfg.nominal_speed(bounds), cfg.min_ctrl, cfg.k)


# --- traversal ----------------------------------------------------------------

def detect(samples, unknown, params: HazardParams, rng: np.random.Generator,
           undiscovered: np.ndarray | None = None) -> np.ndarray:
    """Indices of hazards detected by at least one sample.

    Each sample detects each still-undiscovered hazard independently with
    probability ``exp(-beta |s - x|^2)``.
    """
    samples = as_points(samples)
    unknown = as_points(unknown)
    if undiscovered is None:
        undiscovered = np.ones(len(unknown), dtype=bool)
    cand = np.flatnonzero(undiscovered)
    if len(cand) == 0 or len(samples) == 0:
        return np.zeros(0, dtype=int)
    p = detect_prob(samples[:, None, :], unknown[None, cand, :], params.beta_sense)
    hit = rng.random(p.shape) < p
    return cand[hit.any(axis=0)]


def miss_log_probability(samples, unknown, params: HazardParams) -> np.ndarray:
    """``log P(no sample detects hazard h)`` for every hazard."""
    samples = as_points(samples)
    unknown = as_points(unknown)
    out = np.zeros(len(unknown))
    for lo in range(0, len(samples), 4096):
        p = detect_prob(samples[lo:lo + 4096, None, :], unknown[None, :, :], params.beta_sense)
        with np.errstate(divide="ignore"):
            out += np.log1p(-p).sum(axis=0)
    return out


def detect_with_thresholds(log_miss: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Hazards found given their miss log-probabilities and uniform thresholds.

    Hazard ``h`` is found when ``thresholds[h] < 1 - exp(log_miss[h])``,
    which happens with exactly the probability that at least one of the
    independent per-sample detections fires. Sharing the thresholds across
    methods compares them under common random numbers.
    """
    return np.flatnonzero(thresholds < -np.expm1(log_miss))


def path_samples(path: SplinePath, params: HazardParams, n_samples: int | None = None):
    """Sample sites along ``path``.

    By default every ``delta_s`` seconds. With ``n_samples`` given, that
    many intervals evenly spread over the horizon instead, which is how
    planned paths are sampled: their count is fixed by the budget at the
    nominal speed, so a planned path that flies slower gains no samples.
    """
    if n_samples is None:
        return path.eval(path.sample_times(params.delta_s))
    return path.eval(np.linspace(path.t0, path.tf, n_samples + 1))


def traverse_and_detect(path: SplinePath, unknown, params: HazardParams, seed,
                        undiscovered: np.ndarray | None = None):
    """Fly ``path``, sampling every ``delta_s`` seconds.

    Returns ``(discovered indices, sample locations)``.
    """
    samples = path.eval(path.sample_times(params.delta_s))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return detect(samples, unknown, params, rng, undiscovered), samples


# --- pipeline ---------------------------------------------------------------

@dataclass
class TrialResult:
    method: str
    trial: int
    seed: int
    n_known: int
    n_pseudo: int
    ecr: float
    edv: float
    discovered: int = 0
    expected_discovered: float = 0.0
    n_unknown: int = 0
    path_length: float = 0.0
    route_length: float = 0.0
    n_edges: int = 0
    planner_failures: int = 0
    wall_time: float = 0.0
    timed_out: bool = False

    @property
    def discovery_rate(self) -> float:
        return self.discovered / self.n_unknown if self.n_unknown else 0.0


@dataclass
class EdgePlan:
    vehicle: int
    index: int
    edge: Segment
    budget: float
    path: SplinePath
    samples: np.ndarray
    gamma: float | None = None
    ok: bool = True


def _route(nodes: NodeSet, fleet: FleetSpec, seed: int) -> Route:
    try:
        return solve_vrp(nodes, fleet, SolverConfig(seed=seed))
    except Exception as exc:
        raise StageError("routing", exc) from exc


def pseudo_nodes(scenario: Scenario, route: Route, edge_based: bool) -> np.ndarray:
    if scenario.n_pseudo == 0:
        return np.zeros((0, 2))
    cfg = scenario.cvt if edge_based else replace(scenario.cvt, beta_density=0.0)
    cfg = replace(cfg, n_pseudo=scenario.n_pseudo)
    try:
        gens = generate_pseudo_nodes(scenario.known, route_edges(route), scenario.domain, cfg,
                                     avoid=[scenario.depot])
    except Exception as exc:
        raise StageError("cvt", exc) from exc
    return gens.adaptive


def build_routes(scenario: Scenario, edge_based: bool = True):
    """(original route, augmented route) for a scenario."""
    nodes = NodeSet(scenario.depot, scenario.known, domain=scenario.domain)
    original = _route(nodes, scenario.fleet, scenario.seed)
    extra = pseudo_nodes(scenario, original, edge_based)
    if len(extra) == 0:
        return original, original
    return original, _route(nodes.augmented(extra), scenario.fleet, scenario.seed)


def _end_velocities(edges: Sequence[Segment], v_nom: float):
    dirs = [e.direction for e in edges]
    v0 = [v_nom * d for d in dirs]
    vf = [v_nom * dirs[i + 1] if i + 1 < len(dirs) else v_nom * dirs[i]
          for i in range(len(dirs))]
    return v0, vf


def plan_route(route: Route, scenario: Scenario, method: str,
               planner: PlannerConfig | None = None,
               bounds: KinematicBounds = KinematicBounds(),
               budgets: list[np.ndarray] | None = None,
               sv: SegmentVoronoi | None = None,
               init_cache: dict | None = None) -> list[EdgePlan]:
    """Per-edge paths in route order, each edge seeing all earlier samples.

    ``init_cache`` (edge index -> feasible lawnmower) lets several methods
    on the same route share the lawnmower construction, which does not
    depend on the hazard field.
    """
    if method not in PATH_METHODS:
        raise ValueError(f"unknown path method {method!r}")
    planner = planner or PlannerConfig()
    params = scenario.params
    if budgets is None or sv is None:
        try:
            budgets, sv = edge_budgets(route, scenario.fleet, scenario.domain, sv=sv)
        except Exception as exc:
            raise StageError("budget", exc) from exc
    v_nom = planner.nominal_speed(bounds)
    field = HazardField(scenario.known, params)
    init_cache = {} if init_cache is None else init_cache
    plans: list[EdgePlan] = []
    flat = 0
    for m, edges in enumerate(vehicle_edges(route)):
        v0s, vfs = _end_velocities(edges, v_nom)
        for i, e in enumerate(edges):
            B = float(budgets[m][i])
            gamma, ok = None, True
            if method == "straight":
                path = straight_path(e.a, e.b, bounds, planner)
                n_samples = None
            else:
                prob = EdgePlanningProblem(e.a, e.b, v0s[i], vfs[i], B,
                                           cell_grid_points(sv, flat), field, bounds)
                n_samples = prob.n_samples
                if flat in init_cache:
                    init, ok = init_cache[flat]
                else:
                    init, ok = feasible_lawnmower(prob, planner)
                    init_cache[flat] = (init, ok)
                path = init
                if method == "optimized" and ok:
                    try:
                        res = plan_edge(prob, init, planner)
                    except InfeasibleInit as exc:
                        log.warning("edge %d: planner skipped (%s)", flat, exc)
                        ok = False
                    else:
                        ok = res.success
                        gamma = res.gamma
                        if res.success:
                            path = res.path
            samples = path_samples(path, params, n_samples)
            plans.append(EdgePlan(m, i, e, B, path, samples, gamma, ok))
            field = field.with_samples(samples)
            flat += 1
    return plans


def _coverage_row(method, trial, scenario, route, n_pseudo, grid):
    rep = edge_coverage(route_edges(route), grid)
    return TrialResult(method, trial, scenario.seed, scenario.n_known, n_pseudo, rep.ecr, rep.edv,
                       n_unknown=len(scenario.unknown), route_length=route.total_length,
                       n_edges=len(route_edges(route)))


def run_pipeline(scenario: Scenario, methods: Sequence[str] = ALL_METHODS, trial: int = 0,
                 planner: PlannerConfig | None = None,
                 bounds: KinematicBounds = KinematicBounds()) -> list[TrialResult]:
    """Run every requested method on one scenario; one result per method.

    Path methods fly the edge-CVT route (the original route when the
    scenario has no pseudo-nodes). Detection uses per-hazard thresholds
    shared by all path methods (see :func:`detect_with_thresholds`).
    """
    unknown = [m for m in methods if m not in ALL_METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}")
    t_start = time.perf_counter()
    grid = metrics_grid(scenario.domain)
    init_cache: dict = {}
    thresholds = np.random.default_rng(scenario.detect_seed).random(len(scenario.unknown))
    out: list[TrialResult] = []
    original, edge_route = build_routes(scenario, edge_based=True)
    for method in methods:
        t0 = time.perf_counter()
        if method == "original":
            row = _coverage_row(method, trial, scenario, original, 0, grid)
        elif method == "node-cvt":
            _, node_route = build_routes(scenario, edge_based=False)
            row = _coverage_row(method, trial, scenario, node_route, scenario.n_pseudo, grid)
        elif method == "edge-cvt":
            row = _coverage_row(method, trial, scenario, edge_route, scenario.n_pseudo, grid)
        else:
            plans = plan_route(edge_route, scenario, method, planner, bounds,
                               init_cache=init_cache)
            log_miss = np.zeros(len(scenario.unknown))
            for p in plans:
                log_miss += miss_log_probability(p.samples, scenario.unknown, scenario.params)
            found = detect_with_thresholds(log_miss, thresholds)
            row = _coverage_row(method, trial, scenario, edge_route, scenario.n_pseudo, grid)
            row.discovered = len(found)
            row.expected_discovered = float(np.sum(-np.expm1(log_miss)))
            row.path_length = float(sum(p.path.arc_length() for p in plans))
            row.planner_failures = sum(not p.ok for p in plans)
        row.wall_time = time.perf_counter() - t0
        out.append(row)
    elapsed = time.perf_counter() - t_start
    for row in out:
        row.timed_out = elapsed > TRIAL_TIME_LIMIT
    return out
