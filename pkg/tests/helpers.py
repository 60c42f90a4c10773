"""Random edge-planning problems shared by the optimizer and acceptance tests."""

import numpy as np

from hazmon.geometry import RectDomain, Segment
from hazmon.budget import build_segment_voronoi
from hazmon.hazard import HazardField, HazardParams
from hazmon.optimizer import EdgePlanningProblem, KinematicBounds, cell_grid_points

DOM = RectDomain(0, 1000, 0, 1000)


def random_problem(seed: int, stretch=(1.3, 2.2), with_samples: bool = True):
    rng = np.random.default_rng(seed)
    while True:
        a, b = rng.uniform(150, 850, (2, 2))
        if 150 < np.linalg.norm(b - a) < 450:
            break
    # a three-edge route through a, b and a third corner gives a real Voronoi cell
    c = rng.uniform(150, 850, 2)
    edges = [Segment(c, a), Segment(a, b), Segment(b, c)]
    sv = build_segment_voronoi(edges, DOM, 100)
    known = rng.uniform(0, 1000, (int(rng.integers(2, 8)), 2))
    field = HazardField(known, HazardParams())
    if with_samples:
        field = field.with_samples(rng.uniform(0, 1000, (int(rng.integers(0, 300)), 2)))
    bounds = KinematicBounds()
    d = (b - a) / np.linalg.norm(b - a)
    d_next = (c - b) / np.linalg.norm(c - b)
    budget = float(np.linalg.norm(b - a) * rng.uniform(*stretch))
    v = bounds.v_nominal
    return EdgePlanningProblem(a, b, v * d, v * d_next, budget, cell_grid_points(sv, 1), field,
                               bounds)


def posterior_mean(path, problem, n_samples=None):
    """Independent recomputation: mean stored-field posterior after adding the samples."""
    n = problem.n_samples if n_samples is None else n_samples
    pts = path.eval(np.linspace(path.t0, path.tf, n + 1))
    return float(problem.field.with_samples(pts).posterior(problem.grid).mean())


def sequential_posterior(prior, x, samples, beta, p_fa):
    """Bayes rule applied one no-detection sample at a time."""
    p = prior
    for s in samples:
        miss = 1.0 - np.exp(-beta * np.sum((np.asarray(s) - x) ** 2))
        num = p * miss
        p = num / (num + (1.0 - p) * (1.0 - p_fa))
    return p
