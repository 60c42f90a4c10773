"""Pseudo-node placement by centroidal Voronoi tessellation with fixed generators.

Known hazards are fixed generators; pseudo-nodes are adaptive generators
moved to the density-weighted centroid of their Monte-Carlo Voronoi cell.
The density ``alpha + beta_density * d(x, E)`` grows with distance from the
current route edges ``E`` (edge-based CVT); ``beta_density = 0`` gives the
uniform node-based variant.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .geometry import RectDomain, Segment, as_points, distances_to_segments, segment_endpoints

MIN_SEPARATION = 1.0


@dataclass(frozen=True)
class CvtConfig:
    n_pseudo: int = 3
    alpha: float = 0.1
    beta_density: float = 0.9
    n_samples: int = 20_000
    max_iter: int = 50
    move_tol: float = 1.0
    seed: int = 0

    def validate(self, n_generators: int | None = None) -> None:
        if self.n_pseudo < 1:
            raise ValueError("n_pseudo must be at least 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.beta_density < 0:
            raise ValueError("beta_density must be non-negative")
        n_generators = self.n_pseudo if n_generators is None else n_generators
        if self.n_samples < 10 * n_generators:
            raise ValueError("n_samples must be at least 10 per generator")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class CvtDiagnostics:
    iterations: int
    converged: bool
    max_move: float
    reinitialized: int
    energy: tuple[float, ...] = ()


@dataclass(frozen=True)
class GeneratorSet:
    fixed: np.ndarray
    adaptive: np.ndarray
    diagnostics: CvtDiagnostics | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fixed", as_points(self.fixed))
        object.__setattr__(self, "adaptive", as_points(self.adaptive))

    @property
    def all(self) -> np.ndarray:
        return np.vstack([self.fixed, self.adaptive])


def density(p, edges: Sequence[Segment], alpha: float, beta_density: float):
    """``alpha + beta_density * (distance to nearest edge)`` at one or many points."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    p = np.asarray(p, dtype=float)
    pts = p.reshape(-1, 2)
    if beta_density == 0:
        out = np.full(len(pts), float(alpha))
    else:
        if len(edges) == 0:
            raise ValueError("density with beta_density > 0 needs at least one edge")
        a, b = segment_endpoints(edges)
        out = alpha + beta_density * distances_to_segments(pts, a, b).min(axis=1)
    return float(out[0]) if p.ndim == 1 else out


def _nearest(samples: np.ndarray, gens: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = ((samples[:, None, :] - gens[None, :, :]) ** 2).sum(axis=-1)
    idx = np.argmin(d2, axis=1)
    return idx, d2[np.arange(len(samples)), idx]


def cvt_energy(samples, weights, generators) -> float:
    """Monte-Carlo CVT energy ``sum_s rho(s) |s - nearest generator|^2``."""
    _, d2 = _nearest(as_points(samples), as_points(generators))
    return float(np.asarray(weights) @ d2)


def place_initial_pseudo_nodes(known, domain: RectDomain, n_pseudo: int, seed,
                               min_separation: float = MIN_SEPARATION) -> np.ndarray:
    """Uniform random pseudo-nodes, resampled if within 1 m of a known node."""
    if n_pseudo < 1:
        raise ValueError("n_pseudo must be at least 1")
    rng = np.random.default_rng(seed)
    known = as_points(known)
    out = []
    tries = 0
    while len(out) < n_pseudo:
        p = domain.sample_uniform(rng, 1)[0]
        taken = np.vstack([known] + ([np.array(out)] if out else []))
        if len(taken) and np.min(np.linalg.norm(taken - p, axis=1)) < min_separation:
            tries += 1
            if tries > 100_000:
                raise RuntimeError("domain too crowded to place pseudo-nodes")
            continue
        out.append(p)
    return np.array(out)


def run_cvt(generators: GeneratorSet, edges: Sequence[Segment], domain: RectDomain,
            cfg: CvtConfig) -> GeneratorSet:
    """Weighted Lloyd iterations on the adaptive generators only.

    Each iteration draws fresh uniform samples, assigns them to the nearest
    generator (fixed or adaptive) and moves every adaptive generator to the
    density-weighted mean of its samples. Stops after ``cfg.max_iter``
    iterations or once no adaptive generator moves by ``cfg.move_tol`` or
    more. A generator whose cell receives no samples is re-drawn uniformly.
    """
    fixed = generators.fixed.copy()
    adaptive = generators.adaptive.copy()
    if len(fixed) + len(adaptive) == 0:
        raise ValueError("run_cvt needs at least one generator")
    if len(adaptive) == 0:
        return GeneratorSet(fixed, adaptive, CvtDiagnostics(0, True, 0.0, 0))

    cfg.validate(len(fixed) + len(adaptive))
    rng = np.random.default_rng(cfg.seed)
    n_fixed = len(fixed)
    reinit = 0
    energies = []
    converged = False
    max_move = np.inf
    it = 0
    for it in range(1, cfg.max_iter + 1):
        samples = domain.sample_uniform(rng, cfg.n_samples)
        rho = density(samples, edges, cfg.alpha, cfg.beta_density)
        gens = np.vstack([fixed, adaptive])
        owner, d2 = _nearest(samples, gens)
        energies.append(float(rho @ d2))
        new = adaptive.copy()
        for i in range(len(adaptive)):
            mask = owner == n_fixed + i
            if not np.any(mask):
                new[i] = domain.sample_uniform(rng, 1)[0]
                reinit += 1
                continue
            w = rho[mask]
            new[i] = (w @ samples[mask]) / w.sum()
        max_move = float(np.max(np.linalg.norm(new - adaptive, axis=1)))
        adaptive = new
        if max_move < cfg.move_tol:
            converged = True
            break
    diag = CvtDiagnostics(it, converged, max_move, reinit, tuple(energies))
    return GeneratorSet(fixed, adaptive, diag)


def generate_pseudo_nodes(known, edges: Sequence[Segment], domain: RectDomain, cfg: CvtConfig,
                          avoid=()) -> GeneratorSet:
    """Random initial placement followed by :func:`run_cvt` (one seed drives both)."""
    known = as_points(known)
    init_seed, cvt_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    blocked = np.vstack([known, as_points(avoid)])
    init = place_initial_pseudo_nodes(blocked, domain, cfg.n_pseudo, init_seed)
    return run_cvt(GeneratorSet(known, init), edges, domain,
                   replace(cfg, seed=int(cvt_seed.generate_state(1)[0])))
