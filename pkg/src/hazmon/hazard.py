"""Hazard world model: correlated prior, sensing likelihoods, no-detection posterior.

The prior that an unknown hazard sits at ``x`` combines a Gaussian-kernel
correlation with every known hazard and a uniform baseline ``p_h``::

    P(x) = 1 - prod_i (1 - exp(-lambda |x - x_i|^2)) * (1 - p_h)

A sample at ``s`` detects a hazard at ``x`` with probability
``exp(-beta |s - x|^2)`` and raises a false alarm with probability ``p_fa``.
After ``N`` samples none of which detected anything, Bayes' rule gives the
posterior evaluated by :func:`posterior`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import RectDomain, as_points

LOG_SPACE_MIN_SAMPLES = 50
MAX_REJECTIONS = 1_000_000


class DegenerateEvidence(ValueError):
    pass


@dataclass(frozen=True)
class HazardParams:
    lambda_corr: float = 0.00015
    p_h: float = 0.3
    beta_sense: float = 0.002
    p_fa: float = 0.001
    delta_s: float = 0.1

    def __post_init__(self):
        for name in ("p_h", "p_fa"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability, got {v}")
        for name in ("lambda_corr", "beta_sense", "delta_s"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def rung_spacing(self) -> float:
        """Range at which a single sample's detection probability falls to 10%."""
        return float(np.sqrt(np.log(10.0) / self.beta_sense))


def _sqdist(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return ((a - b) ** 2).sum(axis=-1)


def pair_prior(x_u, x_k, lambda_corr: float):
    """Correlation of an unknown hazard at ``x_u`` with a known hazard at ``x_k``."""
    out = np.exp(-lambda_corr * _sqdist(x_u, x_k))
    return float(out) if np.ndim(out) == 0 else out


def detect_prob(x_s, x_u, beta_sense: float):
    out = np.exp(-beta_sense * _sqdist(x_s, x_u))
    return float(out) if np.ndim(out) == 0 else out


def combined_prior(x_u, known, params: HazardParams):
    """Prior hazard probability at ``x_u`` (one point or ``(N, 2)``)."""
    pts = np.asarray(x_u, dtype=float)
    flat = pts.reshape(-1, 2)
    known = as_points(known)
    miss = np.ones(len(flat))
    for xk in known:
        miss = miss * (1.0 - pair_prior(flat, xk, params.lambda_corr))
    out = 1.0 - miss * (1.0 - params.p_h)
    return float(out[0]) if pts.ndim == 1 else out


def no_detection_loglik(points, samples, beta_sense: float) -> np.ndarray:
    """``sum_j log(1 - P(D_j | x))`` for each point (``-inf`` on a sample)."""
    pts = as_points(points)
    samples = as_points(samples)
    if len(samples) == 0:
        return np.zeros(len(pts))
    out = np.zeros(len(pts))
    # chunk over samples to bound memory on long trajectories
    for lo in range(0, len(samples), 2048):
        chunk = samples[lo:lo + 2048]
        d2 = ((pts[:, None, :] - chunk[None, :, :]) ** 2).sum(axis=-1)
        with np.errstate(divide="ignore"):
            out += np.log(-np.expm1(-beta_sense * d2)).sum(axis=1)
    return out


def posterior_from_prior(prior, loglik, n_samples: int, p_fa: float) -> np.ndarray:
    """Bayes quotient given the prior, the no-detection log-likelihood and ``N``."""
    prior = np.asarray(prior, dtype=float)
    loglik = np.asarray(loglik, dtype=float)
    if n_samples == 0:
        return prior.copy()
    if n_samples <= LOG_SPACE_MIN_SAMPLES:
        like = np.exp(loglik)
        num = like * prior
        evidence = num + (1.0 - p_fa) ** n_samples * (1.0 - prior)
        if np.any(evidence == 0.0):
            raise DegenerateEvidence("no-detection evidence is zero (p_fa = 1?)")
        return num / evidence
    # log-odds form avoids underflow of long likelihood products
    log_false = n_samples * np.log1p(-p_fa) if p_fa < 1.0 else -np.inf
    with np.errstate(divide="ignore"):
        log_num = loglik + np.log(prior)
        log_alt = log_false + np.log1p(-prior)
    both_dead = np.isneginf(log_num) & np.isneginf(log_alt)
    if np.any(both_dead):
        raise DegenerateEvidence("no-detection evidence is zero (p_fa = 1?)")
    with np.errstate(invalid="ignore"):
        z = log_num - log_alt
    return np.where(np.isneginf(log_num), 0.0,
                    np.where(np.isneginf(log_alt), 1.0, 1.0 / (1.0 + np.exp(-z))))


@dataclass(frozen=True)
class HazardField:
    """Known hazards plus every no-detection sample location gathered so far."""

    known: np.ndarray
    params: HazardParams
    samples: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        known = as_points(self.known).copy()
        samples = as_points(self.samples).copy()
        known.setflags(write=False)
        samples.setflags(write=False)
        object.__setattr__(self, "known", known)
        object.__setattr__(self, "samples", samples)

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def prior(self, points) -> np.ndarray:
        return combined_prior(as_points(points), self.known, self.params)

    def loglik(self, points) -> np.ndarray:
        return no_detection_loglik(points, self.samples, self.params.beta_sense)

    def posterior(self, points) -> np.ndarray:
        pts = as_points(points)
        return posterior_from_prior(self.prior(pts), self.loglik(pts), self.n_samples,
                                    self.params.p_fa)

    def with_samples(self, new_samples) -> "HazardField":
        new = as_points(new_samples)
        return HazardField(self.known, self.params, np.vstack([self.samples, new]))


def posterior(x_u, field: HazardField):
    pts = np.asarray(x_u, dtype=float)
    out = field.posterior(pts.reshape(-1, 2))
    return float(out[0]) if pts.ndim == 1 else out


def sample_unknown_hazards(known, params: HazardParams, domain: RectDomain, n_unknown: int,
                           seed) -> np.ndarray:
    """Rejection-sample hazard locations from the combined prior.

    Candidates are uniform in the domain and accepted with probability equal
    to the prior there.
    """
    if n_unknown < 0:
        raise ValueError("n_unknown must be non-negative")
    rng = np.random.default_rng(seed)
    known = as_points(known)
    accepted = []
    n_acc = 0
    rejected_run = 0
    batch = 4096
    while n_acc < n_unknown:
        cand = domain.sample_uniform(rng, batch)
        keep = rng.random(batch) < combined_prior(cand, known, params)
        idx = np.flatnonzero(keep)
        if len(idx) == 0:
            rejected_run += batch
            if rejected_run >= MAX_REJECTIONS:
                raise RuntimeError("rejection sampler stalled; prior is nearly zero everywhere")
            continue
        rejected_run = batch - 1 - idx[-1]
        take = idx[:n_unknown - n_acc]
        accepted.append(cand[take])
        n_acc += len(take)
    if not accepted:
        return np.zeros((0, 2))
    return np.vstack(accepted)
