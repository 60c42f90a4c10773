"""Distance-constrained multi-vehicle routing from a single depot.

Every vehicle leaves the depot, visits a disjoint subset of the nodes and
returns; each tour is capped by the vehicle's maximum travel distance. The
heuristic solver builds nearest-neighbour tours and improves them with 2-opt,
Or-opt and inter-route relocation over several seeded restarts.
``solve_vrp_exact`` is a small-instance oracle (exact dynamic programme over
node subsets) used to check the heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import RectDomain, Segment, as_point, as_points

COST_EPS = 1e-9

KNOWN = "known"
PSEUDO = "pseudo"


class InfeasibleInstance(ValueError):
    """No route can visit every node within the vehicles' distance caps."""

    def __init__(self, message: str, nodes: Sequence[int] = ()):
        super().__init__(message)
        self.nodes = tuple(int(i) for i in nodes)


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class NodeSet:
    """Depot (index 0) plus nodes with indices ``1..N``.

    ``kinds[i - 1]`` tells whether node ``i`` is a known hazard or a pseudo-node.
    """

    depot: np.ndarray
    nodes: np.ndarray
    kinds: tuple[str, ...] = ()
    domain: RectDomain | None = None

    def __post_init__(self):
        depot = as_point(self.depot)
        nodes = as_points(self.nodes)
        kinds = tuple(self.kinds) if self.kinds else (KNOWN,) * len(nodes)
        if len(kinds) != len(nodes):
            raise ValueError("one kind label per node is required")
        if any(k not in (KNOWN, PSEUDO) for k in kinds):
            raise ValueError(f"unknown node kind in {set(kinds)}")
        if self.domain is not None:
            if not self.domain.contains(depot) or not np.all(self.domain.contains(nodes)):
                raise ValueError("all nodes must lie inside the domain")
        if len(nodes) and np.any(np.linalg.norm(nodes - depot, axis=1) == 0.0):
            raise ValueError("depot must be distinct from every node")
        object.__setattr__(self, "depot", depot)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "kinds", kinds)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def positions(self) -> np.ndarray:
        """All positions, depot first, so row ``i`` is node index ``i``."""
        return np.vstack([self.depot[None, :], self.nodes])

    def distance_matrix(self) -> np.ndarray:
        pos = self.positions
        diff = pos[:, None, :] - pos[None, :, :]
        return np.sqrt((diff ** 2).sum(axis=-1))

    def augmented(self, extra, kind: str = PSEUDO) -> "NodeSet":
        extra = as_points(extra)
        return NodeSet(self.depot, np.vstack([self.nodes, extra]),
                       self.kinds + (kind,) * len(extra), self.domain)

    def relabeled(self, perm: Sequence[int]) -> "NodeSet":
        """Node set with ``new node j+1 = old node perm[j]+1``."""
        perm = list(perm)
        return NodeSet(self.depot, self.nodes[perm], tuple(self.kinds[p] for p in perm),
                       self.domain)


@dataclass(frozen=True)
class FleetSpec:
    max_distance: tuple[float, ...]

    def __post_init__(self):
        md = tuple(float(d) for d in np.atleast_1d(self.max_distance))
        if len(md) < 1:
            raise ValueError("fleet needs at least one vehicle")
        if any(not (d > 0) for d in md):
            raise ValueError("every vehicle needs a positive distance cap")
        object.__setattr__(self, "max_distance", md)

    @classmethod
    def uniform(cls, n_vehicles: int, max_distance: float) -> "FleetSpec":
        return cls((float(max_distance),) * int(n_vehicles))

    @property
    def n_vehicles(self) -> int:
        return len(self.max_distance)


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 20
    seed: int = 0
    max_passes: int = 1000


@dataclass(frozen=True)
class Route:
    """Per-vehicle tours as node-index sequences that start and end at 0."""

    sequences: tuple[tuple[int, ...], ...]
    lengths: tuple[float, ...]
    nodes: NodeSet = field(repr=False)

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))

    @property
    def n_vehicles(self) -> int:
        return len(self.sequences)

    def visit_order(self) -> dict[int, tuple[int, int]]:
        """Map node index -> (vehicle, 1-based position in its tour)."""
        out = {}
        for m, seq in enumerate(self.sequences):
            for pos, node in enumerate(seq[1:-1], start=1):
                out[node] = (m, pos)
        return out


def route_edges(route: Route) -> list[Segment]:
    """Consecutive-pair segments for every vehicle, depot legs included."""
    pos = route.nodes.positions
    return [Segment(pos[i], pos[j])
            for seq in route.sequences for i, j in zip(seq[:-1], seq[1:])]


def vehicle_edges(route: Route) -> list[list[Segment]]:
    pos = route.nodes.positions
    return [[Segment(pos[i], pos[j]) for i, j in zip(seq[:-1], seq[1:])]
            for seq in route.sequences]


def tour_length(seq: Sequence[int], dist: np.ndarray) -> float:
    s = np.asarray(seq)
    return float(dist[s[:-1], s[1:]].sum())


def validate_route(route: Route, fleet: FleetSpec, tol: float = 1e-9) -> None:
    """Raise ``AssertionError`` if the route breaks any structural invariant."""
    n = len(route.nodes)
    dist = route.nodes.distance_matrix()
    assert len(route.sequences) == fleet.n_vehicles
    seen = []
    for m, seq in enumerate(route.sequences):
        assert seq[0] == 0 and seq[-1] == 0, f"vehicle {m} must start and end at the depot"
        inner = seq[1:-1]
        assert len(inner) >= 1, f"vehicle {m} never leaves the depot"
        assert 0 not in inner
        assert len(set(inner)) == len(inner), f"vehicle {m} revisits a node"
        length = tour_length(seq, dist)
        assert abs(length - route.lengths[m]) <= 1e-6
        assert length <= fleet.max_distance[m] + tol, f"vehicle {m} exceeds its budget"
        seen.extend(inner)
    assert sorted(seen) == list(range(1, n + 1)), "every node is visited exactly once"


def _check_reachable(dist: np.ndarray, fleet: FleetSpec) -> None:
    n = dist.shape[0] - 1
    if fleet.n_vehicles > n:
        raise InfeasibleInstance(
            f"{fleet.n_vehicles} vehicles but only {n} nodes; every vehicle must leave the depot")
    cap = max(fleet.max_distance)
    bad = [i for i in range(1, n + 1) if 2.0 * dist[0, i] > cap + COST_EPS]
    if bad:
        raise InfeasibleInstance(
            f"nodes {bad} cannot be reached and returned from within any vehicle's budget", bad)


# --- intra-route moves ------------------------------------------------------

def _best_two_opt(t: list[int], dist: np.ndarray):
    n = len(t)
    best = (-COST_EPS, None, None)
    for i in range(1, n - 2):
        a, b = t[i - 1], t[i]
        dab = dist[a, b]
        for j in range(i + 1, n - 1):
            c, d = t[j], t[j + 1]
            delta = dist[a, c] + dist[b, d] - dab - dist[c, d]
            if delta < best[0] - COST_EPS or (
                    best[1] is not None and abs(delta - best[0]) <= COST_EPS
                    and (b, c) < best[2]):
                best = (delta, (i, j), (b, c))
    return best[0], best[1]


def _best_or_opt(t: list[int], dist: np.ndarray, max_len: int = 3):
    n = len(t)
    best = (-COST_EPS, None, None)
    for seg_len in range(1, max_len + 1):
        for i in range(1, n - seg_len):
            j = i + seg_len - 1
            p, q = t[i - 1], t[j + 1]
            s0, s1 = t[i], t[j]
            removal = dist[p, q] - dist[p, s0] - dist[s1, q]
            for k in range(0, n - 1):
                if i - 1 <= k <= j:
                    continue
                u, v = t[k], t[k + 1]
                base = removal - dist[u, v]
                for rev in (False, True):
                    first, last = (s1, s0) if rev else (s0, s1)
                    delta = base + dist[u, first] + dist[last, v]
                    key = (s0, seg_len, u, rev)
                    if delta < best[0] - COST_EPS or (
                            best[1] is not None and abs(delta - best[0]) <= COST_EPS
                            and key < best[2]):
                        best = (delta, (i, j, k, rev), key)
    return best[0], best[1]


def _apply_or_opt(t: list[int], move) -> list[int]:
    i, j, k, rev = move
    seg = t[i:j + 1]
    if rev:
        seg = seg[::-1]
    rest = t[:i] + t[j + 1:]
    # k indexed the original tour; shift if it sat after the removed block
    k_new = k if k < i else k - len(seg)
    return rest[:k_new + 1] + seg + rest[k_new + 1:]


def improve_tour(t: list[int], dist: np.ndarray, max_passes: int = 1000) -> list[int]:
    """2-opt then Or-opt until neither finds an improving move."""
    t = list(t)
    for _ in range(max_passes):
        delta, mv = _best_two_opt(t, dist)
        if mv is not None:
            i, j = mv
            t[i:j + 1] = t[i:j + 1][::-1]
            continue
        delta, mv = _best_or_opt(t, dist)
        if mv is not None:
            t = _apply_or_opt(t, mv)
            continue
        break
    return t


# --- inter-route moves ------------------------------------------------------

def _best_relocate(tours: list[list[int]], lengths: list[float], caps, dist):
    best = (-COST_EPS, None)
    for a, ta in enumerate(tours):
        if len(ta) <= 3:
            continue  # donor must keep at least one node
        for i in range(1, len(ta) - 1):
            p, x, q = ta[i - 1], ta[i], ta[i + 1]
            gain = dist[p, q] - dist[p, x] - dist[x, q]
            for b, tb in enumerate(tours):
                if b == a:
                    continue
                for k in range(len(tb) - 1):
                    u, v = tb[k], tb[k + 1]
                    add = dist[u, x] + dist[x, v] - dist[u, v]
                    if lengths[b] + add > caps[b] + COST_EPS:
                        continue
                    delta = gain + add
                    if delta < best[0] - COST_EPS:
                        best = (delta, (a, i, b, k))
    return best[1]


def _best_swap(tours: list[list[int]], lengths: list[float], caps, dist):
    best = (-COST_EPS, None)
    for a in range(len(tours)):
        ta = tours[a]
        for b in range(a + 1, len(tours)):
            tb = tours[b]
            for i in range(1, len(ta) - 1):
                p, x, q = ta[i - 1], ta[i], ta[i + 1]
                for k in range(1, len(tb) - 1):
                    u, y, v = tb[k - 1], tb[k], tb[k + 1]
                    da = dist[p, y] + dist[y, q] - dist[p, x] - dist[x, q]
                    db = dist[u, x] + dist[x, v] - dist[u, y] - dist[y, v]
                    if lengths[a] + da > caps[a] + COST_EPS or lengths[b] + db > caps[b] + COST_EPS:
                        continue
                    if da + db < best[0] - COST_EPS:
                        best = (da + db, (a, i, b, k))
    return best[1]


def _local_search(tours, caps, dist, max_passes):
    tours = [improve_tour(t, dist, max_passes) for t in tours]
    if len(tours) == 1:
        return tours
    for _ in range(max_passes):
        lengths = [tour_length(t, dist) for t in tours]
        mv = _best_relocate(tours, lengths, caps, dist)
        if mv is not None:
            a, i, b, k = mv
            x = tours[a].pop(i)
            tours[b].insert(k + 1, x)
        else:
            mv = _best_swap(tours, lengths, caps, dist)
            if mv is None:
                break
            a, i, b, k = mv
            tours[a][i], tours[b][k] = tours[b][k], tours[a][i]
        tours[a] = improve_tour(tours[a], dist, max_passes)
        tours[b] = improve_tour(tours[b], dist, max_passes)
    return tours


# --- construction -----------------------------------------------------------

def _nearest_neighbour_tour(start_node: int | None, nodes: list[int], dist) -> list[int]:
    remaining = set(nodes)
    tour = [0]
    if start_node is not None:
        tour.append(start_node)
        remaining.discard(start_node)
    while remaining:
        last = tour[-1]
        nxt = min(remaining, key=lambda j: (dist[last, j], j))
        tour.append(nxt)
        remaining.discard(nxt)
    tour.append(0)
    return tour


def _greedy_fleet(dist, caps, rng: np.random.Generator | None):
    """Seed each vehicle with one node, then grow the route whose end is nearest."""
    n = dist.shape[0] - 1
    n_veh = len(caps)
    remaining = set(range(1, n + 1))
    tours = [[0] for _ in range(n_veh)]
    used = [0.0] * n_veh
    order = list(range(n_veh))
    if rng is not None:
        seeds = list(rng.permutation(np.arange(1, n + 1))[:n_veh])
    else:
        seeds = []
        for _ in order:
            j = min(remaining - set(seeds), key=lambda j: (dist[0, j], j))
            seeds.append(j)
    for m, j in zip(order, seeds):
        j = int(j)
        tours[m].append(j)
        used[m] += dist[0, j]
        remaining.discard(j)
    while remaining:
        best = None
        for m in range(n_veh):
            last = tours[m][-1]
            for j in remaining:
                if used[m] + dist[last, j] + dist[j, 0] > caps[m] + COST_EPS:
                    continue
                key = (dist[last, j], m, j)
                if best is None or key < best:
                    best = key
        if best is None:
            return None, sorted(remaining)
        _, m, j = best
        used[m] += dist[tours[m][-1], j]
        tours[m].append(j)
        remaining.discard(j)
    return [t + [0] for t in tours], []


def solve_vrp(nodes: NodeSet, fleet: FleetSpec, config: SolverConfig | None = None) -> Route:
    """Heuristic minimum-total-distance routes under per-vehicle distance caps.

    Raises
    ------
    InfeasibleInstance
        If a node cannot be reached within any vehicle's budget, there are
        more vehicles than nodes, or no restart places every node within the
        caps. ``exc.nodes`` lists the offending node indices.
    """
    config = config or SolverConfig()
    dist = nodes.distance_matrix()
    n = len(nodes)
    if n == 0:
        raise InfeasibleInstance("routing needs at least one node")
    _check_reachable(dist, fleet)
    caps = list(fleet.max_distance)
    single = fleet.n_vehicles == 1

    best = None
    unplaced: list[int] = []
    for r in range(max(1, config.restarts)):
        rng = None if r == 0 else np.random.default_rng([config.seed, r])
        if single:
            start = None if rng is None else int(rng.integers(1, n + 1))
            tours = [_nearest_neighbour_tour(start, list(range(1, n + 1)), dist)]
        else:
            tours, missing = _greedy_fleet(dist, caps, rng)
            if tours is None:
                unplaced = missing
                continue
        tours = _local_search(tours, caps, dist, config.max_passes)
        lengths = [tour_length(t, dist) for t in tours]
        if any(lengths[m] > caps[m] + COST_EPS for m in range(len(tours))):
            if not unplaced:
                unplaced = [j for m, t in enumerate(tours) if lengths[m] > caps[m] for j in t[1:-1]]
            continue
        cost = sum(lengths)
        if best is None or cost < best[0] - COST_EPS:
            best = (cost, tours, lengths)

    if best is None:
        raise InfeasibleInstance(
            f"no restart produced routes within the distance caps {caps}", unplaced)
    _, tours, lengths = best
    return Route(tuple(tuple(int(v) for v in t) for t in tours), tuple(lengths), nodes)


# --- exact oracle -------------------------------------------------------------

MAX_EXACT_NODES = 10
MAX_EXACT_VEHICLES = 2


def _subset_tours(dist: np.ndarray):
    """Shortest depot tour for every non-empty node subset (Held-Karp)."""
    n = dist.shape[0] - 1
    full = 1 << n
    dp = np.full((full, n), np.inf)
    parent = np.full((full, n), -1, dtype=int)
    for j in range(n):
        dp[1 << j, j] = dist[0, j + 1]
    inner = dist[1:, 1:]
    for mask in range(1, full):
        row = dp[mask]
        if not np.isfinite(row).any():
            continue
        cand = row[:, None] + inner          # cand[j, k]: end at j then go to k
        best_j = np.argmin(cand, axis=0)
        best_v = cand[best_j, np.arange(n)]
        for k in range(n):
            if mask & (1 << k):
                continue
            nm = mask | (1 << k)
            if best_v[k] < dp[nm, k]:
                dp[nm, k] = best_v[k]
                parent[nm, k] = best_j[k]
    close = dp + dist[1:, 0][None, :]
    tour_len = close.min(axis=1)
    tour_end = close.argmin(axis=1)
    return tour_len, tour_end, parent


def _rebuild(mask: int, end: int, parent: np.ndarray) -> list[int]:
    seq = []
    while end >= 0:
        seq.append(int(end) + 1)
        prev = int(parent[mask, end])
        mask &= ~(1 << end)
        end = prev
    return [0] + seq[::-1] + [0]


def solve_vrp_exact(nodes: NodeSet, fleet: FleetSpec) -> Route:
    """Global optimum for at most 10 nodes and 2 vehicles.

    Shortest tours for every node subset come from a Held-Karp table; the
    fleet optimum is then the best partition of the nodes into per-vehicle
    subsets that respects each cap.
    """
    n = len(nodes)
    if n > MAX_EXACT_NODES or fleet.n_vehicles > MAX_EXACT_VEHICLES:
        raise InstanceTooLarge(
            f"exact solver limited to {MAX_EXACT_NODES} nodes and "
            f"{MAX_EXACT_VEHICLES} vehicles (got {n}, {fleet.n_vehicles})")
    if n == 0:
        raise InfeasibleInstance("routing needs at least one node")
    dist = nodes.distance_matrix()
    _check_reachable(dist, fleet)
    tour_len, tour_end, parent = _subset_tours(dist)
    full = (1 << n) - 1
    caps = fleet.max_distance

    if fleet.n_vehicles == 1:
        if tour_len[full] > caps[0] + COST_EPS:
            raise InfeasibleInstance("optimal tour exceeds the vehicle's budget",
                                     range(1, n + 1))
        seq = _rebuild(full, int(tour_end[full]), parent)
        return Route((tuple(seq),), (tour_length(seq, dist),), nodes)

    best = None
    for mask in range(1, full):
        other = full ^ mask
        la, lb = tour_len[mask], tour_len[other]
        if la > caps[0] + COST_EPS or lb > caps[1] + COST_EPS:
            continue
        if best is None or la + lb < best[0] - COST_EPS:
            best = (la + lb, mask, other)
    if best is None:
        raise InfeasibleInstance("no partition of the nodes fits both budgets",
                                 range(1, n + 1))
    _, ma, mb = best
    seqs = [_rebuild(ma, int(tour_end[ma]), parent), _rebuild(mb, int(tour_end[mb]), parent)]
    return Route(tuple(tuple(s) for s in seqs), tuple(tour_length(s, dist) for s in seqs), nodes)
