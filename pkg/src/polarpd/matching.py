"""Bottleneck, Wasserstein, and sliced Wasserstein distances between diagrams.

All three operate on the finite points of a single homology dimension;
essential classes are excluded (compare their counts separately, or cap
them first). Unmatched points pay the cost of their projection onto the
diagonal. The bottleneck optimum is exact: a binary search over the finite
set of candidate costs with bipartite-matching feasibility tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .diagrams import DiagramPoint, PersistenceDiagram

DIAGONAL = None  # sentinel for a diagonal assignment inside a Matching


@dataclass(frozen=True)
class MetricParams:
    """Wasserstein order, sliced direction count, and ground metric."""

    p: float = 1.0
    directions: int = 32
    ground: str = "linf"  # or "l2"

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"Wasserstein order p must be >= 1, got {self.p}")
        if self.directions < 1:
            raise ValueError("directions must be a positive integer")
        if self.ground not in ("linf", "l2"):
            raise ValueError(f"unknown ground metric {self.ground!r}")


@dataclass(frozen=True)
class Matching:
    """Partial bijection with diagonal assignments and per-pair costs."""

    pairs: tuple[tuple[DiagramPoint | None, DiagramPoint | None], ...]
    costs: tuple[float, ...]

    def __post_init__(self):
        if len(self.pairs) != len(self.costs):
            raise ValueError("pairs and costs must have equal length")
        for left, right in self.pairs:
            if left is DIAGONAL and right is DIAGONAL:
                raise ValueError("diagonal-to-diagonal pairs are excluded")


def _points(diagram: PersistenceDiagram) -> np.ndarray:
    dims = {p.dimension for p in diagram.points}
    if len(dims) > 1:
        raise ValueError(
            f"mixed dimensions {sorted(dims)}: restrict the diagram first"
        )
    return diagram.as_array()


def _pair_costs(P: np.ndarray, Q: np.ndarray, ground: str) -> np.ndarray:
    diff = np.abs(P[:, None, :] - Q[None, :, :])
    if ground == "linf":
        return diff.max(axis=2)
    return np.sqrt((diff ** 2).sum(axis=2))


def _diag_costs(P: np.ndarray, ground: str) -> np.ndarray:
    pers = P[:, 1] - P[:, 0]
    return pers / 2.0 if ground == "linf" else pers / math.sqrt(2.0)


def _as_point(row: np.ndarray, dim: int) -> DiagramPoint:
    return DiagramPoint(float(row[0]), float(row[1]), dim)


def _dim_of(diagram: PersistenceDiagram) -> int:
    return diagram.points[0].dimension if diagram.points else 0


def _matching_from_index_pairs(P, Q, index_pairs, costs, dim) -> Matching:
    pairs = []
    for i, j in index_pairs:
        left = _as_point(P[i], dim) if i is not None else DIAGONAL
        right = _as_point(Q[j], dim) if j is not None else DIAGONAL
        pairs.append((left, right))
    return Matching(tuple(pairs), tuple(float(c) for c in costs))


# ---------------------------------------------------------------------------
# minimax assignment (bottleneck objective)
# ---------------------------------------------------------------------------

def _perfect_matching(cost, diag1, diag2, delta):
    """Kuhn's algorithm on the diagonal-augmented bipartite graph.

    Left side: n real points then m diagonal slots; right side: m real
    points then n diagonal slots. Returns the right-match array or None
    when no perfect matching exists at threshold ``delta``.
    """
    n, m = cost.shape
    size = n + m

    def neighbours(l):
        if l < n:
            for j in range(m):
                if cost[l, j] <= delta:
                    yield j
            if diag1[l] <= delta:
                yield from range(m, size)
        else:
            for j in range(m):
                if diag2[j] <= delta:
                    yield j
            yield from range(m, size)

    match_right = [-1] * size  # right node -> left node

    def augment(l, seen):
        for r in neighbours(l):
            if seen[r]:
                continue
            seen[r] = True
            if match_right[r] == -1 or augment(match_right[r], seen):
                match_right[r] = l
                return True
        return False

    for l in range(size):
        if not augment(l, [False] * size):
            return None
    return match_right


def _minimax_assignment(cost, diag1, diag2):
    """Exact minimax value over diagonal-augmented matchings, with witness."""
    n, m = cost.shape
    if n == 0 and m == 0:
        return 0.0, []
    candidates = {0.0}
    candidates.update(float(c) for c in cost.ravel())
    candidates.update(float(c) for c in diag1)
    candidates.update(float(c) for c in diag2)
    values = sorted(candidates)
    lo, hi = 0, len(values) - 1
    # values[-1] is always feasible (match everything to the diagonal or
    # directly), so the search is over a non-empty feasible suffix
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching(cost, diag1, diag2, values[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    delta = values[lo]
    match_right = _perfect_matching(cost, diag1, diag2, delta)
    index_pairs, costs = [], []
    for r, l in enumerate(match_right):
        if l < n and r < m:
            index_pairs.append((l, r))
            costs.append(cost[l, r])
        elif l < n:
            index_pairs.append((l, None))
            costs.append(diag1[l])
        elif r < m:
            index_pairs.append((None, r))
            costs.append(diag2[r])
    return delta, list(zip(index_pairs, costs))


def bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Exact bottleneck distance (L-infinity ground metric)."""
    P, Q = _points(d1), _points(d2)
    cost = _pair_costs(P, Q, "linf")
    value, _ = _minimax_assignment(cost, _diag_costs(P, "linf"), _diag_costs(Q, "linf"))
    return float(value)


# ---------------------------------------------------------------------------
# minimum-sum assignment (Wasserstein objective)
# ---------------------------------------------------------------------------

def _minsum_assignment(costpow, diag1pow, diag2pow):
    """Optimal total cost on the diagonal-augmented square matrix."""
    n, m = costpow.shape
    big = np.zeros((n + m, m + n))
    big[:n, :m] = costpow
    big[:n, m:] = diag1pow[:, None]
    big[n:, :m] = diag2pow[None, :]
    rows, cols = linear_sum_assignment(big)
    total = float(big[rows, cols].sum())
    index_pairs = []
    for r, c in zip(rows, cols):
        if r < n and c < m:
            index_pairs.append(((r, c), costpow[r, c]))
        elif r < n:
            index_pairs.append(((r, None), diag1pow[r]))
        elif c < m:
            index_pairs.append(((None, c), diag2pow[c]))
    return total, index_pairs


def wasserstein(
    d1: PersistenceDiagram,
    d2: PersistenceDiagram,
    params: MetricParams = MetricParams(),
) -> float:
    """p-Wasserstein distance with diagonal augmentation.

    Solved as a square assignment problem where every point may also match
    its own diagonal projection. Costs are rescaled by their maximum before
    raising to the p-th power, so large orders stay in floating range.
    """
    P, Q = _points(d1), _points(d2)
    n, m = len(P), len(Q)
    if n == 0 and m == 0:
        return 0.0
    cost = _pair_costs(P, Q, params.ground)
    diag1 = _diag_costs(P, params.ground)
    diag2 = _diag_costs(Q, params.ground)
    scale = max(
        cost.max() if cost.size else 0.0,
        diag1.max() if diag1.size else 0.0,
        diag2.max() if diag2.size else 0.0,
    )
    if scale == 0.0:
        return 0.0
    p = params.p
    total, _ = _minsum_assignment(
        (cost / scale) ** p, (diag1 / scale) ** p, (diag2 / scale) ** p
    )
    return float(scale * total ** (1.0 / p))


# ---------------------------------------------------------------------------
# sliced Wasserstein
# ---------------------------------------------------------------------------

def _mirrors(P: np.ndarray) -> np.ndarray:
    mids = P.mean(axis=1, keepdims=True)
    return np.hstack([mids, mids])


def sliced_wasserstein(
    d1: PersistenceDiagram,
    d2: PersistenceDiagram,
    params: MetricParams = MetricParams(),
) -> float:
    """Projection-averaged Wasserstein distance.

    Each side is augmented with the diagonal projections of the opposite
    side's points, then both multisets are projected onto N directions
    (midpoints of a uniform grid on [0, pi)) and matched by sorting.
    """
    P, Q = _points(d1), _points(d2)
    if len(P) + len(Q) == 0:
        return 0.0
    A = np.vstack([P, _mirrors(Q)]) if len(Q) else P
    B = np.vstack([Q, _mirrors(P)]) if len(P) else Q
    N = params.directions
    thetas = (np.arange(N) + 0.5) * np.pi / N
    dirs = np.vstack([np.cos(thetas), np.sin(thetas)])  # (2, N)
    pa = np.sort(A @ dirs, axis=0)
    pb = np.sort(B @ dirs, axis=0)
    p = params.p
    per_direction = (np.abs(pa - pb) ** p).sum(axis=0)  # W_p^p per theta
    return float(per_direction.mean() ** (1.0 / p))


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

def _enumerate_matchings(n: int, m: int):
    """Yield every partial injection as a list of (i, j) index pairs."""
    for k in range(min(n, m) + 1):
        for left in combinations(range(n), k):
            for right in permutations(range(m), k):
                yield list(zip(left, right))


def brute_force_match(
    d1: PersistenceDiagram,
    d2: PersistenceDiagram,
    params: MetricParams = MetricParams(),
    objective: str = "wasserstein",
) -> tuple[float, Matching]:
    """Exhaustive optimum over all matchings with diagonal options.

    Supports the bottleneck (max) and Wasserstein (sum of p-th powers)
    objectives; combined point count is capped at 8.
    """
    if objective not in ("wasserstein", "bottleneck"):
        raise ValueError(f"unknown objective {objective!r}")
    P, Q = _points(d1), _points(d2)
    n, m = len(P), len(Q)
    if n + m > 8:
        raise ValueError(f"brute force capped at 8 combined points, got {n + m}")
    dim = _dim_of(d1) if len(P) else _dim_of(d2)
    cost = _pair_costs(P, Q, params.ground)
    diag1 = _diag_costs(P, params.ground)
    diag2 = _diag_costs(Q, params.ground)

    best_value = math.inf
    best = None
    for matched in _enumerate_matchings(n, m):
        used_left = {i for i, _ in matched}
        used_right = {j for _, j in matched}
        costs = [cost[i, j] for i, j in matched]
        index_pairs = [(i, j) for i, j in matched]
        for i in range(n):
            if i not in used_left:
                index_pairs.append((i, None))
                costs.append(diag1[i])
        for j in range(m):
            if j not in used_right:
                index_pairs.append((None, j))
                costs.append(diag2[j])
        if objective == "bottleneck":
            value = max(costs, default=0.0)
        else:
            value = sum(c ** params.p for c in costs) ** (1.0 / params.p)
        if value < best_value:
            best_value = value
            best = (index_pairs, costs)
    index_pairs, costs = best
    return float(best_value), _matching_from_index_pairs(P, Q, index_pairs, costs, dim)
