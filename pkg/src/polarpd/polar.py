"""Polar distance between diagram points, its gradients, and diagram-level
extensions via optimal matching.

A point (b, d) maps to (r, theta) = (sqrt(b^2 + d^2), atan2(d, b)); the
distance combines the radial gap with a half-angle sine of the angular
gap, weighted by alpha:

    dist(p1, p2) = sqrt((r1 - r2)^2 + alpha * sin^2((theta1 - theta2) / 2))

The map is singular at the origin, so points inside ``exclusion_radius``
are rejected (point level) or masked (diagram level). Angle differences
are wrapped to [-pi, pi]; for ordinary diagram points (0 <= b < d) the
angles live in (pi/4, pi/2] and wrapping never fires, but capped or
synthetic points may sit anywhere off the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diagrams import DiagramPoint, PersistenceDiagram, PolarParams, mirror
from .matching import (
    DIAGONAL,
    Matching,
    _enumerate_matchings,
    _matching_from_index_pairs,
    _minimax_assignment,
    _minsum_assignment,
    _points,
)


@dataclass(frozen=True)
class PpdConfig:
    """Diagram-level settings: polar params, diagonal handling, aggregation.

    ``diagonal_mode="project"`` lets every point match its own diagonal
    projection at the polar cost of that projection; ``"exclude"`` matches
    only the min(n, m) best real pairs and ignores the surplus.
    ``aggregate`` is "sum" (order-1 total) or "max" (bottleneck style).
    """

    polar: PolarParams = field(default_factory=PolarParams)
    diagonal_mode: str = "project"
    aggregate: str = "sum"

    def __post_init__(self):
        if self.diagonal_mode not in ("project", "exclude"):
            raise ValueError(f"unknown diagonal_mode {self.diagonal_mode!r}")
        if self.aggregate not in ("sum", "max"):
            raise ValueError(f"unknown aggregate {self.aggregate!r}")


def _wrap(angle: float) -> float:
    """Wrap to [-pi, pi]."""
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def _polar_raw(b: float, d: float) -> tuple[float, float]:
    if b == 0.0 and d == 0.0:
        raise ValueError("polar singularity: point at the origin")
    return math.hypot(b, d), math.atan2(d, b)


def _ppd_raw(b1, d1, b2, d2, alpha) -> float:
    r1, t1 = _polar_raw(b1, d1)
    r2, t2 = _polar_raw(b2, d2)
    s = math.sin(0.5 * _wrap(t1 - t2))
    return math.sqrt((r1 - r2) ** 2 + alpha * s * s)


def _check_point(p: DiagramPoint, params: PolarParams) -> None:
    if math.isinf(p.death):
        raise ValueError("polar distance is undefined for essential classes")
    r = math.hypot(p.birth, p.death)
    if r < params.exclusion_radius or r == 0.0:
        raise ValueError(
            f"polar singularity: point {p} inside exclusion radius "
            f"{params.exclusion_radius}"
        )


def ppd_point(
    p1: DiagramPoint, p2: DiagramPoint, params: PolarParams = PolarParams()
) -> float:
    """Polar distance between two finite points outside the exclusion mask."""
    _check_point(p1, params)
    _check_point(p2, params)
    return _ppd_raw(p1.birth, p1.death, p2.birth, p2.death, params.alpha)


def _grad_squared(b1, d1, b2, d2, alpha):
    """Gradient of the squared polar distance wrt (b1, d1) and (b2, d2)."""
    r1, t1 = _polar_raw(b1, d1)
    r2, t2 = _polar_raw(b2, d2)
    dr = r1 - r2
    dt = _wrap(t1 - t2)
    ang = 0.5 * alpha * math.sin(dt)  # d/d(theta1) of alpha*sin^2(dt/2)
    g1 = (
        2.0 * dr * (b1 / r1) + ang * (-d1 / (r1 * r1)),
        2.0 * dr * (d1 / r1) + ang * (b1 / (r1 * r1)),
    )
    g2 = (
        -2.0 * dr * (b2 / r2) - ang * (-d2 / (r2 * r2)),
        -2.0 * dr * (d2 / r2) - ang * (b2 / (r2 * r2)),
    )
    return g1, g2


def ppd_gradient(
    p1: DiagramPoint, p2: DiagramPoint, params: PolarParams = PolarParams()
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Analytic gradient of the polar distance wrt both points' (b, d).

    The distance has a square-root kink at zero, so coincident inputs are
    rejected; use :func:`ppd_loss` (squared form) when that matters.
    """
    dist = ppd_point(p1, p2, params)
    if dist == 0.0:
        raise ValueError("gradient undefined at zero distance")
    g1, g2 = _grad_squared(p1.birth, p1.death, p2.birth, p2.death, params.alpha)
    scale = 0.5 / dist
    return (
        (scale * g1[0], scale * g1[1]),
        (scale * g2[0], scale * g2[1]),
    )


def ppd_loss(
    pairs: Sequence[tuple[DiagramPoint, DiagramPoint]],
    weights: Sequence[float],
    params: PolarParams = PolarParams(),
) -> tuple[float, list[tuple[tuple[float, float], tuple[float, float]]]]:
    """Weighted sum of squared polar distances, with per-pair gradients.

    The squared form is differentiable everywhere, including coincident
    pairs. Gradients are returned pair-aligned: callers accumulating a
    per-point gradient over a soft matching sum routes themselves.
    """
    if len(pairs) != len(weights):
        raise ValueError("pairs and weights must have equal length")
    loss = 0.0
    grads = []
    for (p1, p2), w in zip(pairs, weights):
        if w < 0:
            raise ValueError(f"negative weight {w!r}")
        _check_point(p1, params)
        _check_point(p2, params)
        dist = _ppd_raw(p1.birth, p1.death, p2.birth, p2.death, params.alpha)
        loss += w * dist * dist
        g1, g2 = _grad_squared(
            p1.birth, p1.death, p2.birth, p2.death, params.alpha
        )
        grads.append(
            ((w * g1[0], w * g1[1]), (w * g2[0], w * g2[1]))
        )
    return loss, grads


def _masked(diagram: PersistenceDiagram, params: PolarParams) -> np.ndarray:
    pts = _points(diagram)
    if len(pts) == 0:
        return pts
    radii = np.hypot(pts[:, 0], pts[:, 1])
    return pts[radii >= max(params.exclusion_radius, np.finfo(float).tiny)]

def _pair_cost_matrix(P: np.ndarray, Q: np.ndarray, alpha: float) -> np.ndarray:
    cost = np.empty((len(P), len(Q)))
    for i, (b1, d1) in enumerate(P):
        for j, (b2, d2) in enumerate(Q):
            cost[i, j] = _ppd_raw(b1, d1, b2, d2, alpha)
    return cost


def _diag_cost_vector(P: np.ndarray, alpha: float) -> np.ndarray:
    out = np.empty(len(P))
    for i, (b, d) in enumerate(P):
        m = 0.5 * (b + d)
        out[i] = _ppd_raw(b, d, m, m, alpha)
    return out


def ppd_diagram(
    d1: PersistenceDiagram,
    d2: PersistenceDiagram,
    cfg: PpdConfig = PpdConfig(),
) -> tuple[float, Matching]:
    """Optimal-matching polar distance between two diagrams.

    Points inside the exclusion radius are masked first. In "project"
    mode unmatched points pay the polar cost of their own diagonal
    projection; both sides empty after masking gives (0, empty matching).
    """
    alpha = cfg.polar.alpha
    P = _masked(d1, cfg.polar)
    Q = _masked(d2, cfg.polar)
    n, m = len(P), len(Q)
    dim = 0
    for d in (d1, d2):
        if d.points:
            dim = d.points[0].dimension
            break
    if n == 0 and m == 0:
        return 0.0, Matching((), ())
    cost = _pair_cost_matrix(P, Q, alpha)

    if cfg.diagonal_mode == "project":
        diag1 = _diag_cost_vector(P, alpha)
        diag2 = _diag_cost_vector(Q, alpha)
        if cfg.aggregate == "max":
            value, items = _minimax_assignment(cost, diag1, diag2)
        else:
            value, items = _minsum_assignment(cost, diag1, diag2)
    else:
        if cfg.aggregate == "max":
            if min(n, m) == 0:
                value, items = 0.0, []
            else:
                value, items = _exclude_minimax(cost)
        else:
            rows, cols = linear_sum_assignment(cost)
            items = [((int(r), int(c)), float(cost[r, c])) for r, c in zip(rows, cols)]
            value = float(sum(c for _, c in items))

    index_pairs = [pair for pair, _ in items]
    costs = [c for _, c in items]
    matching = _matching_from_index_pairs(P, Q, index_pairs, costs, dim)
    return float(value), matching


def _rectangular_assignment(cost: np.ndarray):
    from scipy.optimize import linear_sum_assignment

    return linear_sum_assignment(cost)


def _exclude_minimax(cost: np.ndarray):
    """Minimise the max pair cost over matchings covering the smaller side."""
    n, m = cost.shape
    k = min(n, m)
    values = sorted({float(c) for c in cost.ravel()})

    def feasible(delta):
        # maximum bipartite matching restricted to edges <= delta
        match_right = [-1] * m

        def augment(i, seen):
            for j in range(m):
                if cost[i, j] <= delta and not seen[j]:
                    seen[j] = True
                    if match_right[j] == -1 or augment(match_right[j], seen):
                        match_right[j] = i
                        return True
            return False

        size = 0
        for i in range(n):
            if augment(i, [False] * m):
                size += 1
        return match_right if size == k else None

    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(values[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    delta = values[lo]
    match_right = feasible(delta)
    items = [
        ((l, r), float(cost[l, r]))
        for r, l in enumerate(match_right)
        if l != -1
    ]
    return delta, items


def ppd_diagram_brute_force(
    d1: PersistenceDiagram,
    d2: PersistenceDiagram,
    cfg: PpdConfig = PpdConfig(),
) -> float:
    """Exhaustive diagram-level optimum (project mode), for testing."""
    alpha = cfg.polar.alpha
    P = _masked(d1, cfg.polar)
    Q = _masked(d2, cfg.polar)
    n, m = len(P), len(Q)
    if n + m > 8:
        raise ValueError(f"brute force capped at 8 combined points, got {n + m}")
    if n == 0 and m == 0:
        return 0.0
    cost = _pair_cost_matrix(P, Q, alpha)
    diag1 = _diag_cost_vector(P, alpha)
    diag2 = _diag_cost_vector(Q, alpha)
    best = math.inf
    for matched in _enumerate_matchings(n, m):
        used_left = {i for i, _ in matched}
        used_right = {j for _, j in matched}
        costs = [cost[i, j] for i, j in matched]
        costs.extend(diag1[i] for i in range(n) if i not in used_left)
        costs.extend(diag2[j] for j in range(m) if j not in used_right)
        value = max(costs, default=0.0) if cfg.aggregate == "max" else sum(costs)
        best = min(best, value)
    return float(best)


def polar_kernel(
    p1: DiagramPoint,
    p2: DiagramPoint,
    sigma: float,
    params: PolarParams = PolarParams(),
) -> float:
    """Gaussian radial basis function of the polar distance."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    dist = ppd_point(p1, p2, params)
    return math.exp(-dist * dist / (2.0 * sigma * sigma))


def polar_embed(
    p: DiagramPoint, params: PolarParams = PolarParams()
) -> tuple[float, float, float]:
    """Embed a point as (r cos theta, r sin theta, sqrt(alpha) * theta).

    The first two coordinates equal (b, d) identically, so they are
    returned as such rather than through the trig round trip.
    """
    _check_point(p, params)
    _, theta = _polar_raw(p.birth, p.death)
    return (p.birth, p.death, math.sqrt(params.alpha) * theta)
