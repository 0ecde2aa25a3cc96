"""Persistence of a filtered complex by boundary-matrix reduction over GF(2).

Columns are reduced left to right within each dimension, highest dimension
first, with clearing: a simplex paired as a creator during the reduction
of dimension d has a provably zero column in dimension d-1 and is skipped
there. H0 additionally has a union-find fast path used as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .complexes import FilteredComplex
from .diagrams import DiagramPoint, PersistenceDiagram


@dataclass(frozen=True)
class PersistencePair:
    """One creator simplex and, when finite, the simplex that kills it.

    ``death`` is None for essential classes. Zero-persistence pairs are
    reported here even though they are dropped from diagrams.
    """

    dimension: int
    birth: float
    death: float | None
    creator: tuple[int, ...]
    destroyer: tuple[int, ...] | None


def _reduce_full(fc: FilteredComplex) -> list[PersistencePair]:
    simplices = fc.ordered()
    index = {verts: i for i, (verts, _) in enumerate(simplices)}
    values = [value for _, value in simplices]
    dims = [len(verts) - 1 for verts, _ in simplices]

    def boundary(i: int) -> set[int]:
        verts = simplices[i][0]
        return {index[f] for f in combinations(verts, len(verts) - 1)}

    destroyer: dict[int, int] = {}
    cleared: set[int] = set()
    cycle_columns: set[int] = set()

    max_dim = max(dims, default=0)
    for d in range(max_dim, 0, -1):
        pivot_of: dict[int, int] = {}
        reduced: dict[int, set[int]] = {}
        for j in range(len(simplices)):
            if dims[j] != d:
                continue
            if j in cleared:
                # paired as a creator one dimension up; column is zero
                cycle_columns.add(j)
                continue
            col = boundary(j)
            while col:
                low = max(col)
                owner = pivot_of.get(low)
                if owner is None:
                    break
                col ^= reduced[owner]
            if col:
                low = max(col)
                pivot_of[low] = j
                reduced[j] = col
                destroyer[low] = j
                cleared.add(low)
            else:
                cycle_columns.add(j)

    return _pairs_from_reduction(simplices, values, dims, destroyer, cycle_columns)


def _pairs_from_reduction(simplices, values, dims, destroyer, cycle_columns):
    pairs: list[PersistencePair] = []
    for i, (verts, value) in enumerate(simplices):
        d = dims[i]
        is_creator = d == 0 or i in cycle_columns
        if not is_creator:
            continue
        if d > 1:
            continue  # H2 creators are out of scope
        j = destroyer.get(i)
        if j is None:
            pairs.append(PersistencePair(d, value, None, verts, None))
        else:
            pairs.append(
                PersistencePair(d, value, values[j], verts, simplices[j][0])
            )
    return pairs


def reduction_pairs(fc: FilteredComplex, validate: bool = True) -> list[PersistencePair]:
    """All H0/H1 creator records, including zero-persistence pairs."""
    if validate:
        fc.validate()
    return _reduce_full(fc)


def compute_persistence(
    fc: FilteredComplex, label: str = "", validate: bool = True
) -> PersistenceDiagram:
    """Persistence diagram of a filtered complex (dimensions 0 and 1).

    Zero-persistence pairs are dropped; unpaired creators become essential
    classes. The essential H0 count equals the number of connected
    components of the full complex.
    """
    pairs = reduction_pairs(fc, validate=validate)
    points = []
    essential = []
    for pair in pairs:
        if pair.death is None:
            essential.append((pair.birth, pair.dimension))
        elif pair.death > pair.birth:
            points.append(DiagramPoint(pair.birth, pair.death, pair.dimension))
    meta = {"label": label} if label else {}
    return PersistenceDiagram(tuple(points), tuple(essential), meta)


class UnionFind:
    """Path-compressed union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        self.parent[y] = x
        if self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        return True


def connected_components(fc: FilteredComplex) -> int:
    """Components of the full complex; equals the essential H0 count."""
    vertex_ids = [verts[0] for verts, _ in fc.simplices if len(verts) == 1]
    if not vertex_ids:
        return 0
    slot = {v: i for i, v in enumerate(vertex_ids)}
    uf = UnionFind(len(vertex_ids))
    count = len(vertex_ids)
    for verts, _ in fc.simplices:
        if len(verts) == 2:
            if uf.union(slot[verts[0]], slot[verts[1]]):
                count -= 1
    return count


def h0_diagram_union_find(fc: FilteredComplex) -> PersistenceDiagram:
    """Direct elder-rule sweep for H0; independent oracle for the reduction."""
    order = fc.ordered()
    vertices = [(verts[0], value) for verts, value in order if len(verts) == 1]
    slot = {v: i for i, (v, _) in enumerate(vertices)}
    birth = [value for _, value in vertices]
    uf = UnionFind(len(vertices))
    points = []
    for verts, value in order:
        if len(verts) != 2:
            continue
        a, b = uf.find(slot[verts[0]]), uf.find(slot[verts[1]])
        if a == b:
            continue
        # elder rule: the component with the later birth dies
        if (birth[a], a) < (birth[b], b):
            elder, younger = a, b
        else:
            elder, younger = b, a
        if value > birth[younger]:
            points.append(DiagramPoint(birth[younger], value, 0))
        uf.union(a, b)
        root = uf.find(a)
        birth[root] = birth[elder]
    roots = {uf.find(i) for i in range(len(vertices))}
    essentials = tuple((birth[r], 0) for r in roots)
    return PersistenceDiagram(tuple(points), essentials)
