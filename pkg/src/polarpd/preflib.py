"""PrefLib strict-order ballot ingestion and the dominance filtration.

Supports the modern PrefLib format: '#'-prefixed 'KEY: value' metadata
followed by data lines 'multiplicity: c1,c2,...,cn'. Only complete strict
orders (SOC) are accepted; ties and partial ballots are rejected.

The pairwise dominance counts D[i, j] = number of voters ranking i above
j induce margins w = D - D^T and an undirected graph with one edge per
decided pair, weighted by f(i, j) = 1 / (|w_ij| + epsilon). Triangles are
optionally filled at the maximum of their edge values (flag-complex rule)
so that dominance cycles can die at a finite scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .complexes import FilteredComplex
from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class PreferenceProfile:
    """Aggregated ranked ballots over a fixed alternative set.

    ``ballots`` holds (multiplicity, ranking) groups in file order; the
    expanded voter sequence repeats each ranking ``multiplicity`` times.
    """

    alternatives: tuple[int, ...]
    ballots: tuple[tuple[int, tuple[int, ...]], ...]
    names: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        alt_set = set(self.alternatives)
        if len(alt_set) != len(self.alternatives):
            raise ValidationError("duplicate alternative identifiers")
        for mult, ranking in self.ballots:
            if mult < 1:
                raise ValidationError(f"multiplicity must be positive, got {mult}")
            if set(ranking) != alt_set or len(ranking) != len(self.alternatives):
                raise ValidationError(
                    f"ballot {ranking} is not a strict complete order"
                )

    @property
    def voter_count(self) -> int:
        return sum(mult for mult, _ in self.ballots)

    def expanded(self) -> list[tuple[int, ...]]:
        """One ranking per voter, in file order."""
        out = []
        for mult, ranking in self.ballots:
            out.extend([ranking] * mult)
        return out

    def subset(self, sel: slice | list[int]) -> "PreferenceProfile":
        """Sub-profile over a slice or explicit indices of the voter sequence."""
        voters = self.expanded()
        chosen = voters[sel] if isinstance(sel, slice) else [voters[i] for i in sel]
        if not chosen:
            raise ValidationError("subset selects no voters")
        return profile_from_rankings(self.alternatives, chosen, self.names)


def profile_from_rankings(alternatives, rankings, names=None) -> PreferenceProfile:
    """Aggregate a voter-by-voter ranking sequence into ballot groups."""
    groups: dict[tuple[int, ...], int] = {}
    for r in rankings:
        groups[tuple(r)] = groups.get(tuple(r), 0) + 1
    ballots = tuple((mult, ranking) for ranking, mult in groups.items())
    return PreferenceProfile(tuple(alternatives), ballots, dict(names or {}))


def parse_preflib(data: bytes | str) -> PreferenceProfile:
    """Parse a PrefLib SOC file into a preference profile."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    declared_n = None
    declared_voters = None
    names: dict[int, str] = {}
    raw_ballots: list[tuple[int, tuple[int, ...], int]] = []  # (mult, ranking, line)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if ":" not in body:
                continue
            key, _, value = body.partition(":")
            key = key.strip().upper()
            value = value.strip()
            if key == "NUMBER ALTERNATIVES":
                declared_n = int(value)
            elif key == "NUMBER VOTERS":
                declared_voters = int(value)
            elif key == "DATA TYPE":
                if value.lower() != "soc":
                    raise ValidationError(
                        f"not a strict complete order: data type {value!r}"
                    )
            elif key.startswith("ALTERNATIVE NAME"):
                try:
                    names[int(key.rsplit(" ", 1)[1])] = value
                except (IndexError, ValueError):
                    pass
            continue
        if "{" in line or "}" in line:
            raise ValidationError(
                f"line {lineno}: tied ranks are not a strict complete order"
            )
        head, sep, tail = line.partition(":")
        if not sep:
            raise ParseError("expected 'multiplicity: ranking'", lineno)
        try:
            mult = int(head.strip())
        except ValueError:
            raise ParseError(f"bad multiplicity {head.strip()!r}", lineno) from None
        if mult < 1:
            raise ParseError(f"multiplicity must be positive, got {mult}", lineno)
        items = [tok.strip() for tok in tail.split(",")]
        try:
            ranking = tuple(int(tok) for tok in items)
        except ValueError:
            raise ParseError(f"bad alternative id in {tail.strip()!r}", lineno) from None
        if len(set(ranking)) != len(ranking):
            raise ParseError("repeated alternative in ranking", lineno)
        raw_ballots.append((mult, ranking, lineno))

    if not raw_ballots:
        raise ValidationError("no ballots found")

    if declared_n is not None:
        alternatives = tuple(range(1, declared_n + 1))
    else:
        alternatives = tuple(sorted(raw_ballots[0][1]))
    alt_set = set(alternatives)

    ballots = []
    for mult, ranking, lineno in raw_ballots:
        unknown = set(ranking) - alt_set
        if unknown:
            raise ParseError(f"unknown alternative id {sorted(unknown)[0]}", lineno)
        if len(ranking) != len(alternatives):
            raise ValidationError(
                f"line {lineno}: not a strict complete order "
                f"({len(ranking)} of {len(alternatives)} alternatives ranked)"
            )
        ballots.append((mult, ranking))

    total = sum(mult for mult, _ in ballots)
    if declared_voters is not None and declared_voters != total:
        raise ValidationError(
            f"declared voter count {declared_voters} != ballot total {total}"
        )
    return PreferenceProfile(alternatives, tuple(ballots), names)


@dataclass(frozen=True, eq=False)
class DominanceMatrix:
    """Pairwise win counts D and antisymmetric margins w = D - D^T."""

    counts: np.ndarray
    alternatives: tuple[int, ...]

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        n = len(self.alternatives)
        if counts.shape != (n, n):
            raise ValidationError(
                f"counts shape {counts.shape} does not match {n} alternatives"
            )
        if np.any(np.diag(counts) != 0):
            raise ValidationError("dominance diagonal must be zero")
        if np.any(counts < 0):
            raise ValidationError("dominance counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def margins(self) -> np.ndarray:
        return self.counts - self.counts.T

    def to_csv(self) -> str:
        lines = [",".join(str(a) for a in self.alternatives)]
        for row in self.counts:
            lines.append(",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def dominance(profile: PreferenceProfile) -> DominanceMatrix:
    """Count voters ranking i above j, weighted by ballot multiplicity."""
    alts = profile.alternatives
    n = len(alts)
    slot = {a: k for k, a in enumerate(alts)}
    counts = np.zeros((n, n), dtype=np.int64)
    pos = np.empty(n, dtype=np.intp)
    for mult, ranking in profile.ballots:
        for place, a in enumerate(ranking):
            pos[slot[a]] = place
        counts += mult * (pos[:, None] < pos[None, :])
    return DominanceMatrix(counts, alts)


@dataclass(frozen=True)
class FiltrationConfig:
    """Stability offset, flag expansion, and optional essential-death cap."""

    epsilon: float = 1e-6
    expand_triangles: bool = True
    cap: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def build_filtration(
    dom: DominanceMatrix, cfg: FiltrationConfig = FiltrationConfig()
) -> FilteredComplex:
    """Dominance graph with edge values 1/(|w| + epsilon), flag-expanded.

    Vertices enter at 0 (indices into ``dom.alternatives``); an edge
    exists only for decided pairs (nonzero margin); ties produce no edge.
    """
    margins = dom.margins
    n = margins.shape[0]
    simplices: list[tuple[tuple[int, ...], float]] = [((i,), 0.0) for i in range(n)]
    edge_value: dict[tuple[int, int], float] = {}
    for i, j in combinations(range(n), 2):
        w = int(margins[i, j])
        if w == 0:
            continue
        value = 1.0 / (abs(w) + cfg.epsilon)
        edge_value[(i, j)] = value
        simplices.append(((i, j), value))
    if cfg.expand_triangles:
        for i, j, k in combinations(range(n), 3):
            try:
                value = max(
                    edge_value[(i, j)], edge_value[(i, k)], edge_value[(j, k)]
                )
            except KeyError:
                continue
            simplices.append(((i, j, k), value))
    return FilteredComplex(tuple(simplices))
