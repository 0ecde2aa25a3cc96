"""Persistence diagrams, polar transforms, and the diagram interchange format.

A diagram is a multiset of finite (birth, death) points per homology
dimension. Classes that never die (essential classes) are stored out of
band as (birth, dimension) records so that point-matching metrics only
ever see finite points; callers that want them compared geometrically can
convert them with :meth:`PersistenceDiagram.cap`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import ParseError, ValidationError

_FMT = "%.17g"  # round-trips every finite double


@dataclass(frozen=True)
class DiagramPoint:
    """One birth/death feature; ``death`` may be ``math.inf``."""

    birth: float
    death: float
    dimension: int = 0

    def __post_init__(self):
        if math.isnan(self.birth) or math.isnan(self.death):
            raise ValidationError("diagram point coordinates must not be NaN")
        if not self.birth <= self.death:
            raise ValidationError(
                f"birth {self.birth!r} exceeds death {self.death!r}"
            )
        if self.dimension < 0:
            raise ValidationError("homology dimension must be non-negative")

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class PolarPoint:
    """Polar image (radius, angle) of a diagram point about the origin."""

    radius: float
    angle: float


@dataclass(frozen=True)
class PolarParams:
    """Tunables of the polar representation.

    ``alpha`` weights the angular term of the polar distance;
    ``exclusion_radius`` masks points whose radius is below it before any
    polar computation (the polar map is singular at the origin).
    """

    alpha: float = 1.0
    exclusion_radius: float = 1e-9

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if self.exclusion_radius < 0:
            raise ValueError("exclusion_radius must be non-negative")


def to_polar(p: DiagramPoint) -> PolarPoint:
    """Map a finite diagram point to polar coordinates about the origin."""
    if math.isinf(p.death):
        raise ValidationError("essential class has no polar form")
    if p.birth == 0.0 and p.death == 0.0:
        raise ValueError("polar singularity: point at the origin")
    return PolarPoint(math.hypot(p.birth, p.death), math.atan2(p.death, p.birth))


def mirror(p: DiagramPoint) -> DiagramPoint:
    """Project a finite point onto the diagonal: ((b+d)/2, (b+d)/2)."""
    if math.isinf(p.death):
        raise ValidationError("essential class has no diagonal projection")
    m = 0.5 * (p.birth + p.death)
    return DiagramPoint(m, m, p.dimension)


def _point_key(p: DiagramPoint):
    return (p.dimension, p.birth, p.death)


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of finite points plus out-of-band essential classes.

    Points are normalised into a canonical order on construction, so two
    diagrams compare equal exactly when they are equal as multisets.
    ``meta`` carries free-form provenance (source label, cap value, ...)
    and never participates in equality.
    """

    points: tuple[DiagramPoint, ...] = ()
    essential: tuple[tuple[float, int], ...] = ()  # (birth, dimension)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=_point_key))
        for p in pts:
            if math.isinf(p.death):
                raise ValidationError(
                    "infinite-death points belong in `essential`"
                )
            if not p.birth < p.death:
                raise ValidationError(
                    f"diagram points need birth < death, got {p}"
                )
        ess = tuple(sorted((float(b), int(d)) for b, d in self.essential))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "essential", ess)

    def __len__(self) -> int:
        return len(self.points)

    def dimensions(self) -> tuple[int, ...]:
        dims = {p.dimension for p in self.points} | {d for _, d in self.essential}
        return tuple(sorted(dims))

    def has_dimension(self, dim: int) -> bool:
        return dim in self.dimensions()

    def restrict(self, dim: int) -> "PersistenceDiagram":
        """Keep only points and essential classes of one dimension."""
        return PersistenceDiagram(
            tuple(p for p in self.points if p.dimension == dim),
            tuple(e for e in self.essential if e[1] == dim),
            dict(self.meta),
        )

    def as_array(self, dim: int | None = None) -> np.ndarray:
        """Finite points as an (k, 2) float array, optionally one dimension."""
        pts = self.points if dim is None else [
            p for p in self.points if p.dimension == dim
        ]
        if not pts:
            return np.empty((0, 2))
        return np.array([(p.birth, p.death) for p in pts], dtype=float)

    def essential_count(self, dim: int) -> int:
        return sum(1 for _, d in self.essential if d == dim)

    def cap(self, value: float) -> "PersistenceDiagram":
        """Convert essential classes to finite points dying at ``value``."""
        capped = []
        for b, d in self.essential:
            if not b < value:
                raise ValidationError(
                    f"cap {value!r} does not exceed essential birth {b!r}"
                )
            capped.append(DiagramPoint(b, value, d))
        meta = dict(self.meta)
        meta["cap"] = value
        return PersistenceDiagram(self.points + tuple(capped), (), meta)


def write_diagram(diagram: PersistenceDiagram, stream: IO[bytes] | None = None) -> bytes:
    """Serialise a diagram to the line-oriented interchange format."""
    lines = ["PD v1"]
    label = diagram.meta.get("label")
    if label:
        lines.append(f"# label: {label}")
    for p in diagram.points:
        lines.append(f"{p.dimension} {_FMT % p.birth} {_FMT % p.death}")
    for b, d in diagram.essential:
        lines.append(f"{d} {_FMT % b} inf")
    data = ("\n".join(lines) + "\n").encode("utf-8")
    if stream is not None:
        stream.write(data)
    return data


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"bad numeric field {token!r}", lineno) from None
    if math.isnan(value):
        raise ParseError("NaN is not a valid filtration value", lineno)
    return value


def read_diagram(data: bytes | str) -> PersistenceDiagram:
    """Parse the interchange format produced by :func:`write_diagram`."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    points: list[DiagramPoint] = []
    essential: list[tuple[float, int]] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not saw_header:
            if line != "PD v1":
                raise ParseError(f"expected header 'PD v1', got {line!r}", lineno)
            saw_header = True
            continue
        fields = line.split(" ")
        if len(fields) != 3:
            raise ParseError(
                f"expected 'dim birth death', got {len(fields)} fields", lineno
            )
        try:
            dim = int(fields[0])
        except ValueError:
            raise ParseError(f"bad dimension field {fields[0]!r}", lineno) from None
        if dim < 0:
            raise ParseError("dimension must be non-negative", lineno)
        birth = _parse_float(fields[1], lineno)
        if math.isinf(birth):
            raise ParseError("birth must be finite", lineno)
        if fields[2] == "inf":
            essential.append((birth, dim))
            continue
        death = _parse_float(fields[2], lineno)
        if math.isinf(death):
            essential.append((birth, dim))
            continue
        if birth > death:
            raise ValidationError(
                f"line {lineno}: birth {birth!r} exceeds death {death!r}"
            )
        if birth == death:
            raise ValidationError(
                f"line {lineno}: zero-persistence record not allowed in a diagram"
            )
        points.append(DiagramPoint(birth, death, dim))
    if not saw_header:
        raise ParseError("missing 'PD v1' header", 1)
    return PersistenceDiagram(tuple(points), tuple(essential))


def diagram_from_pairs(
    pairs: Iterable[tuple[float, float]],
    dim: int = 0,
    essential: Iterable[float] = (),
    label: str = "",
) -> PersistenceDiagram:
    """Convenience constructor used heavily in tests and the harness."""
    pts = tuple(DiagramPoint(b, d, dim) for b, d in pairs)
    ess = tuple((float(b), dim) for b in essential)
    meta = {"label": label} if label else {}
    return PersistenceDiagram(pts, ess, meta)
