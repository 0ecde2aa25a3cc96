"""Filtered simplicial complexes of dimension at most 2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import IO, Iterable

from .errors import ParseError, ValidationError

_FMT = "%.17g"

Simplex = tuple[tuple[int, ...], float]  # (ascending vertex tuple, value)


def _normalise(simplices: Iterable) -> tuple[Simplex, ...]:
    out = []
    for verts, value in simplices:
        vt = tuple(int(v) for v in verts)
        if len(set(vt)) != len(vt):
            raise ValidationError(f"repeated vertex in simplex {vt}")
        if not 1 <= len(vt) <= 3:
            raise ValidationError(f"only dimensions 0..2 supported, got {vt}")
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            raise ValidationError("filtration values must be finite")
        out.append((tuple(sorted(vt)), value))
    return tuple(out)


@dataclass(frozen=True)
class FilteredComplex:
    """Simplices (dim <= 2) with filtration values.

    The canonical filtration order sorts by (value, dimension, vertex
    tuple); with closed-under-faces input this puts every face before its
    cofaces.
    """

    simplices: tuple[Simplex, ...]

    def __post_init__(self):
        object.__setattr__(self, "simplices", _normalise(self.simplices))
        seen = set()
        for verts, _ in self.simplices:
            if verts in seen:
                raise ValidationError(f"duplicate simplex {verts}")
            seen.add(verts)

    def __len__(self) -> int:
        return len(self.simplices)

    def vertex_count(self) -> int:
        return sum(1 for verts, _ in self.simplices if len(verts) == 1)

    def ordered(self) -> list[Simplex]:
        """Simplices in filtration order: (value, dimension, lexicographic)."""
        return sorted(self.simplices, key=lambda s: (s[1], len(s[0]), s[0]))

    def validate(self) -> None:
        """Check closure under faces with monotone values.

        Raises ValidationError("invalid filtration: ...") when a face is
        missing or appears later than one of its cofaces.
        """
        values = {verts: value for verts, value in self.simplices}
        for verts, value in self.simplices:
            if len(verts) == 1:
                continue
            for face in combinations(verts, len(verts) - 1):
                if face not in values:
                    raise ValidationError(
                        f"invalid filtration: face {face} of {verts} is missing"
                    )
                if values[face] > value:
                    raise ValidationError(
                        f"invalid filtration: face {face} appears after {verts}"
                    )


def write_complex(fc: FilteredComplex, stream: IO[bytes] | None = None) -> bytes:
    """Serialise as 'dim v0[,v1[,v2]] value' lines."""
    lines = []
    for verts, value in fc.ordered():
        lines.append(
            f"{len(verts) - 1} {','.join(str(v) for v in verts)} {_FMT % value}"
        )
    data = ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
    if stream is not None:
        stream.write(data)
    return data


def read_complex(data: bytes | str) -> FilteredComplex:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    simplices = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(" ")
        if len(fields) != 3:
            raise ParseError("expected 'dim vertices value'", lineno)
        try:
            dim = int(fields[0])
            verts = tuple(int(v) for v in fields[1].split(","))
            value = float(fields[2])
        except ValueError:
            raise ParseError(f"malformed simplex record {line!r}", lineno) from None
        if dim != len(verts) - 1:
            raise ParseError(
                f"declared dimension {dim} does not match {len(verts)} vertices",
                lineno,
            )
        simplices.append((verts, value))
    return FilteredComplex(tuple(simplices))
