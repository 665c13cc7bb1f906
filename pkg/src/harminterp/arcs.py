"""Exact interval algebra for finite unions of arcs on the unit circle.

An :class:`ArcSet` stores a finite union of half-open arcs ``[start, end)``
measured in radians on ``[0, 2*pi)``.  All set operations (union,
intersection, difference, complement) are closed over this representation
and exact up to float arithmetic on the endpoints: no tolerance fuzzing is
applied anywhere, and adjacent pieces merge only when their endpoints are
bitwise equal.  Arcs crossing the seam at angle 0 are stored split in two.
"""

from __future__ import annotations

import bisect
import math
from typing import Iterable, Iterator, Sequence, Tuple

TWO_PI = 2.0 * math.pi

__all__ = ["ArcSet", "TWO_PI", "norm_angle"]


def norm_angle(angle: float) -> float:
    """Reduce an angle to the fundamental domain [0, 2*pi)."""
    a = float(angle) % TWO_PI
    # Python's % can round up to the modulus itself for tiny negatives.
    if a >= TWO_PI:
        a = 0.0
    return a


def _normalize(pieces: Iterable[Tuple[float, float]]) -> Tuple[Tuple[float, float], ...]:
    """Sort, drop empties, and merge overlapping/abutting pieces in place."""
    cleaned = [(float(s), float(e)) for s, e in pieces if e > s]
    if not cleaned:
        return ()
    cleaned.sort()
    merged = [cleaned[0]]
    for s, e in cleaned[1:]:
        ls, le = merged[-1]
        if s <= le:  # overlap, or exact endpoint adjacency: [a,b) | [b,c)
            if e > le:
                merged[-1] = (ls, e)
        else:
            merged.append((s, e))
    return tuple(merged)


class ArcSet:
    """A finite union of half-open arcs on the circle.

    Instances are immutable.  Construct via :meth:`from_interval`,
    :meth:`centered`, :meth:`full`, or :meth:`empty`; combine with the
    ``|``, ``&``, ``-`` operators and :meth:`complement`.
    """

    __slots__ = ("_pieces",)

    def __init__(self, pieces: Sequence[Tuple[float, float]] = ()):
        normalized = _normalize(pieces)
        for s, e in normalized:
            if not (0.0 <= s < e <= TWO_PI):
                raise ValueError(f"arc piece ({s!r}, {e!r}) outside [0, 2*pi]")
        object.__setattr__(self, "_pieces", normalized)

    # -- constructors ---------------------------------------------------

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls(())

    @classmethod
    def full(cls) -> "ArcSet":
        return cls(((0.0, TWO_PI),))

    @classmethod
    def from_interval(cls, start: float, end: float) -> "ArcSet":
        """Arc swept counterclockwise from ``start`` to ``end``.

        ``end - start >= 2*pi`` (or any nonzero multiple of the full turn)
        yields the whole circle; ``end == start`` yields the empty set.
        ``end < start`` wraps through the seam.
        """
        start = float(start)
        end = float(end)
        if end == start:
            return cls.empty()
        if end - start >= TWO_PI:
            return cls.full()
        length = (end - start) % TWO_PI
        if length == 0.0:
            return cls.full()
        s0 = norm_angle(start)
        e0 = s0 + length
        if e0 <= TWO_PI:
            return cls(((s0, e0),))
        return cls(((s0, TWO_PI), (0.0, e0 - TWO_PI)))

    @classmethod
    def centered(cls, center: float, half_width: float) -> "ArcSet":
        """Arc of angular radius ``half_width`` about ``center``."""
        if half_width <= 0.0:
            return cls.empty()
        if half_width >= math.pi:
            return cls.full()
        return cls.from_interval(center - half_width, center + half_width)

    # -- basic queries ---------------------------------------------------

    @property
    def pieces(self) -> Tuple[Tuple[float, float], ...]:
        return self._pieces

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return iter(self._pieces)

    def __bool__(self) -> bool:
        return bool(self._pieces)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ArcSet):
            return NotImplemented
        return self._pieces == other._pieces

    def __hash__(self) -> int:
        return hash(self._pieces)

    def __repr__(self) -> str:
        inner = ", ".join(f"[{s:.6g}, {e:.6g})" for s, e in self._pieces)
        return f"ArcSet({inner})" if inner else "ArcSet(empty)"

    @property
    def measure(self) -> float:
        """Total angular length in radians."""
        return math.fsum(e - s for s, e in self._pieces)

    def is_full(self) -> bool:
        return self._pieces == ((0.0, TWO_PI),)

    def contains(self, angle: float) -> bool:
        """Membership of the point ``exp(i*angle)`` (half-open convention)."""
        a = norm_angle(angle)
        idx = bisect.bisect_right(self._pieces, (a, math.inf)) - 1
        if idx < 0:
            return False
        s, e = self._pieces[idx]
        return s <= a < e

    __contains__ = contains

    # -- set algebra -----------------------------------------------------

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(self._pieces + other._pieces)

    __or__ = union

    def complement(self) -> "ArcSet":
        gaps = []
        cursor = 0.0
        for s, e in self._pieces:
            if s > cursor:
                gaps.append((cursor, s))
            cursor = e
        if cursor < TWO_PI:
            gaps.append((cursor, TWO_PI))
        return ArcSet(gaps)

    def intersection(self, other: "ArcSet") -> "ArcSet":
        out = []
        i = j = 0
        a, b = self._pieces, other._pieces
        while i < len(a) and j < len(b):
            s = max(a[i][0], b[j][0])
            e = min(a[i][1], b[j][1])
            if e > s:
                out.append((s, e))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return ArcSet(out)

    __and__ = intersection

    def difference(self, other: "ArcSet") -> "ArcSet":
        return self.intersection(other.complement())

    __sub__ = difference
