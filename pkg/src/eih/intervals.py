"""Finite unions of real intervals, their monotone images, and a text grammar.

Sets of index levels (payoff regions, terminal events) are represented as
:class:`IntervalUnion`. Endpoint openness is stored and honoured pointwise,
but never affects a Gaussian measure.

Grammar: ``(-inf,2.034]u[1465.9,inf)``; ``u`` separates intervals, ``empty``
is the empty set. Floats are printed with ``repr`` so parse(print(x)) == x.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable

INF = math.inf


@dataclass(frozen=True, order=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be nan")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        # infinite endpoints are never attained
        if math.isinf(lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(hi):
            object.__setattr__(self, "hi_closed", False)

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return not (self.lo_closed and self.hi_closed)
        return False

    def __contains__(self, x: float) -> bool:
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def __str__(self) -> str:
        return (("[" if self.lo_closed else "(") + _fmt(self.lo) + ","
                + _fmt(self.hi) + ("]" if self.hi_closed else ")"))


def _fmt(x: float) -> str:
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return repr(x)


def _touches(a: Interval, b: Interval) -> bool:
    """Whether sorted intervals a <= b overlap or share a point."""
    if a.hi > b.lo:
        return True
    return a.hi == b.lo and (a.hi_closed or b.lo_closed)


class IntervalUnion:
    """Normalised union: sorted, pairwise disjoint, nothing mergeable."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[Interval] = ()):
        self.intervals: tuple[Interval, ...] = _normalize(intervals)

    @classmethod
    def of(cls, *bounds: tuple) -> "IntervalUnion":
        """Closed intervals from ``(lo, hi)`` pairs; ``(lo, hi, lc, hc)`` also accepted."""
        return cls(Interval(*b) for b in bounds)

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @classmethod
    def real_line(cls) -> "IntervalUnion":
        return cls([Interval(-INF, INF)])

    @classmethod
    def positive(cls) -> "IntervalUnion":
        return cls([Interval(0.0, INF, False, False)])

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalUnion) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        return f"IntervalUnion({str(self)!r})"

    def __str__(self) -> str:
        return format_set(self)

    def __contains__(self, x: float) -> bool:
        return any(x in iv for iv in self.intervals)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    def complement(self) -> "IntervalUnion":
        """Complement in the real line (openness flips at every finite endpoint)."""
        out = []
        lo, lo_closed = -INF, False
        for iv in self.intervals:
            out.append(Interval(lo, iv.lo, lo_closed, not iv.lo_closed))
            lo, lo_closed = iv.hi, not iv.hi_closed
        out.append(Interval(lo, INF, lo_closed, False))
        return IntervalUnion(out)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        for a in self.intervals:
            for b in other.intervals:
                if a.lo > b.lo or (a.lo == b.lo and not a.lo_closed):
                    lo, lc = a.lo, a.lo_closed
                else:
                    lo, lc = b.lo, b.lo_closed
                if a.hi < b.hi or (a.hi == b.hi and not a.hi_closed):
                    hi, hc = a.hi, a.hi_closed
                else:
                    hi, hc = b.hi, b.hi_closed
                out.append(Interval(lo, hi, lc, hc))
        return IntervalUnion(out)

    def issubset(self, other: "IntervalUnion") -> bool:
        return self.intersect(other) == self

    def with_openness(self, lo_closed: bool, hi_closed: bool) -> "IntervalUnion":
        """Same endpoints, every finite endpoint set to the given openness."""
        return IntervalUnion(Interval(iv.lo, iv.hi, lo_closed, hi_closed)
                             for iv in self.intervals if iv.lo < iv.hi)

    def endpoints(self) -> list[float]:
        return [x for iv in self.intervals for x in (iv.lo, iv.hi)]


def _normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    ivs = sorted(
        (iv for iv in intervals if not iv.empty),
        key=lambda iv: (iv.lo, not iv.lo_closed),
    )
    out: list[Interval] = []
    for iv in ivs:
        if out and _touches(out[-1], iv):
            last = out[-1]
            if iv.hi > last.hi:
                hi, hc = iv.hi, iv.hi_closed
            elif iv.hi == last.hi:
                hi, hc = last.hi, last.hi_closed or iv.hi_closed
            else:
                hi, hc = last.hi, last.hi_closed
            out[-1] = Interval(last.lo, hi, last.lo_closed, hc)
        else:
            out.append(iv)
    return tuple(out)


# --- monotone maps --------------------------------------------------------

class MonotoneMap:
    """Strictly monotone scalar map usable on interval endpoints.

    ``domain`` is the set on which the map is monotone; input sets are
    intersected with it before mapping.
    """

    increasing: bool = True
    domain: IntervalUnion

    def __call__(self, x: float) -> float:
        raise NotImplementedError


class Affine(MonotoneMap):
    def __init__(self, scale: float, shift: float = 0.0):
        if not math.isfinite(scale) or not math.isfinite(shift):
            raise ValueError("affine coefficients must be finite")
        if scale == 0.0:
            raise ValueError("affine map with zero slope is not strictly monotone")
        self.scale, self.shift = float(scale), float(shift)
        self.increasing = scale > 0
        self.domain = IntervalUnion.real_line()

    def __call__(self, x: float) -> float:
        return self.scale * x + self.shift

    def __repr__(self) -> str:
        return f"Affine(scale={self.scale!r}, shift={self.shift!r})"


class Log(MonotoneMap):
    """Natural log; 0 maps to -inf and the non-positive half-line is dropped."""

    def __init__(self):
        self.domain = IntervalUnion([Interval(0.0, INF, True, False)])

    def __call__(self, x: float) -> float:
        return -INF if x == 0.0 else math.log(x)

    def __repr__(self) -> str:
        return "Log()"


class Exp(MonotoneMap):
    def __init__(self):
        self.domain = IntervalUnion.real_line()

    def __call__(self, x: float) -> float:
        return 0.0 if x == -INF else math.exp(x)

    def __repr__(self) -> str:
        return "Exp()"


class Reciprocal(MonotoneMap):
    """x -> c / x on the positive half-line (decreasing); 0 maps to +inf."""

    def __init__(self, c: float = 1.0):
        if not c > 0 or not math.isfinite(c):
            raise ValueError(f"reciprocal constant must be positive and finite, got {c}")
        self.c = float(c)
        self.increasing = False
        self.domain = IntervalUnion([Interval(0.0, INF, True, False)])

    def __call__(self, x: float) -> float:
        if x == 0.0:
            return INF
        if x == INF:
            return 0.0
        return self.c / x

    def __repr__(self) -> str:
        return f"Reciprocal(c={self.c!r})"


def map_interval_union(e: IntervalUnion, f: MonotoneMap) -> IntervalUnion:
    """Pointwise image ``{f(x) : x in e}``.

    Decreasing maps swap endpoints together with their openness. The image of
    an endpoint such as ``0`` under :class:`Log` is ``-inf``; that endpoint is
    then open, which is harmless for measures.
    """
    if not isinstance(f, MonotoneMap):
        raise TypeError(f"only strictly monotone map descriptors are supported, got {f!r}")
    out = []
    for iv in e.intersect(f.domain):
        a, b = f(iv.lo), f(iv.hi)
        if f.increasing:
            out.append(Interval(a, b, iv.lo_closed, iv.hi_closed))
        else:
            out.append(Interval(b, a, iv.hi_closed, iv.lo_closed))
    return IntervalUnion(out)


# --- grammar ---------------------------------------------------------------

_NUM = r"\s*([+-]?(?:inf|infinity|nan|[0-9.eE+-]+))\s*"
_IV = re.compile(r"\s*([\[(])" + _NUM + "," + _NUM + r"([\])])\s*", re.IGNORECASE)


def format_set(e: IntervalUnion) -> str:
    if not e.intervals:
        return "empty"
    return "u".join(str(iv) for iv in e.intervals)


def parse_set(text: str) -> IntervalUnion:
    """Parse the CLI set grammar, e.g. ``(-inf,2.034]u[1465.9,inf)``."""
    s = text.strip()
    if s.lower() in ("empty", "{}", ""):
        return IntervalUnion.empty()
    out = []
    for part in re.split(r"[uU]", s):
        m = _IV.fullmatch(part)
        if m is None:
            raise ValueError(f"cannot parse interval {part.strip()!r} in set {text!r}")
        open_br, lo, hi, close_br = m.groups()
        try:
            lo_v, hi_v = float(lo), float(hi)
        except ValueError as exc:
            raise ValueError(f"bad number in interval {part.strip()!r}") from exc
        if lo_v > hi_v:
            raise ValueError(f"interval {part.strip()!r} has lower endpoint above upper")
        out.append(Interval(lo_v, hi_v, open_br == "[", close_br == "]"))
    return IntervalUnion(out)
