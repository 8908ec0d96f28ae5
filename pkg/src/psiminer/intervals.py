"""Dense-time interval sets with explicit endpoint openness.

Every set handled here is kept normalized: sorted, non-overlapping and
maximal. Time comparisons use a small relative tolerance so that float
noise from repeated sums and differences does not create slivers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

EPS = 1e-9


def teq(a: float, b: float) -> bool:
    """Tolerant time equality."""
    d = a - b
    if d < 0:
        d = -d
    if d <= EPS:
        return True
    return d <= EPS * max(abs(a), abs(b))


def tlt(a: float, b: float) -> bool:
    """Tolerant strict less-than."""
    return a < b and not teq(a, b)


@dataclass(frozen=True, slots=True)
class Interval:
    """A nonempty interval of time; ``[a:b)`` is ``Interval(a, b, True, False)``."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = self.lo, self.hi
        if not (lo - lo == 0 and hi - hi == 0):
            raise ValueError(f"interval bounds must be finite: {lo}, {hi}")
        if hi <= lo:
            if not teq(lo, hi):
                raise ValueError(f"empty interval: lo {lo} > hi {hi}")
            if not (self.lo_closed and self.hi_closed):
                raise ValueError(f"empty interval at {lo}")

    @property
    def length(self) -> float:
        return max(0.0, self.hi - self.lo)

    @property
    def is_point(self) -> bool:
        return teq(self.lo, self.hi)

    def contains(self, t: float) -> bool:
        if teq(t, self.lo):
            return self.lo_closed
        if teq(t, self.hi):
            return self.hi_closed
        return self.lo < t < self.hi

    def approx_eq(self, other: "Interval") -> bool:
        return (
            teq(self.lo, other.lo)
            and teq(self.hi, other.hi)
            and self.lo_closed == other.lo_closed
            and self.hi_closed == other.hi_closed
        )

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{fmt_time(self.lo)}:{fmt_time(self.hi)}{right}"


def make(lo: float, hi: float, lo_closed: bool = True, hi_closed: bool = True) -> Optional[Interval]:
    """Build an interval, or return None when the bounds describe the empty set."""
    if tlt(hi, lo):
        return None
    if teq(lo, hi):
        if not (lo_closed and hi_closed):
            return None
        hi = lo
    return Interval(lo, hi, lo_closed, hi_closed)


def closed(lo: float, hi: float) -> Interval:
    return Interval(lo, hi, True, True)


def closedopen(lo: float, hi: float) -> Interval:
    return Interval(lo, hi, True, False)


def delay(lo: float, hi: float) -> Interval:
    """A closed, nonnegative delay interval ``[lo:hi]``."""
    if lo < 0 and not teq(lo, 0.0):
        raise ValueError(f"delay bounds must be nonnegative: [{lo}:{hi}]")
    if tlt(hi, lo):
        raise ValueError(f"delay lower bound exceeds upper bound: [{lo}:{hi}]")
    return Interval(max(lo, 0.0), max(hi, lo, 0.0), True, True)


def fmt_time(x: float) -> str:
    """Shortest readable form of a time value, with float noise removed."""
    s = f"{x:.10g}"
    if s == "-0":
        s = "0"
    return s


# At equal values an open upper bound ends before a closed one.
def _hi_before(a: Interval, b: Interval) -> bool:
    if teq(a.hi, b.hi):
        return (not a.hi_closed) and b.hi_closed
    return a.hi < b.hi


def _intersect_pair(a: Interval, b: Interval) -> Optional[Interval]:
    if teq(a.lo, b.lo):
        lo, lc = a.lo, a.lo_closed and b.lo_closed
    elif a.lo > b.lo:
        lo, lc = a.lo, a.lo_closed
    else:
        lo, lc = b.lo, b.lo_closed
    if teq(a.hi, b.hi):
        hi, hc = a.hi, a.hi_closed and b.hi_closed
    elif a.hi < b.hi:
        hi, hc = a.hi, a.hi_closed
    else:
        hi, hc = b.hi, b.hi_closed
    return make(lo, hi, lc, hc)


def interval_diff(f: Interval, p: Interval) -> Interval:
    """Minkowski difference of two intervals, ``{x - y : x in f, y in p}``."""
    lo = f.lo - p.hi
    hi = f.hi - p.lo
    iv = make(lo, hi, f.lo_closed and p.hi_closed, f.hi_closed and p.lo_closed)
    if iv is None:  # only possible when both are points with an open side; cannot happen
        iv = Interval(lo, lo)
    return iv


class IntervalSet:
    """An immutable, normalized set of intervals."""

    __slots__ = ("_ivs",)

    def __init__(self, intervals: Iterable[Interval] = (), _normalized: bool = False):
        ivs = tuple(intervals)
        self._ivs = ivs if _normalized else _normalize(ivs)

    @classmethod
    def of(cls, *intervals: Interval) -> "IntervalSet":
        return cls(intervals)

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return self._ivs

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._ivs)

    def __len__(self) -> int:
        return len(self._ivs)

    def __getitem__(self, i: int) -> Interval:
        return self._ivs[i]

    def __bool__(self) -> bool:
        return bool(self._ivs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return len(self._ivs) == len(other._ivs) and all(
            a.approx_eq(b) for a, b in zip(self._ivs, other._ivs)
        )

    def __hash__(self):
        return hash(len(self._ivs))

    def __repr__(self) -> str:
        return "{" + ",".join(str(iv) for iv in self._ivs) + "}"

    __str__ = __repr__

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return union(self, other)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        return intersect(self, other)

    @property
    def length(self) -> float:
        return length(self)

    def contains(self, t: float) -> bool:
        return any(iv.contains(t) for iv in self._ivs)

    def to_json(self) -> list:
        return [[iv.lo, iv.hi, iv.lo_closed, iv.hi_closed] for iv in self._ivs]


EMPTY = IntervalSet((), _normalized=True)


def _normalize(raw: Sequence[Interval]) -> tuple[Interval, ...]:
    if not raw:
        return ()
    ordered = sorted(raw, key=lambda iv: (iv.lo, not iv.lo_closed))
    out: list[Interval] = []
    cur = ordered[0]
    for nxt in ordered[1:]:
        if teq(nxt.lo, cur.hi):
            touching = cur.hi_closed or nxt.lo_closed
        else:
            touching = nxt.lo < cur.hi
        if not touching:
            out.append(cur)
            cur = nxt
            continue
        lc = cur.lo_closed or (teq(cur.lo, nxt.lo) and nxt.lo_closed)
        if teq(cur.hi, nxt.hi):
            hi, hc = cur.hi, cur.hi_closed or nxt.hi_closed
        elif nxt.hi > cur.hi:
            hi, hc = nxt.hi, nxt.hi_closed
        else:
            hi, hc = cur.hi, cur.hi_closed
        cur = Interval(cur.lo, hi, lc, hc)
    out.append(cur)
    return tuple(out)


def normalize(raw: Iterable[Interval]) -> IntervalSet:
    return IntervalSet(raw)


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    if not a:
        return b
    if not b:
        return a
    return IntervalSet(a.intervals + b.intervals)


def union_all(sets: Iterable[IntervalSet]) -> IntervalSet:
    pieces: list[Interval] = []
    for s in sets:
        pieces.extend(s.intervals)
    return IntervalSet(pieces)


def _apart(x: float, y: float) -> bool:
    """True when ``x < y`` by clearly more than the tolerance (cheap, conservative)."""
    return y - x > EPS * (1.0 + abs(x) + abs(y))


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    A, B = a.intervals, b.intervals
    if not A or not B:
        return EMPTY
    out: list[Interval] = []
    i = j = 0
    na, nb = len(A), len(B)
    while i < na and j < nb:
        x, y = A[i], B[j]
        if x.hi < y.lo and _apart(x.hi, y.lo):
            i += 1
            continue
        if y.hi < x.lo and _apart(y.hi, x.lo):
            j += 1
            continue
        piece = _intersect_pair(x, y)
        if piece is not None:
            out.append(piece)
        if _hi_before(x, y) or (teq(x.hi, y.hi) and x.hi_closed == y.hi_closed):
            i += 1
        else:
            j += 1
    return IntervalSet(_merge_sorted(out), _normalized=True)


def _merge_sorted(ivs: list[Interval]) -> tuple[Interval, ...]:
    # pieces of an intersection are ordered and disjoint; only touching ends can merge
    if len(ivs) < 2:
        return tuple(ivs)
    out = [ivs[0]]
    for nxt in ivs[1:]:
        cur = out[-1]
        if teq(nxt.lo, cur.hi) and (cur.hi_closed or nxt.lo_closed):
            out[-1] = Interval(cur.lo, nxt.hi, cur.lo_closed, nxt.hi_closed)
        else:
            out.append(nxt)
    return tuple(out)


def minkowski_sum(a: IntervalSet, d: Interval) -> IntervalSet:
    """Shift every member forward by the delay: ``[x:y]`` becomes ``[x+d.lo : y+d.hi]``."""
    out = []
    for iv in a:
        piece = make(iv.lo + d.lo, iv.hi + d.hi, iv.lo_closed and d.lo_closed, iv.hi_closed and d.hi_closed)
        if piece is not None:
            out.append(piece)
    return IntervalSet(out)


def minkowski_diff(a: IntervalSet, d: Interval) -> IntervalSet:
    """Stretch every member back by the delay: ``[x:y]`` becomes ``[x-d.hi : y-d.lo]``."""
    out = []
    for iv in a:
        piece = make(iv.lo - d.hi, iv.hi - d.lo, iv.lo_closed and d.hi_closed, iv.hi_closed and d.lo_closed)
        if piece is not None:
            out.append(piece)
    return IntervalSet(out)


def length(a: IntervalSet) -> float:
    return sum(iv.hi - iv.lo for iv in a)


def overlap_length(a: IntervalSet, b: IntervalSet) -> float:
    """``length(intersect(a, b))`` without building the intersection."""
    A, B = a.intervals, b.intervals
    i = j = 0
    na, nb = len(A), len(B)
    total = 0.0
    while i < na and j < nb:
        x, y = A[i], B[j]
        lo = x.lo if x.lo > y.lo else y.lo
        if x.hi < y.hi:
            hi = x.hi
            i += 1
        else:
            hi = y.hi
            j += 1
        if hi > lo:
            total += hi - lo
    return total


def widen(a: Iterable[Interval]) -> Interval:
    """Smallest closed interval containing every member."""
    ivs = list(a)
    if not ivs:
        raise ValueError("widen of empty set")
    return Interval(min(iv.lo for iv in ivs), max(iv.hi for iv in ivs), True, True)


def clamp(a: IntervalSet, span: Interval) -> IntervalSet:
    return intersect(a, IntervalSet((span,), _normalized=True))


def complement(a: IntervalSet, span: Interval) -> IntervalSet:
    """The part of ``span`` not covered by ``a``."""
    out = []
    cur, cur_closed = span.lo, span.lo_closed
    for iv in clamp(a, span):
        gap = make(cur, iv.lo, cur_closed, not iv.lo_closed)
        if gap is not None:
            out.append(gap)
        cur, cur_closed = iv.hi, not iv.hi_closed
    tail = make(cur, span.hi, cur_closed, span.hi_closed)
    if tail is not None:
        out.append(tail)
    return IntervalSet(out, _normalized=True)


_IV_RE = re.compile(r"([\[(])\s*([-+0-9.eE]+)\s*[:,]\s*([-+0-9.eE]+)\s*([\])])")


def parse_intervals(text: str) -> IntervalSet:
    """Read the ``{[a:b),[c:d]}`` notation used in reports and tests."""
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        body = body[1:-1]
    out = []
    pos = 0
    for m in _IV_RE.finditer(body):
        if body[pos:m.start()].strip(" ,"):
            raise ValueError(f"cannot parse interval text near {body[pos:m.start()]!r}")
        out.append(Interval(float(m.group(2)), float(m.group(3)), m.group(1) == "[", m.group(4) == "]"))
        pos = m.end()
    if body[pos:].strip(" ,"):
        raise ValueError(f"cannot parse interval text near {body[pos:]!r}")
    return IntervalSet(out)


def parse_interval(text: str) -> Interval:
    s = parse_intervals(text)
    if len(s) != 1:
        raise ValueError(f"expected exactly one interval in {text!r}")
    return s[0]
