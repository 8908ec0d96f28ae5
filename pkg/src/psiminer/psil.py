"""PSI-L properties: syntax tree, parser, printer and match semantics.

A property reads ``s_n ##[a:b] ... s_0 |-> [##[a:b]] [!]E``. Each ``s`` is a
conjunction of literals. Matches are computed on interval sets: the end-match
set of a sequence is built by shifting the running match set forward by each
delay and intersecting with the next term's truth.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .intervals import (
    EMPTY, Interval, IntervalSet, clamp, complement, delay, fmt_time, intersect,
    minkowski_diff, minkowski_sum, tlt,
)
from .trace import TruthSet

ZERO = delay(0.0, 0.0)


class PsilSyntaxError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True, order=True)
class Literal:
    name: str
    negated: bool = False

    def __str__(self) -> str:
        return ("!" if self.negated else "") + self.name

    def __invert__(self) -> "Literal":
        return Literal(self.name, not self.negated)


Term = tuple  # tuple[Literal, ...]; the empty tuple means "true"


def term_str(term: Term) -> str:
    return " && ".join(str(l) for l in term) if term else "true"


def delay_str(d: Interval) -> str:
    return f"##[{fmt_time(d.lo)}:{fmt_time(d.hi)}]"


def add_delays(a: Interval, b: Interval) -> Interval:
    return delay(a.lo + b.lo, a.hi + b.hi)


@dataclass(frozen=True)
class SequenceExpr:
    """Terms from the earliest (``s_n``) to the latest (``s_0``) with the delays between them."""

    terms: tuple
    delays: tuple

    def __post_init__(self):
        if len(self.delays) != max(0, len(self.terms) - 1):
            raise ValueError("a sequence needs exactly one delay between consecutive terms")
        if not self.terms or (len(self.terms) > 1 and not any(self.terms)):
            raise ValueError("a sequence needs at least one nonempty term")

    def __str__(self) -> str:
        parts = [term_str(self.terms[0])]
        for d, t in zip(self.delays, self.terms[1:]):
            parts.append(delay_str(d))
            parts.append(term_str(t))
        return " ".join(parts)


@dataclass(frozen=True)
class PsiProperty:
    antecedent: SequenceExpr
    consequent: Literal
    consequent_delay: Optional[Interval] = None
    support: Optional[float] = field(default=None, compare=False)
    correlation: Optional[float] = field(default=None, compare=False)

    def __str__(self) -> str:
        rhs = str(self.consequent)
        if self.consequent_delay is not None:
            rhs = f"{delay_str(self.consequent_delay)} {rhs}"
        return f"{self.antecedent} |-> {rhs}"

    @property
    def horizon(self) -> float:
        """Upper bound of the consequent delay (0 for an immediate consequent)."""
        return self.consequent_delay.hi if self.consequent_delay is not None else 0.0


# ---------------------------------------------------------------------------
# Parsing

_TOK = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<hash>\#\#)
  | (?P<implies>\|->)
  | (?P<and>&&)
  | (?P<not>!)
  | (?P<lb>\[)
  | (?P<rb>\])
  | (?P<colon>:)
  | (?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_\-]*)
""", re.VERBOSE)


class _Parser:
    def __init__(self, text: str, line0: int = 1):
        self.text = text
        self.line0 = line0
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOK.match(text, pos)
            if not m:
                raise self._error(f"unexpected character {text[pos]!r}", pos)
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.i = 0

    def _error(self, msg: str, pos: int) -> PsilSyntaxError:
        line = self.text.count("\n", 0, pos)
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return PsilSyntaxError(msg, self.line0 + line, col)

    def _pos(self) -> int:
        return self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)

    def peek(self) -> Optional[str]:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind: str, what: str):
        if self.peek() != kind:
            found = repr(self.toks[self.i][1]) if self.i < len(self.toks) else "end of input"
            raise self._error(f"expected {what}, found {found}", self._pos())
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def parse(self) -> PsiProperty:
        terms = [self.term()]
        delays = []
        while self.peek() == "hash":
            delays.append(self.delay())
            terms.append(self.term())
        self.take("implies", "'|->'")
        cdelay = self.delay() if self.peek() == "hash" else None
        consequent = self.literal()
        if self.i != len(self.toks):
            raise self._error(f"unexpected {self.toks[self.i][1]!r} after consequent", self._pos())
        try:
            seq = SequenceExpr(tuple(terms), tuple(delays))
        except ValueError as e:
            raise self._error(str(e), 0) from None
        return PsiProperty(seq, consequent, cdelay)

    def delay(self) -> Interval:
        start = self._pos()
        self.take("hash", "'##'")
        self.take("lb", "'['")
        a = float(self.take("num", "a number")[1])
        self.take("colon", "':'")
        b = float(self.take("num", "a number")[1])
        self.take("rb", "']'")
        if a < 0:
            raise self._error(f"negative delay bound {a}", start)
        if tlt(b, a):
            raise self._error(f"delay interval [{fmt_time(a)}:{fmt_time(b)}] has lower bound above upper bound", start)
        return delay(a, b)

    def term(self) -> Term:
        if self.peek() == "name" and self.toks[self.i][1] == "true":
            self.i += 1
            return ()
        lits = [self.literal()]
        while self.peek() == "and":
            self.take("and", "'&&'")
            lits.append(self.literal())
        return tuple(lits)

    def literal(self) -> Literal:
        neg = False
        if self.peek() == "not":
            self.take("not", "'!'")
            neg = True
        return Literal(self.take("name", "a predicate name")[1], neg)


def parse_psil(text: str, line: int = 1) -> PsiProperty:
    return _Parser(text, line).parse()


def parse_psil_file(text: str) -> list[PsiProperty]:
    """One property per line; blank lines and ``#`` comments are ignored."""
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if body.strip():
            out.append(parse_psil(body, n))
    return out


def _strip_comment(line: str) -> str:
    # '#' starts a comment unless it is part of a '##' delay marker. A property
    # never begins with a delay, so a line led by '#' is always a comment.
    if line.lstrip().startswith("#"):
        return ""
    i = 0
    while i < len(line):
        if line[i] == "#":
            if line.startswith("##", i):
                i += 2
                continue
            return line[:i]
        i += 1
    return line


# ---------------------------------------------------------------------------
# Match semantics

def bucket_truth(term: Term, truth: TruthSet) -> IntervalSet:
    """Times at which every literal of the term holds; the empty term holds on the whole span."""
    out = truth.full
    for lit in term:
        out = intersect(out, truth.literal(lit.name, lit.negated))
    return out


def compress(seq: SequenceExpr, truth: TruthSet) -> tuple[list[IntervalSet], list[Interval], Interval]:
    """Bucket truths of the nonempty terms, the merged delays between them, and any trailing delay.

    Delays around empty terms are summed; empty leading terms are dropped.
    """
    truths: list[IntervalSet] = []
    delays: list[Interval] = []
    pending = ZERO
    for idx, term in enumerate(seq.terms):
        if idx:
            pending = add_delays(pending, seq.delays[idx - 1])
        if not term:
            continue
        if truths:
            delays.append(pending)
        truths.append(bucket_truth(term, truth))
        pending = ZERO
    return truths, delays, pending


def forward_sets(truths: Sequence[IntervalSet], delays: Sequence[Interval]) -> list[IntervalSet]:
    """Forward influence at every stage, united over all work-sets.

    Minkowski sum and intersection both distribute over union, so carrying
    whole sets through the recursion gives the same coverage as enumerating
    every work-set, while pruning dead branches for free.
    """
    out = [truths[0]]
    for d, nxt in zip(delays, truths[1:]):
        cur = out[-1]
        out.append(intersect(minkowski_sum(cur, d), nxt) if cur else EMPTY)
    return out


def backward_sets(truths: Sequence[IntervalSet], delays: Sequence[Interval]) -> list[IntervalSet]:
    """Participating parts of every stage, united over all work-sets."""
    fwd = forward_sets(truths, delays)
    out = [fwd[-1]]
    for p in range(len(truths) - 2, -1, -1):
        out.append(intersect(minkowski_diff(out[-1], delays[p]), fwd[p]))
    out.reverse()
    return out


def influence_set(seq: SequenceExpr, truth: TruthSet) -> IntervalSet:
    """End-match set of the sequence on one trace."""
    truths, delays, trailing = compress(seq, truth)
    if not truths:
        return truth.full
    ends = forward_sets(truths, delays)[-1]
    if trailing != ZERO:
        ends = clamp(minkowski_sum(ends, trailing), truth.span)
    return ends


def forward_influence(delays: Sequence[Interval], workset: Sequence[Interval]) -> Optional[Interval]:
    """End-match interval of one work-set (one interval per stage, earliest first)."""
    cur: Optional[Interval] = workset[0]
    for d, nxt in zip(delays, workset[1:]):
        shifted = IntervalSet((cur,), _normalized=True)
        hit = intersect(minkowski_sum(shifted, d), IntervalSet((nxt,), _normalized=True))
        if not hit:
            return None
        cur = hit[0]
    return cur


def backward_influence(delays: Sequence[Interval], workset: Sequence[Interval], i: int) -> Optional[Interval]:
    """Part of the stage ``i`` interval (counted from the last stage, 0) that takes part in a match."""
    fwd: list[Optional[Interval]] = [workset[0]]
    for p in range(1, len(workset)):
        fwd.append(forward_influence(delays[:p], workset[:p + 1]))
    if fwd[-1] is None:
        return None
    cur = fwd[-1]
    for p in range(len(workset) - 2, len(workset) - 2 - i, -1):
        back = intersect(minkowski_diff(IntervalSet((cur,), _normalized=True), delays[p]),
                         IntervalSet((fwd[p],), _normalized=True))
        if not back:
            return None
        cur = back[0]
    return cur


def worksets(truths: Sequence[IntervalSet]) -> Iterator[tuple[Interval, ...]]:
    return itertools.product(*[s.intervals for s in truths])


def end_matches(truths: Sequence[IntervalSet], delays: Sequence[Interval]) -> list[Interval]:
    """Per-work-set end-match intervals, in work-set enumeration order."""
    out = []
    for ws in worksets(truths):
        hit = forward_influence(delays, ws)
        if hit is not None:
            out.append(hit)
    return out


def match_ends(prop: PsiProperty, truth: TruthSet) -> IntervalSet:
    """Consequent times reached by antecedent matches at which the consequent holds."""
    ends = influence_set(prop.antecedent, truth)
    if prop.consequent_delay is not None:
        ends = minkowski_sum(ends, prop.consequent_delay)
    return intersect(ends, truth.literal(prop.consequent.name, prop.consequent.negated))


def counterexamples(prop: PsiProperty, truth: TruthSet) -> IntervalSet:
    """Antecedent end-match times with no consequent witness inside the consequent delay."""
    ends = influence_set(prop.antecedent, truth)
    target = truth.literal(prop.consequent.name, prop.consequent.negated)
    reach = minkowski_diff(target, prop.consequent_delay or ZERO)
    return intersect(ends, complement(reach, truth.span))


def literals(prop: PsiProperty) -> Iterable[Literal]:
    for term in prop.antecedent.terms:
        yield from term
    yield prop.consequent
