"""Traces, predicates over their variables, and Booleanization into truth sets."""

from __future__ import annotations

import csv
import io
import math
import os
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, TextIO, Union

import numpy as np

from .intervals import EMPTY, Interval, IntervalSet, complement, make


class TraceError(ValueError):
    """Malformed or inconsistent trace data."""


class PredicateError(ValueError):
    """Bad predicate expression or a predicate that does not fit the trace."""


@dataclass(frozen=True)
class Trace:
    name: str
    times: np.ndarray
    columns: Mapping[str, np.ndarray]

    def __post_init__(self):
        if len(self.times) < 2:
            raise TraceError(f"trace {self.name!r} needs at least 2 samples, got {len(self.times)}")
        bad = np.nonzero(np.diff(self.times) <= 0)[0]
        if len(bad):
            raise TraceError(f"timestamp order violation at sample {bad[0] + 1} of trace {self.name!r}")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def span(self) -> Interval:
        return Interval(float(self.times[0]), float(self.times[-1]), True, False)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def valuation(self, i: int) -> dict[str, float]:
        return {name: float(col[i]) for name, col in self.columns.items()}


def load_trace(source: Union[str, os.PathLike, TextIO], time_column: str = "time",
               name: Optional[str] = None) -> Trace:
    """Read a CSV trace with a header row; every cell must parse as a real."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            return load_trace(fh, time_column, name or os.path.basename(os.fspath(source)))
    reader = csv.reader(source)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise TraceError("empty trace file") from None
    if time_column not in header:
        raise TraceError(f"time column {time_column!r} not found in header {header}")
    if len(header) < 2:
        raise TraceError("trace needs a time column plus at least one variable")
    rows = []
    lines = []
    for r, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise TraceError(f"row {r}: expected {len(header)} cells, got {len(row)}")
        vals = []
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise TraceError(f"row {r}, column {c + 1} ({header[c]}): cannot parse {cell!r}") from None
            if not math.isfinite(v):
                raise TraceError(f"row {r}, column {c + 1} ({header[c]}): non-finite value {cell!r}")
            vals.append(v)
        rows.append(vals)
        lines.append(r)
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    ti = header.index(time_column)
    bad = np.nonzero(np.diff(data[:, ti]) <= 0)[0]
    if len(bad):
        raise TraceError(f"row {lines[bad[0] + 1]}: timestamp order violation "
                         f"({data[bad[0] + 1, ti]:g} does not follow {data[bad[0], ti]:g})")
    cols = {h: data[:, j] for j, h in enumerate(header) if j != ti}
    return Trace(name or "trace", data[:, ti], cols)


def trace_from_text(text: str, time_column: str = "time", name: str = "trace") -> Trace:
    return load_trace(io.StringIO(text), time_column, name)


# ---------------------------------------------------------------------------
# Predicate expressions: atoms `var op const` joined by &&, ||, ! and parentheses.
# A bare variable name is shorthand for `var != 0`.

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<op><=|>=|==|!=|<|>|=)
  | (?P<and>&&)
  | (?P<or>\|\|)
  | (?P<not>!)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<name>[A-Za-z_][A-Za-z0-9_.]*)
""", re.VERBOSE)

_OPS = {
    "<": np.less, "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal,
    "==": np.equal, "=": np.equal, "!=": np.not_equal,
}


@dataclass(frozen=True)
class Atom:
    var: str
    op: str
    const: float


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PredicateError(f"unexpected character {text[pos]!r} at column {pos + 1} in {text!r}")
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos + 1))
        pos = m.end()
    return toks


class _ExprParser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind: str):
        if self.peek() != kind:
            where = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text) + 1
            raise PredicateError(f"expected {kind} at column {where} in {self.text!r}")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def parse(self):
        node = self.disj()
        if self.i != len(self.toks):
            raise PredicateError(f"unexpected {self.toks[self.i][1]!r} at column {self.toks[self.i][2]} in {self.text!r}")
        return node

    def disj(self):
        args = [self.conj()]
        while self.peek() == "or":
            self.take("or")
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self):
        args = [self.unary()]
        while self.peek() == "and":
            self.take("and")
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self):
        if self.peek() == "not":
            self.take("not")
            return Not(self.unary())
        if self.peek() == "lp":
            self.take("lp")
            node = self.disj()
            self.take("rp")
            return node
        var = self.take("name")[1]
        if self.peek() == "op":
            op = self.take("op")[1]
            const = float(self.take("num")[1])
            return Atom(var, op, const)
        return Atom(var, "!=", 0.0)


@dataclass(frozen=True)
class Predicate:
    name: str
    expr: str
    tree: object = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_\-]*", self.name):
            raise PredicateError(f"invalid predicate name {self.name!r}")
        if self.tree is None:
            object.__setattr__(self, "tree", _ExprParser(self.expr).parse())

    @property
    def variables(self) -> set[str]:
        out: set[str] = set()
        _collect_vars(self.tree, out)
        return out


def _collect_vars(node, out: set[str]) -> None:
    if isinstance(node, Atom):
        out.add(node.var)
    elif isinstance(node, Not):
        _collect_vars(node.arg, out)
    else:
        for a in node.args:
            _collect_vars(a, out)


def _eval(node, env: Mapping[str, object]):
    if isinstance(node, Atom):
        if node.var not in env:
            raise PredicateError(f"unknown variable {node.var!r}")
        return _OPS[node.op](env[node.var], node.const)
    if isinstance(node, Not):
        return np.logical_not(_eval(node.arg, env))
    parts = [_eval(a, env) for a in node.args]
    combine = np.logical_and if isinstance(node, And) else np.logical_or
    out = parts[0]
    for p in parts[1:]:
        out = combine(out, p)
    return out


def evaluate_predicate(p: Predicate, valuation: Mapping[str, float]) -> bool:
    return bool(_eval(p.tree, valuation))


def evaluate_samples(p: Predicate, trace: Trace) -> np.ndarray:
    """Truth value of ``p`` at every sample of ``trace``."""
    missing = p.variables - set(trace.columns)
    if missing:
        raise PredicateError(f"predicate {p.name!r} uses unknown variable(s) {sorted(missing)} "
                             f"(trace {trace.name!r} has {sorted(trace.columns)})")
    vals = _eval(p.tree, trace.columns)
    return np.broadcast_to(np.asarray(vals, dtype=bool), trace.times.shape)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruthSet:
    """Truth intervals of every predicate (and its negation) over one trace."""

    span: Interval
    pos: Mapping[str, IntervalSet]
    neg: Mapping[str, IntervalSet]
    name: str = "trace"

    @classmethod
    def from_sets(cls, span: Interval, pos: Mapping[str, IntervalSet], name: str = "trace") -> "TruthSet":
        return cls(span, dict(pos), {p: complement(s, span) for p, s in pos.items()}, name)

    @property
    def names(self) -> list[str]:
        return list(self.pos)

    @property
    def duration(self) -> float:
        return self.span.hi - self.span.lo

    @property
    def full(self) -> IntervalSet:
        return IntervalSet((self.span,), _normalized=True)

    def literal(self, name: str, negated: bool = False) -> IntervalSet:
        table = self.neg if negated else self.pos
        try:
            return table[name]
        except KeyError:
            raise PredicateError(f"unknown predicate {name!r}; known: {self.names}") from None


def _runs(mask: np.ndarray, times: np.ndarray) -> IntervalSet:
    # Sample-and-hold: a run of true samples i..j-1 holds on [t_i, t_j); a run that
    # reaches the last sample ends at t_d, so a lone final true sample adds nothing.
    d = len(mask)
    m = mask.astype(np.int8)
    edges = np.diff(np.concatenate(([0], m, [0])))
    starts = np.nonzero(edges == 1)[0]
    stops = np.nonzero(edges == -1)[0]
    out = []
    for i, j in zip(starts, stops):
        end = times[j] if j < d else times[d - 1]
        iv = make(float(times[i]), float(end), True, False)
        if iv is not None:
            out.append(iv)
    return IntervalSet(out, _normalized=True) if out else EMPTY


def booleanize(trace: Trace, alphabet: Sequence[Predicate]) -> TruthSet:
    names = [p.name for p in alphabet]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise PredicateError(f"duplicate predicate name(s): {sorted(dup)}")
    span = trace.span
    pos = {p.name: _runs(evaluate_samples(p, trace), trace.times) for p in alphabet}
    return TruthSet(span, pos, {n: complement(s, span) for n, s in pos.items()}, trace.name)
