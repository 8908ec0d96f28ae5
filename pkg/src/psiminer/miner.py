"""Decision-tree miner for n-length, k-resolution prefix sequences.

Each tree node carries a set of constraints ``<literal, bucket>``. The
influence set of the node is the end-match set of the sequence those
constraints describe, and the node is scored against the pseudo-target of its
smallest nonempty bucket. Nodes split on the ``<predicate, bucket>`` pair with
the best unified gain; nodes whose unified error is zero yield properties.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .intervals import IntervalSet, delay, length, minkowski_sum, overlap_length
from .metrics import Means, NodeMetrics, alpha, pooled_means, unified_gain
from .properties import build_property, template_delays
from .psil import Literal, PsiProperty, bucket_truth, forward_sets
from .pseudo import PseudoTargetBank, build_pseudo_targets
from .trace import PredicateError, TruthSet

GAIN_TOL = 1e-12

Constraint = tuple  # (Literal, bucket index)


@dataclass(frozen=True)
class MinerConfig:
    target: str
    n: int
    k: float
    max_depth: int = 20
    min_support: float = 0.0
    min_correlation: float = 0.0
    max_nodes: int = 100_000

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if not self.k > 0:
            raise ValueError(f"k must be > 0, got {self.k}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        for label, v in (("min_support", self.min_support), ("min_correlation", self.min_correlation)):
            if not 0 <= v <= 100:
                raise ValueError(f"{label} must be a percentage in [0, 100], got {v}")


class Stop(enum.Enum):
    SPLIT = "split"
    PURE = "pure"
    DEPTH = "depth"
    SUPPORT = "support"
    CORRELATION = "correlation"
    NO_GAIN = "no-gain"
    EMPTY = "empty"
    NODE_LIMIT = "node-limit"


@dataclass
class DecisionNode:
    constraints: frozenset
    depth: int
    metrics: Optional[NodeMetrics] = None
    stop: Stop = Stop.SPLIT
    split: Optional[tuple] = None          # (predicate, bucket, gain)
    children: Optional[tuple] = None       # (neg, pos)
    verdict: Optional[Literal] = None
    prop: Optional[PsiProperty] = None
    path: tuple = ()

    def walk(self):
        yield self
        if self.children:
            for c in self.children:
                yield from c.walk()


def smallest_bucket(constraints) -> int:
    return min((i for _, i in constraints), default=0)


def constraint_str(c: Constraint) -> str:
    lit, i = c
    return f"{lit}@{i}"


@dataclass
class MiningResult:
    tree: DecisionNode
    properties: list = field(default_factory=list)
    pure_nodes: list = field(default_factory=list)

    def summary(self) -> dict:
        nodes = list(self.tree.walk())
        return {
            "nodes": len(nodes),
            "depth": max(n.depth for n in nodes),
            "stops": dict(sorted(Counter(n.stop.value for n in nodes).items())),
        }


class Miner:
    def __init__(self, truths: Sequence[TruthSet], predicates: Sequence[str], cfg: MinerConfig):
        if not truths:
            raise ValueError("no traces to mine")
        if not predicates:
            raise PredicateError("no predicates")
        for t in truths:
            if cfg.target not in t.pos:
                raise PredicateError(f"target {cfg.target!r} is not a predicate of the alphabet")
        self.truths = list(truths)
        self.cfg = cfg
        self.order = {p: j for j, p in enumerate(predicates)}
        self.candidates = [p for p in predicates if p != cfg.target]
        self.banks: list[PseudoTargetBank] = [build_pseudo_targets(t, cfg.target, cfg.n, cfg.k) for t in truths]
        self.overlaps = [[b.overlap(i) for i in range(cfg.n + 1)] for b in self.banks]
        self.duration = sum(t.duration for t in truths)
        self._bucket_cache: dict = {}
        self._infl_cache: dict = {}
        self.node_count = 0

    # -- influence and scoring -------------------------------------------

    def buckets(self, constraints) -> dict[int, tuple]:
        out: dict[int, list] = {}
        for lit, i in constraints:
            out.setdefault(i, []).append(lit)
        return {i: tuple(sorted(lits, key=lambda l: (self.order.get(l.name, 0), l.negated)))
                for i, lits in out.items()}

    def _bucket_truths(self, i: int, term: tuple) -> list[IntervalSet]:
        key = (i, term)
        hit = self._bucket_cache.get(key)
        if hit is None:
            hit = [bucket_truth(term, t) for t in self.truths]
            self._bucket_cache[key] = hit
        return hit

    def influence(self, constraints: frozenset) -> list[IntervalSet]:
        hit = self._infl_cache.get(constraints)
        if hit is not None:
            return hit
        if not constraints:
            out = [t.full for t in self.truths]
        else:
            bk = self.buckets(constraints)
            indices = sorted(bk, reverse=True)
            delays = template_delays(indices, self.cfg.k)
            per_bucket = [self._bucket_truths(i, bk[i]) for i in indices]
            out = [forward_sets([pb[t] for pb in per_bucket], delays)[-1] for t in range(len(self.truths))]
        if len(self._infl_cache) > 20000:
            self._infl_cache.clear()
        self._infl_cache[constraints] = out
        return out

    def means(self, constraints: frozenset) -> Means:
        b = smallest_bucket(constraints)
        return pooled_means(
            self.influence(constraints),
            [bank.pos[b] for bank in self.banks],
            [bank.neg[b] for bank in self.banks],
            [ovl[b] for ovl in self.overlaps],
        )

    def node_metrics(self, constraints: frozenset, m: Means) -> NodeMetrics:
        b = smallest_bucket(constraints)
        negated = m.neg > m.pos
        reach = delay(0.0, b * self.cfg.k)
        num = den = 0.0
        for infl, bank in zip(self.influence(constraints), self.banks):
            side = bank.side(b, negated)
            den += length(side)
            num += overlap_length(minkowski_sum(infl, reach), side)
        corr = 100.0 * num / den if den > 0 else 0.0
        support = 100.0 * m.length / self.duration if self.duration > 0 else 0.0
        return NodeMetrics(m.pos, m.error, m.unified_error, support, corr, b, m.neg, m.length)

    def gain(self, constraints: frozenset, p: str, i: int, parent_ue: float) -> Optional[float]:
        """Unified gain of splitting on ``<p, i>``; None when both children are empty."""
        m_pos = self.means(constraints | {(Literal(p), i)})
        m_neg = self.means(constraints | {(Literal(p, True), i)})
        if m_pos.length + m_neg.length <= 0:
            return None
        a = alpha(m_pos.length, m_neg.length)
        ue_pos = m_pos.unified_error if m_pos.length > 0 else 0.0
        ue_neg = m_neg.unified_error if m_neg.length > 0 else 0.0
        return unified_gain(parent_ue, ue_pos, ue_neg, a)

    def best_split(self, constraints: frozenset, parent_ue: float) -> Optional[tuple]:
        best = None
        g_best = 0.0
        taken = {(lit.name, i) for lit, i in constraints}
        for i in range(self.cfg.n + 1):
            for p in self.candidates:
                if (p, i) in taken:
                    continue
                g = self.gain(constraints, p, i, parent_ue)
                if g is not None and g > g_best + GAIN_TOL:
                    g_best = g
                    best = (p, i, g, constraints | {(Literal(p, True), i)}, constraints | {(Literal(p), i)})
        return best

    # -- tree construction ------------------------------------------------

    def grow(self, constraints: frozenset = frozenset(), depth: int = 0, path: tuple = ()) -> DecisionNode:
        self.node_count += 1
        node = DecisionNode(constraints, depth, path=path)
        m = self.means(constraints)
        if m.length <= 0:
            node.stop = Stop.EMPTY
            return node
        node.metrics = self.node_metrics(constraints, m)
        if node.metrics.support_pct < self.cfg.min_support:
            node.stop = Stop.SUPPORT
            return node
        if node.metrics.correlation_pct < self.cfg.min_correlation:
            node.stop = Stop.CORRELATION
            return node
        if m.pure:
            node.stop = Stop.PURE
            node.verdict = Literal(self.cfg.target, negated=not m.pure_pos)
            node.prop = build_property(self.buckets(constraints), self.truths, node.verdict, self.cfg.k)
            return node
        if depth >= self.cfg.max_depth:
            node.stop = Stop.DEPTH
            return node
        if self.node_count >= self.cfg.max_nodes:
            node.stop = Stop.NODE_LIMIT
            return node
        best = self.best_split(constraints, m.unified_error)
        if best is None:
            node.stop = Stop.NO_GAIN
            return node
        p, i, g, c_neg, c_pos = best
        node.split = (p, i, g)
        node.children = (
            self.grow(c_neg, depth + 1, path + (f"!{p}@{i}",)),
            self.grow(c_pos, depth + 1, path + (f"{p}@{i}",)),
        )
        return node


def mine(truths: Sequence[TruthSet], cfg: MinerConfig, predicates: Optional[Sequence[str]] = None) -> MiningResult:
    """Grow the decision tree and collect the properties of its pure nodes."""
    truths = list(truths)
    if predicates is None:
        predicates = truths[0].names if truths else []
    miner = Miner(truths, predicates, cfg)
    tree = miner.grow()
    nodes = [n for n in tree.walk() if n.prop is not None]
    return MiningResult(tree, [n.prop for n in nodes], nodes)
