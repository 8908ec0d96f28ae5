"""Decision metrics over interval sets: mean, error, unified error and unified gain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .intervals import IntervalSet, intersect, length, overlap_length

PURITY_TOL = 1e-9


def xlog2x(p: float) -> float:
    """``p * log2(p)`` with the convention ``0 * log2(0) = 0``."""
    return p * math.log2(p) if p > 0 else 0.0


def mean(target_set: IntervalSet, influence: IntervalSet) -> float:
    den = length(influence)
    if den <= 0:
        raise ValueError("mean undefined: influence set has zero length")
    return overlap_length(target_set, influence) / den


def multi_trace_mean(per_trace: Iterable[tuple[float, float]]) -> float:
    """Pooled ratio of summed numerators to summed denominators."""
    pairs = list(per_trace)
    den = sum(d for _, d in pairs)
    if den <= 0:
        raise ValueError("mean undefined: influence sets have zero total length")
    return sum(n for n, _ in pairs) / den


def error(mean_pos: float, mean_neg: float) -> float:
    return -xlog2x(mean_pos) - xlog2x(mean_neg)


def unified_error_from_means(mean_pos: float, mean_neg: float, mean_overlap: float) -> float:
    return error(mean_pos, mean_neg) + xlog2x(mean_overlap)


def unified_error(target: IntervalSet, neg_target: IntervalSet, influence: IntervalSet) -> float:
    return unified_error_from_means(
        mean(target, influence),
        mean(neg_target, influence),
        mean(intersect(target, neg_target), influence),
    )


def alpha(len_pos_child: float, len_neg_child: float) -> float:
    total = len_pos_child + len_neg_child
    if total <= 0:
        raise ValueError("degenerate split: both children have zero-length influence")
    return len_pos_child / total


def unified_gain(parent_ue: float, child_pos_ue: float, child_neg_ue: float, a: float) -> float:
    return parent_ue - a * child_pos_ue - (1.0 - a) * child_neg_ue


@dataclass(frozen=True)
class Means:
    """Pooled means of a target side, its negation and their overlap over an influence set."""

    pos: float
    neg: float
    overlap: float
    length: float

    @property
    def error(self) -> float:
        return error(self.pos, self.neg)

    @property
    def unified_error(self) -> float:
        return unified_error_from_means(self.pos, self.neg, self.overlap)

    @property
    def pure_pos(self) -> bool:
        return self.pos >= 1.0 - PURITY_TOL

    @property
    def pure_neg(self) -> bool:
        return self.neg >= 1.0 - PURITY_TOL

    @property
    def pure(self) -> bool:
        return self.pure_pos or self.pure_neg


def pooled_means(influences: Sequence[IntervalSet], pos_sets: Sequence[IntervalSet],
                 neg_sets: Sequence[IntervalSet], overlap_sets: Sequence[IntervalSet]) -> Means:
    """Means over several traces; returns zeros when the influence is empty everywhere."""
    den = num_pos = num_neg = num_ovl = 0.0
    for infl, p, q, o in zip(influences, pos_sets, neg_sets, overlap_sets):
        if not infl:
            continue
        den += length(infl)
        num_pos += overlap_length(p, infl)
        num_neg += overlap_length(q, infl)
        if o:
            num_ovl += overlap_length(o, infl)
    if den <= 0:
        return Means(0.0, 0.0, 0.0, 0.0)
    return Means(num_pos / den, num_neg / den, num_ovl / den, den)


@dataclass(frozen=True)
class NodeMetrics:
    mean: float
    error: float
    unified_error: float
    support_pct: float
    correlation_pct: float
    pseudo_index: int
    mean_neg: float = 0.0
    influence_length: float = 0.0
