"""Pseudo-targets: the target's truth stretched back in time by multiples of k."""

from __future__ import annotations

from dataclasses import dataclass

from .intervals import IntervalSet, clamp, delay, intersect, minkowski_diff
from .trace import TruthSet


@dataclass(frozen=True)
class PseudoTargetBank:
    """``pos[i]`` and ``neg[i]`` hold the target and its negation stretched by ``[0 : i*k]``."""

    k: float
    n: int
    pos: tuple
    neg: tuple

    def overlap(self, i: int) -> IntervalSet:
        if not 0 <= i <= self.n:
            raise IndexError(f"pseudo-target index {i} outside 0..{self.n}")
        return intersect(self.pos[i], self.neg[i])

    def side(self, i: int, negated: bool) -> IntervalSet:
        return self.neg[i] if negated else self.pos[i]


def stretch(target: IntervalSet, i: int, k: float, truth: TruthSet) -> IntervalSet:
    return clamp(minkowski_diff(target, delay(0.0, i * k)), truth.span)


def build_pseudo_targets(truth: TruthSet, target: str, n: int, k: float) -> PseudoTargetBank:
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    pos0 = truth.literal(target)
    neg0 = truth.literal(target, negated=True)
    pos = tuple(stretch(pos0, i, k, truth) for i in range(n + 1))
    neg = tuple(stretch(neg0, i, k, truth) for i in range(n + 1))
    return PseudoTargetBank(k, n, pos, neg)
