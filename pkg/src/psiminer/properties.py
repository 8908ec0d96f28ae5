"""Turn pure tree nodes into PSI-L properties and rank properties on traces.

Delay tightening works per adjacent pair of nonempty buckets. For every
participating interval ``p`` of the earlier bucket we look at where its
forward image ``p + [0:gap*k]`` meets the later bucket (or the consequent),
take the Minkowski difference of that hit with ``p``, clip it to the template
bound and widen everything observed into one delay interval.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .intervals import (
    Interval, IntervalSet, clamp, delay, intersect, interval_diff, length, make,
    minkowski_diff, minkowski_sum, overlap_length, union_all, widen,
)
from .psil import Literal, PsiProperty, SequenceExpr, Term, backward_sets, bucket_truth, influence_set
from .trace import TruthSet

Buckets = Mapping[int, Term]


def template_delays(indices: Sequence[int], k: float) -> list[Interval]:
    """Merged template delays between consecutive nonempty buckets (indices descending)."""
    return [delay(0.0, (j - l) * k) for j, l in zip(indices, indices[1:])]


def participating_intervals(buckets: Buckets, truth: TruthSet, k: float) -> dict[int, IntervalSet]:
    """For each nonempty bucket, the parts of its truth that take part in some match."""
    indices = sorted((i for i, t in buckets.items() if t), reverse=True)
    truths = [bucket_truth(buckets[i], truth) for i in indices]
    parts = backward_sets(truths, template_delays(indices, k))
    return dict(zip(indices, parts))


def separations(src: IntervalSet, dst: IntervalSet, bound: float) -> list[Interval]:
    """Observed separations from ``src`` pieces to the ``dst`` pieces they reach within ``bound``."""
    out = []
    window = delay(0.0, bound)
    his = [q.hi for q in dst]
    for p in src:
        image = make(p.lo, p.hi + bound, p.lo_closed, p.hi_closed)
        # skip dst pieces that end before p starts
        start = bisect.bisect_left(his, p.lo - 1e-9 * max(1.0, abs(p.lo)))
        for q in dst.intervals[start:]:
            if q.lo > image.hi:
                break
            hit = intersect(IntervalSet((image,), _normalized=True), IntervalSet((q,), _normalized=True))
            if not hit:
                continue
            sep = intersect(IntervalSet((interval_diff(hit[0], p),), _normalized=True),
                            IntervalSet((window,), _normalized=True))
            out.extend(sep)
    return out


@dataclass(frozen=True)
class TightenedDelays:
    between: dict   # (j, l) -> Interval
    consequent: Optional[Interval]


def tighten(participating: Sequence[Mapping[int, IntervalSet]], targets: Sequence[IntervalSet],
            k: float) -> TightenedDelays:
    """Tight delays from participating sets and consequent truth, pooled over traces.

    When nothing is observed for a pair the template bound ``[0 : gap*k]`` is kept.
    """
    indices = sorted(participating[0], reverse=True)
    between = {}
    for j, l in zip(indices, indices[1:]):
        bound = (j - l) * k
        seen = []
        for part in participating:
            seen.extend(separations(part[j], part[l], bound))
        between[(j, l)] = widen(seen) if seen else delay(0.0, bound)
    consequent = None
    b = indices[-1]
    if b > 0:
        bound = b * k
        seen = []
        for part, target in zip(participating, targets):
            seen.extend(separations(part[b], target, bound))
        consequent = widen(seen) if seen else delay(0.0, bound)
    return TightenedDelays(between, consequent)


def emit_property(buckets: Buckets, delays: TightenedDelays, verdict: Literal,
                  support: Optional[float] = None, correlation: Optional[float] = None) -> PsiProperty:
    indices = sorted((i for i, t in buckets.items() if t), reverse=True)
    terms = tuple(tuple(buckets[i]) for i in indices)
    seq_delays = tuple(delays.between[(j, l)] for j, l in zip(indices, indices[1:]))
    return PsiProperty(SequenceExpr(terms, seq_delays), verdict, delays.consequent, support, correlation)


def build_property(buckets: Buckets, truths: Sequence[TruthSet], verdict: Literal, k: float) -> PsiProperty:
    """Tighten the template of a pure node and return the ranked property."""
    if not any(buckets.values()):
        return with_metrics(PsiProperty(SequenceExpr(((),), ()), verdict), truths)
    parts = [participating_intervals(buckets, t, k) for t in truths]
    targets = [t.literal(verdict.name, verdict.negated) for t in truths]
    prop = emit_property(buckets, tighten(parts, targets, k), verdict)
    return with_metrics(prop, truths)


def with_metrics(prop: PsiProperty, truths: Sequence[TruthSet]) -> PsiProperty:
    try:
        corr = correlation(prop, truths)
    except ValueError:
        corr = 0.0
    return PsiProperty(prop.antecedent, prop.consequent, prop.consequent_delay, support(prop, truths), corr)


# ---------------------------------------------------------------------------
# Ranking

def support_pct(influence_length: float, trace_length: float) -> float:
    return 100.0 * influence_length / trace_length if trace_length > 0 else 0.0


def correlation_pct(influence: IntervalSet, stretched_target: IntervalSet, horizon: float) -> float:
    return _ratio_pct([(_reached(influence, stretched_target, horizon), length(stretched_target))])


def _reached(influence: IntervalSet, stretched_target: IntervalSet, horizon: float) -> float:
    return overlap_length(minkowski_sum(influence, delay(0.0, horizon)), stretched_target)


def _ratio_pct(pairs) -> float:
    den = sum(d for _, d in pairs)
    if den <= 0:
        raise ValueError("correlation undefined: consequent never holds")
    return 100.0 * sum(n for n, _ in pairs) / den


def _stretched_consequent(prop: PsiProperty, truth: TruthSet) -> IntervalSet:
    target = truth.literal(prop.consequent.name, prop.consequent.negated)
    return clamp(minkowski_diff(target, delay(0.0, prop.horizon)), truth.span)


def support(prop: PsiProperty, truths: Sequence[TruthSet]) -> float:
    num = sum(length(influence_set(prop.antecedent, t)) for t in truths)
    return support_pct(num, sum(t.duration for t in truths))


def correlation(prop: PsiProperty, truths: Sequence[TruthSet]) -> float:
    """Share of the stretched consequent truth reached by antecedent matches.

    The stretch is the upper bound of the property's consequent delay.
    """
    pairs = []
    for t in truths:
        target = _stretched_consequent(prop, t)
        pairs.append((_reached(influence_set(prop.antecedent, t), target, prop.horizon), length(target)))
    return _ratio_pct(pairs)


def coverage_sets(props: Sequence[PsiProperty], truth: TruthSet) -> IntervalSet:
    return union_all(
        intersect(minkowski_sum(influence_set(p.antecedent, truth), delay(0.0, p.horizon)),
                  _stretched_consequent(p, truth))
        for p in props
    )


def coverage(props: Sequence[PsiProperty], truths: Sequence[TruthSet]) -> float:
    num = sum(length(coverage_sets(props, t)) for t in truths)
    return support_pct(num, sum(t.duration for t in truths))
