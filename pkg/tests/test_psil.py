import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psiminer.intervals import (
    Interval, IntervalSet, closed, closedopen, delay, intersect, length, parse_intervals,
)
from psiminer.psil import (
    Literal, PsiProperty, PsilSyntaxError, SequenceExpr, backward_influence, backward_sets,
    counterexamples, end_matches, forward_influence, influence_set, match_ends, parse_psil,
    parse_psil_file,
)
from psiminer.trace import TruthSet

import oracles

P = parse_intervals
B2, B1, B0 = P("{[2:4]}"), P("{[3:5],[7:9]}"), P("{[4:9],[12:19]}")
D21, D10 = delay(1, 4), delay(2, 8)


# -- worked examples ----------------------------------------------------------

def test_example_end_matches_per_workset():
    ends = end_matches([B2, B1, B0], [D21, D10])
    assert sorted(str(e) for e in ends) == ["[12:13]", "[12:16]", "[5:9]", "[9:9]"]


def test_example_end_match_set_is_normalized():
    ts = TruthSet.from_sets(closedopen(0, 20), {"a": B2, "b": B1, "c": B0})
    seq = SequenceExpr(((Literal("a"),), (Literal("b"),), (Literal("c"),)), (D21, D10))
    infl = influence_set(seq, ts)
    assert str(infl) == "{[5:9],[12:16]}"
    # the per-work-set lengths sum to 9; the normalized set measures 8
    assert sum(e.length for e in end_matches([B2, B1, B0], [D21, D10])) == 9
    assert length(infl) == 8


def test_example_backward_participation():
    ws = [closed(2, 4), closed(3, 5), closed(12, 19)]
    assert backward_influence([D21, D10], ws, 1) == closed(4, 5)
    assert backward_influence([D21, D10], ws, 0) == closed(12, 13)
    parts = backward_sets([B2, B1, B0], [D21, D10])
    assert str(parts[1]) == "{[3:5],[7:8]}"


def test_forward_influence_none_when_work_set_dies():
    assert forward_influence([D21, D10], [closed(2, 4), closed(7, 9), closed(4, 9)]) == closed(9, 9)
    assert forward_influence([D21, D10], [closed(2, 4), closed(3, 5), closed(0, 4)]) is None


# -- syntax -------------------------------------------------------------------

@pytest.mark.parametrize("text", [
    "s3 ##[0.1:0.4] s2 |-> ##[0:0.7] E",
    "a && !b ##[0:2] c |-> !E",
    "true |-> E",
    "x ##[0:1] true ##[1:2] y |-> ##[0:3] !z",
    "D |-> ##[27.05:27.96] A",
])
def test_round_trip(text):
    assert str(parse_psil(text)) == text


@pytest.mark.parametrize("text, col", [
    ("a ##[2:1] b |-> E", 3),
    ("a ##[-1:1] b |-> E", 3),
    ("a ##[0:1 b |-> E", 10),
    ("a b |-> E", 3),
    ("a |-> E extra", 9),
    ("a |->", 6),
    ("a $ b", 3),
])
def test_syntax_errors_carry_positions(text, col):
    with pytest.raises(PsilSyntaxError) as exc:
        parse_psil(text)
    assert exc.value.col == col and exc.value.line == 1


def test_property_file_comments():
    text = "# mined\n\na ##[0:1] b |-> E   # inline\n  # indented comment\n!a |-> ##[0:2] !E\n"
    props = parse_psil_file(text)
    assert [str(p) for p in props] == ["a ##[0:1] b |-> E", "!a |-> ##[0:2] !E"]
    with pytest.raises(PsilSyntaxError) as exc:
        parse_psil_file("a |-> E\nb ##[0:x] c |-> E\n")
    assert exc.value.line == 2


def test_sequence_shape_checks():
    with pytest.raises(ValueError):
        SequenceExpr(((Literal("a"),), (Literal("b"),)), ())
    with pytest.raises(ValueError):
        SequenceExpr(((), ()), (delay(0, 1),))


names = st.sampled_from(["a", "b", "c", "sig_1", "x-y"])
literals = st.builds(Literal, names, st.booleans())
terms = st.lists(literals, min_size=1, max_size=3, unique_by=lambda l: l.name).map(tuple)
delays = st.tuples(st.integers(0, 40), st.integers(0, 40)).map(lambda t: delay(min(t) / 8, max(t) / 8))


@st.composite
def properties(draw):
    ts = draw(st.lists(terms, min_size=1, max_size=4))
    ds = draw(st.lists(delays, min_size=len(ts) - 1, max_size=len(ts) - 1))
    cd = draw(st.one_of(st.none(), delays))
    return PsiProperty(SequenceExpr(tuple(ts), tuple(ds)), draw(literals), cd)


@settings(max_examples=200, deadline=None)
@given(properties())
def test_parse_of_print_is_identity(prop):
    assert parse_psil(str(prop)) == prop


# -- semantics against brute force -------------------------------------------

@st.composite
def stage_sets(draw, span=20, max_stages=3):
    """Half-open truth sets with integer endpoints, one per stage."""
    k = draw(st.integers(1, max_stages))
    stages = []
    for _ in range(k):
        cuts = sorted(draw(st.sets(st.integers(0, span), min_size=0, max_size=8)))
        if len(cuts) % 2:
            cuts = cuts[:-1]
        stages.append([(cuts[j], cuts[j + 1], True, False) for j in range(0, len(cuts), 2)])
    ds = [tuple(sorted(draw(st.tuples(st.integers(0, 5), st.integers(0, 5))))) for _ in range(k - 1)]
    return stages, ds


def to_set(raw):
    return IntervalSet(Interval(float(a), float(b), lc, hc) for a, b, lc, hc in raw)


def truth_of(stages, span=20):
    return TruthSet.from_sets(closedopen(0, span), {f"p{j}": to_set(s) for j, s in enumerate(stages)})


def seq_of(stages, ds):
    return SequenceExpr(tuple((Literal(f"p{j}"),) for j in range(len(stages))), tuple(delay(*d) for d in ds))


@settings(max_examples=150, deadline=None)
@given(stage_sets())
def test_influence_matches_grid_enumeration(case):
    stages, ds = case
    infl = influence_set(seq_of(stages, ds), truth_of(stages))
    grid = oracles.grid_forward(stages, ds, 20)[-1]
    for t, hit in zip(oracles.grid_times(20), grid):
        assert infl.contains(t) == bool(hit), t


@settings(max_examples=150, deadline=None)
@given(stage_sets())
def test_set_wise_influence_equals_work_set_union(case):
    stages, ds = case
    sets = [to_set(s) for s in stages]
    delays_ = [delay(*d) for d in ds]
    per_ws = IntervalSet(end_matches(sets, delays_))
    assert per_ws == influence_set(seq_of(stages, ds), truth_of(stages))
    oracle = IntervalSet(Interval(*iv) for iv in oracles.workset_ends(stages, ds))
    assert per_ws == oracle


@settings(max_examples=150, deadline=None)
@given(stage_sets())
def test_participation_matches_oracles(case):
    stages, ds = case
    sets = [to_set(s) for s in stages]
    parts = backward_sets(sets, [delay(*d) for d in ds])
    by_ws = oracles.workset_participation(stages, ds)
    grid = oracles.grid_participation(stages, ds, 20)
    for p, part in enumerate(parts):
        assert part == IntervalSet(Interval(*iv) for iv in by_ws[p])
        assert intersect(part, sets[p]) == part
        for t, hit in zip(oracles.grid_times(20), grid[p]):
            assert part.contains(t) == bool(hit)


@settings(max_examples=100, deadline=None)
@given(stage_sets(), st.integers(0, 3))
def test_backward_influence_stays_inside_chosen_interval(case, i):
    stages, ds = case
    sets = [to_set(s) for s in stages]
    if any(not s for s in sets):
        return
    i = min(i, len(sets) - 1)
    for ws in itertools.product(*[s.intervals for s in sets]):
        piece = backward_influence([delay(*d) for d in ds], ws, i)
        if piece is not None:
            chosen = ws[len(ws) - 1 - i]
            assert intersect(IntervalSet.of(piece), IntervalSet.of(chosen)) == IntervalSet.of(piece)


@settings(max_examples=100, deadline=None)
@given(stage_sets(), st.integers(0, 3))
def test_widening_a_delay_never_shrinks_influence(case, extra):
    stages, ds = case
    if not ds:
        return
    ts = truth_of(stages)
    wide = [(lo, hi + extra) for lo, hi in ds]
    narrow = influence_set(seq_of(stages, ds), ts)
    widened = influence_set(seq_of(stages, wide), ts)
    assert intersect(narrow, widened) == narrow


# -- empty terms, match ends and counterexamples ------------------------------

SPAN = closedopen(0, 20)


def test_empty_middle_term_merges_delays():
    ts = TruthSet.from_sets(SPAN, {"a": P("{[2:3)}"), "b": P("{[6:7)}")})
    with_gap = parse_psil("a ##[0:2] true ##[1:2] b |-> E".replace("E", "a")).antecedent
    merged = parse_psil("a ##[1:4] b |-> a").antecedent
    assert influence_set(with_gap, ts) == influence_set(merged, ts) == P("{[6:7)}")


def test_trailing_and_leading_empty_terms():
    ts = TruthSet.from_sets(SPAN, {"a": P("{[2:3),[18:19)}")})
    trailing = SequenceExpr(((Literal("a"),), ()), (delay(0, 2),))
    assert influence_set(trailing, ts) == P("{[2:5),[18:20)}")
    leading = SequenceExpr(((), (Literal("a"),)), (delay(0, 2),))
    assert influence_set(leading, ts) == P("{[2:3),[18:19)}")
    assert influence_set(SequenceExpr(((),), ()), ts) == IntervalSet.of(SPAN)


def test_match_ends_and_counterexamples():
    ts = TruthSet.from_sets(SPAN, {"a": P("{[2:3),[10:11)}"), "E": P("{[3:6)}")})
    prop = parse_psil("a |-> ##[0:2] E")
    assert match_ends(prop, ts) == P("{[3:5)}")
    assert counterexamples(prop, ts) == P("{[10:11)}")
    holds = parse_psil("a |-> ##[0:2] !E")
    assert counterexamples(holds, ts) == P("{}")
