"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line; the lines are
repeated in the pytest terminal summary. Run directly with
``python tests/test_acceptance.py`` to get just the lines.
"""

import json
import math
import os
import random
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import oracles  # noqa: E402
from psiminer.cli import main  # noqa: E402
from psiminer.generate import routes  # noqa: E402
from psiminer.intervals import (  # noqa: E402
    Interval, IntervalSet, closed, closedopen, delay, length, parse_intervals,
)
from psiminer.metrics import error, mean, unified_error  # noqa: E402
from psiminer.miner import Miner, MinerConfig, mine  # noqa: E402
from psiminer.properties import coverage, correlation, emit_property, support, tighten  # noqa: E402
from psiminer.pseudo import build_pseudo_targets  # noqa: E402
from psiminer.psil import (  # noqa: E402
    Literal, SequenceExpr, backward_influence, end_matches, influence_set, parse_psil,
)
from psiminer.trace import Predicate, TruthSet, booleanize, load_trace  # noqa: E402

P = parse_intervals
RESULTS: dict[int, str] = {}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_forward_influence():
    stages = [P("{[2:4]}"), P("{[3:5],[7:9]}"), P("{[4:9],[12:19]}")]
    delays = [delay(1, 4), delay(2, 8)]
    best = math.inf
    for _ in range(20):
        t0 = time.perf_counter()
        ends = end_matches(stages, delays)
        best = min(best, time.perf_counter() - t0)
    expected = [closed(5, 9), closed(9, 9), closed(12, 13), closed(12, 16)]
    got = sorted(ends, key=lambda iv: (iv.lo, iv.hi))
    exact = len(got) == 4 and all(a.approx_eq(b) for a, b in zip(got, sorted(expected, key=lambda iv: (iv.lo, iv.hi))))
    report(1, exact and best < 0.010, f"end-matches {[str(e) for e in got]}, {1000 * best:.3f} ms")


# -- 2 ------------------------------------------------------------------------

def test_criterion_2_backward_influence():
    ws = [closed(2, 4), closed(3, 5), closed(12, 19)]
    got = backward_influence([delay(1, 4), delay(2, 8)], ws, 1)
    report(2, got is not None and got.approx_eq(closed(4, 5)), f"participation at bucket 1 = {got}")


# -- 3 ------------------------------------------------------------------------

def test_criterion_3_pseudo_targets():
    ts = TruthSet.from_sets(closedopen(0, 20), {"E": P("{[5:8.3),[11.8:13),[18:20)}")})
    bank = build_pseudo_targets(ts, "E", 2, 0.4)
    ok = (bank.pos[2] == P("{[4.2:8.3),[11:13),[17.2:20)}")
          and bank.neg[2] == P("{[0:5),[7.5:11.8),[12.2:18)}"))
    report(3, ok, f"E2 = {bank.pos[2]}, !E2 = {bank.neg[2]}")


# -- 4 ------------------------------------------------------------------------

def test_criterion_4_unified_error():
    # E^2, !E^2 and the influence set whose means are 3.5/3.5 and 1.1/3.5
    e2, ne2, infl = P("{[4.3:9.8)}"), P("{[4.3:4.6),[6.6:7.4)}"), P("{[4.3:4.6),[6.6:9.8)}")
    eps = error(mean(e2, infl), mean(ne2, infl))
    ue = unified_error(e2, ne2, infl)
    ok = abs(eps - 0.5238) <= 5e-4 and abs(ue) <= 1e-9
    report(4, ok, f"means {mean(e2, infl):.4f}/{mean(ne2, infl):.4f}, error {eps:.4f} (want 0.5238 +- 5e-4), "
                  f"UE {ue:.2e}")


# -- 5 ------------------------------------------------------------------------

def test_criterion_5_sibling_overlap():
    ts = TruthSet.from_sets(closedopen(0, 20), {
        "Q": P("{[3.9:4.2),[6.3:9.6)}"),
        "P": P("{[4.3:6),[6.6:9.8),[13.2:14),[17.3:20)}"),
        "E": P("{[5:8.3),[11.8:13),[18:20)}"),
    })
    miner = Miner([ts], ["Q", "P", "E"], MinerConfig("E", 3, 0.4))
    parent = frozenset({(Literal("P"), 2)})
    f0 = miner.influence(parent | {(Literal("Q", True), 3)})[0]
    f1 = miner.influence(parent | {(Literal("Q"), 3)})[0]
    naive = (length(f0) + length(f1)) / length(miner.influence(parent)[0])
    ok = (f0 == P("{[4.3:6),[6.6:6.7),[9.6:9.8),[13.2:14),[17.3:20)}")
          and f1 == P("{[4.3:4.6),[6.6:9.8)}") and naive > 1)
    report(5, ok, f"F(C0) = {f0}, F(C1) = {f1}, naive weight sum {naive:.4f}")


# -- 6 ------------------------------------------------------------------------

def test_criterion_6_delay_tightening():
    parts = [{2: P("{[4.3:4.6),[6.6:9.8)}"), 3: P("{[3.9:4.2),[6.3:6.4)}")}]
    td = tighten(parts, [P("{[4.6:5),[6.6:6.9),[13:18)}")], 0.4)
    text = str(emit_property({3: (Literal("s3"),), 2: (Literal("s2"),)}, td, Literal("E")))
    report(6, text == "s3 ##[0.1:0.4] s2 |-> ##[0:0.7] E", repr(text))


# -- 7 ------------------------------------------------------------------------

def test_criterion_7_ranking():
    ts = TruthSet.from_sets(closedopen(0, 20), {"S": P("{[4.3:4.6),[6.6:9.8)}"),
                                                "E": P("{[0:5),[7.2:11.8),[13:18)}")})
    prop = parse_psil("S |-> ##[0:0.8] E")
    s, c, v = support(prop, [ts]), correlation(prop, [ts]), coverage([prop], [ts])
    ok = abs(s - 17.50) <= 0.01 and abs(c - 29.01) <= 0.01 and abs(v - 23.50) <= 0.01
    report(7, ok, f"support {s:.2f}%, correlation {c:.2f}%, coverage {v:.2f}%")


# -- 8 ------------------------------------------------------------------------

def _route_truths(tmp, files, cfg):
    alphabet = [Predicate(p["name"], p["expr"]) for p in cfg["predicates"]]
    out = {}
    for name, text in files:
        path = tmp / name
        path.write_text(text)
        out[name] = booleanize(load_trace(str(path)), alphabet)
    return out


def test_criterion_8_route_recovery(tmp_path):
    t0 = time.perf_counter()
    files, cfg, travel = routes(1)
    truths = _route_truths(tmp_path, files, cfg)
    mcfg = MinerConfig(cfg["target"], cfg["n"], cfg["k"], cfg["max_depth"])
    k = cfg["k"]
    notes, ok = [], True
    for route in ("route1", "route2", "route3"):
        names = sorted(n for n in truths if n.startswith(route))
        res = mine([truths[n] for n in names], mcfg)
        hits = [p for p in res.properties if str(p.antecedent) == "D" and str(p.consequent) == "A"]
        lo, hi = min(travel[n] for n in names), max(travel[n] for n in names)
        good = (len(hits) == 1 and hits[0].consequent_delay is not None
                and abs(hits[0].correlation - 100) <= 1e-6
                and abs(hits[0].consequent_delay.lo - lo) <= k and abs(hits[0].consequent_delay.hi - hi) <= k)
        ok &= good
        notes.append(f"{route}: {hits[0] if hits else 'none'} (travel {lo:.2f}..{hi:.2f})")
    res = mine(list(truths.values()), mcfg)
    hits = [p for p in res.properties if str(p.antecedent) == "D" and str(p.consequent) == "A"]
    lo, hi = min(travel.values()), max(travel.values())
    good = (len(hits) == 1 and abs(hits[0].consequent_delay.lo - lo) <= k
            and abs(hits[0].consequent_delay.hi - hi) <= k)
    ok &= good
    notes.append(f"joint: {hits[0] if hits else 'none'} (travel {lo:.2f}..{hi:.2f})")
    elapsed = time.perf_counter() - t0
    report(8, ok and elapsed < 5.0, "; ".join(notes) + f"; {elapsed:.2f} s")


# -- 9 ------------------------------------------------------------------------

def _random_stages(rng: random.Random):
    span = rng.randint(5, 50)
    n_stages = rng.randint(1, 3)
    stages = []
    for _ in range(n_stages):
        cuts = sorted(rng.sample(range(span + 1), 2 * rng.randint(0, min(4, (span + 1) // 2))))
        stages.append([(a, b, True, False) for a, b in zip(cuts[::2], cuts[1::2])])
    ds = [tuple(sorted((rng.randint(0, 6), rng.randint(0, 6)))) for _ in range(n_stages - 1)]
    return span, stages, ds


def test_criterion_9_grid_oracle():
    rng = random.Random(2024)
    mismatches = checked = 0
    for _ in range(200):
        span, stages, ds = _random_stages(rng)
        sets = {f"p{j}": IntervalSet(Interval(float(a), float(b), True, False) for a, b, _, _ in s)
                for j, s in enumerate(stages)}
        ts = TruthSet.from_sets(closedopen(0, span), sets)
        seq = SequenceExpr(tuple((Literal(f"p{j}"),) for j in range(len(stages))), tuple(delay(*d) for d in ds))
        infl = influence_set(seq, ts)
        grid = oracles.grid_forward(stages, ds, span)[-1]
        for t, hit in zip(oracles.grid_times(span), grid):
            checked += 1
            mismatches += infl.contains(t) != bool(hit)
    report(9, mismatches == 0, f"{mismatches} mismatches over {checked} grid end points in 200 instances")


# -- 10 -----------------------------------------------------------------------

def test_criterion_10_root_monotonicity():
    rng = random.Random(7)
    violations = instances = 0
    while instances < 100:
        span = rng.randint(10, 40)

        def rand_set():
            cuts = sorted(rng.sample(range(span + 1), 2 * rng.randint(1, 4)))
            return IntervalSet(closedopen(a, b) for a, b in zip(cuts[::2], cuts[1::2]))

        ts = TruthSet.from_sets(closedopen(0, span), {"P": rand_set(), "E": rand_set()})
        n, k = rng.randint(2, 8), rng.choice([0.5, 1.0, 2.0])
        miner = Miner([ts], ["P", "E"], MinerConfig("E", n, k))
        root = miner.means(frozenset()).unified_error
        gains = [miner.gain(frozenset(), "P", i, root) for i in range(n + 1)]
        violations += any(b < a - 1e-9 for a, b in zip(gains, gains[1:]))
        instances += 1
    report(10, violations == 0, f"{violations} violations in {instances} instances")


# -- 11 -----------------------------------------------------------------------

def _mine_and_check(tmp, cfg_path, traces, tag) -> tuple[int, int]:
    report_path = tmp / f"{tag}-mine.json"
    argv = ["mine", "--config", str(cfg_path), "--json", str(report_path), "--quiet"]
    for t in traces:
        argv += ["--trace", str(t)]
    assert main(argv) == 0
    rows = json.loads(report_path.read_text())["properties"]
    props = tmp / f"{tag}.psil"
    props.write_text("".join(r["psil"] + "\n" for r in rows))
    check_path = tmp / f"{tag}-check.json"
    argv = ["check", "--config", str(cfg_path), "--properties", str(props), "--json", str(check_path), "--quiet"]
    for t in traces:
        argv += ["--trace", str(t)]
    assert main(argv) == 0
    checked = json.loads(check_path.read_text())["properties"]
    bad = sum(r["counterexample_length"] > 1e-9 or r["status"] != "holds" for r in checked)
    return len(checked), bad


def test_criterion_11_purity_soundness(tmp_path, capsys):
    total = bad = 0
    for scenario in ("routes", "pulse", "traffic", "perf"):
        out = tmp_path / scenario
        assert main(["gen", "--scenario", scenario, "--out", str(out), "--quiet"]) == 0
        traces = sorted(p for p in out.glob("*.csv"))
        groups = [traces]
        if scenario == "routes":
            groups += [[t for t in traces if t.name.startswith(r)] for r in ("route1", "route2", "route3")]
        for j, group in enumerate(groups):
            n, b = _mine_and_check(tmp_path, out / "config.json", group, f"{scenario}{j}")
            total, bad = total + n, bad + b
    # the worked fixtures, written out as 0/1 traces
    fixture = tmp_path / "fixture"
    fixture.mkdir()
    times = [x / 10 for x in range(0, 201)]
    sets = {"q": P("{[3.9:4.2),[6.3:9.6)}"), "p": P("{[4.3:6),[6.6:9.8),[13.2:14),[17.3:20)}"),
            "e": P("{[5:8.3),[11.8:13),[18:20)}")}
    rows = ["time,q,p,e"] + [f"{t:g}," + ",".join(str(int(s.contains(t))) for s in sets.values()) for t in times]
    (fixture / "worked.csv").write_text("\n".join(rows) + "\n")
    (fixture / "config.json").write_text(json.dumps({
        "predicates": [{"name": n.upper(), "expr": f"{n} >= 1"} for n in sets],
        "target": "E", "n": 3, "k": 0.4,
    }))
    n, b = _mine_and_check(tmp_path, fixture / "config.json", [fixture / "worked.csv"], "fixture")
    total, bad = total + n, bad + b
    capsys.readouterr()
    report(11, bad == 0 and total > 0, f"{total} mined properties re-checked, {bad} with counterexamples")


# -- 12 -----------------------------------------------------------------------

def test_criterion_12_performance_trend(tmp_path, capsys):
    out = tmp_path / "perf"
    assert main(["gen", "--scenario", "perf", "--out", str(out), "--quiet"]) == 0

    def tree_ms(n):
        best = math.inf
        for rep in range(2):
            path = tmp_path / f"perf-{n}-{rep}.json"
            assert main(["mine", "--config", str(out / "config.json"), "--trace", str(out / "perf.csv"),
                         "-n", str(n), "--json", str(path), "--quiet"]) == 0
            best = min(best, json.loads(path.read_text())["timings"]["tree_generation_ms"])
        return best

    t10, t20 = tree_ms(10), tree_ms(20)
    capsys.readouterr()
    ratio = t20 / t10
    report(12, ratio <= 3.0, f"tree generation {t10:.0f} ms at n=10, {t20:.0f} ms at n=20, ratio {ratio:.2f} "
                             "(informational)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
