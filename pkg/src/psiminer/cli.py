"""Command-line front end: ``mine``, ``check``, ``rank`` and ``gen``.

Exit codes: 0 on success, 1 for usage or configuration errors, 2 for bad trace data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional, Sequence

from .generate import SCENARIOS
from .intervals import length
from .miner import MinerConfig, mine
from .properties import correlation, coverage, support
from .psil import PsiProperty, PsilSyntaxError, counterexamples, influence_set, literals, match_ends, parse_psil_file
from .trace import Predicate, PredicateError, TraceError, TruthSet, booleanize, load_trace

CONFIG_KEYS = {"time_column", "predicates", "target", "n", "k", "max_depth", "min_support", "min_correlation"}


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    return cfg


def predicates_from(cfg: dict) -> list[Predicate]:
    raw = cfg.get("predicates") or []
    if not raw:
        raise ConfigError("no predicates: the config must list at least one predicate")
    out = []
    for j, p in enumerate(raw):
        if not isinstance(p, dict) or "name" not in p or "expr" not in p:
            raise ConfigError(f"predicate #{j + 1} must be an object with 'name' and 'expr'")
        out.append(Predicate(str(p["name"]), str(p["expr"])))
    return out


def load_truths(paths: Sequence[str], cfg: dict, alphabet: Sequence[Predicate]) -> list[TruthSet]:
    if not paths:
        raise ConfigError("at least one --trace is required")
    time_col = cfg.get("time_column", "time")
    truths = []
    for path in paths:
        try:
            trace = load_trace(path, time_col)
        except OSError as e:
            raise TraceError(f"cannot read trace {path}: {e.strerror}") from None
        except TraceError as e:
            raise TraceError(f"{path}: {e}") from None
        truths.append(booleanize(trace, alphabet))
    return truths


def miner_config(cfg: dict, args) -> MinerConfig:
    def pick(flag, key, default=None):
        v = getattr(args, flag, None)
        return v if v is not None else cfg.get(key, default)

    target = pick("target", "target")
    if not target:
        raise ConfigError("no target: set 'target' in the config or pass --target")
    n, k = pick("n", "n"), pick("k", "k")
    if n is None or k is None:
        raise ConfigError("both n and k are required (config keys 'n', 'k' or flags -n, -k)")
    try:
        return MinerConfig(
            target=str(target), n=int(n), k=float(k),
            max_depth=int(pick("max_depth", "max_depth", 20)),
            min_support=float(pick("min_support", "min_support", 0.0)),
            min_correlation=float(pick("min_correlation", "min_correlation", 0.0)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


def pct(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.2f}%"


def _write_json(path: Optional[str], payload: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=False)
            fh.write("\n")


# ---------------------------------------------------------------------------

def cmd_mine(args) -> int:
    t0 = time.perf_counter()
    cfg = load_config(args.config)
    alphabet = predicates_from(cfg)
    mcfg = miner_config(cfg, args)
    if mcfg.target not in {p.name for p in alphabet}:
        raise ConfigError(f"target {mcfg.target!r} is not among the predicates {[p.name for p in alphabet]}")
    truths = load_truths(args.trace, cfg, alphabet)
    t1 = time.perf_counter()
    result = mine(truths, mcfg, [p.name for p in alphabet])
    t2 = time.perf_counter()

    rows = []
    for node, prop in zip(result.pure_nodes, result.properties):
        rows.append({
            "psil": str(prop),
            "support_pct": prop.support,
            "correlation_pct": prop.correlation,
            "verdict": str(prop.consequent),
            "path": list(node.path),
            "end_matches": [influence_set(prop.antecedent, t).to_json() for t in truths],
        })
    rows.sort(key=lambda r: (-round(r["correlation_pct"], 9), -round(r["support_pct"], 9), r["psil"]))
    cov = coverage(result.properties, truths) if result.properties else 0.0
    summary = result.summary()
    timings = {"input_processing_ms": 1000 * (t1 - t0), "tree_generation_ms": 1000 * (t2 - t1)}

    if args.quiet:
        out = "".join(r["psil"] + "\n" for r in rows)
    else:
        lines = [
            f"traces: {len(truths)} ({', '.join(t.name for t in truths)})",
            f"target: {mcfg.target}  n={mcfg.n}  k={mcfg.k:g}  max_depth={mcfg.max_depth}  "
            f"min_support={mcfg.min_support:g}%  min_correlation={mcfg.min_correlation:g}%",
            f"properties: {len(rows)}",
        ]
        for j, r in enumerate(rows, start=1):
            lines.append(f"  [{j}] {r['psil']}")
            lines.append(f"      support {pct(r['support_pct'])}  correlation {pct(r['correlation_pct'])}  "
                         f"path {' -> '.join(r['path']) or '(root)'}")
        lines.append(f"coverage: {pct(cov)}")
        stops = ", ".join(f"{k}={v}" for k, v in summary["stops"].items())
        lines.append(f"tree: {summary['nodes']} nodes, depth {summary['depth']}, stops {stops}")
        lines.append("# timings")
        lines.append(f"input processing: {timings['input_processing_ms']:.1f} ms")
        lines.append(f"tree generation: {timings['tree_generation_ms']:.1f} ms")
        out = "\n".join(lines) + "\n"
    sys.stdout.write(out)
    _write_json(args.json, {
        "target": mcfg.target, "n": mcfg.n, "k": mcfg.k,
        "traces": [t.name for t in truths],
        "properties": rows,
        "coverage_pct": cov,
        "tree": summary,
        "timings": timings,
    })
    return 0


def _load_properties(path: str, truths: Sequence[TruthSet]) -> list[PsiProperty]:
    try:
        with open(path, encoding="utf-8") as fh:
            props = parse_psil_file(fh.read())
    except OSError as e:
        raise ConfigError(f"cannot read properties {path}: {e.strerror}") from None
    except PsilSyntaxError as e:
        raise ConfigError(f"{path}: {e}") from None
    known = set(truths[0].names)
    for p in props:
        for lit in literals(p):
            if lit.name not in known:
                raise ConfigError(f"property '{p}' uses unknown predicate {lit.name!r}")
    return props


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    alphabet = predicates_from(cfg)
    truths = load_truths(args.trace, cfg, alphabet)
    props = _load_properties(args.properties, truths)
    rows = []
    for p in props:
        ends = [influence_set(p.antecedent, t) for t in truths]
        hits = [match_ends(p, t) for t in truths]
        cex = [counterexamples(p, t) for t in truths]
        cex_len = sum(length(c) for c in cex)
        if not any(e for e in ends):
            status = "vacuous: no antecedent match"
        elif cex_len > 1e-9:
            status = "violated"
        else:
            status = "holds"
        rows.append({
            "psil": str(p),
            "status": status,
            "antecedent_match_length": sum(length(e) for e in ends),
            "match_end_length": sum(length(h) for h in hits),
            "counterexample_length": cex_len,
            "counterexamples": [c.to_json() for c in cex],
        })
    if not args.quiet:
        for r in rows:
            sys.stdout.write(f"{r['status']:<8} match-ends {r['match_end_length']:.6g}  "
                             f"counterexamples {r['counterexample_length']:.6g}  {r['psil']}\n")
    _write_json(args.json, {"traces": [t.name for t in truths], "properties": rows})
    return 0


def cmd_rank(args) -> int:
    cfg = load_config(args.config)
    alphabet = predicates_from(cfg)
    truths = load_truths(args.trace, cfg, alphabet)
    props = _load_properties(args.properties, truths)
    rows = []
    for p in props:
        try:
            corr = correlation(p, truths)
        except ValueError:
            corr = None
        rows.append({"psil": str(p), "support_pct": support(p, truths), "correlation_pct": corr})
    rows.sort(key=lambda r: (-(r["correlation_pct"] or 0.0), -r["support_pct"], r["psil"]))
    cov = coverage(props, truths) if props else 0.0
    if not args.quiet:
        for r in rows:
            sys.stdout.write(f"support {pct(r['support_pct'])}  correlation {pct(r['correlation_pct'])}  {r['psil']}\n")
        sys.stdout.write(f"coverage: {pct(cov)}\n")
    _write_json(args.json, {"properties": rows, "coverage_pct": cov})
    return 0


def cmd_gen(args) -> int:
    files, config = SCENARIOS[args.scenario](args.seed)
    os.makedirs(args.out, exist_ok=True)
    for name, text in files:
        with open(os.path.join(args.out, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    with open(os.path.join(args.out, "config.json"), "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
        fh.write("\n")
    if not args.quiet:
        sys.stdout.write(f"wrote {len(files)} trace(s) and config.json to {args.out}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="psiminer", description="Mine and check prefix-sequence properties of traces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, properties=False):
        p.add_argument("--trace", action="append", default=[], metavar="CSV", help="trace file (repeatable)")
        p.add_argument("--config", metavar="JSON", help="predicates and mining parameters")
        if properties:
            p.add_argument("--properties", required=True, metavar="FILE", help="PSI-L file, one property per line")
        p.add_argument("--json", metavar="PATH", help="also write a JSON report")
        p.add_argument("--quiet", action="store_true", help="minimal output")

    m = sub.add_parser("mine", help="mine properties for a target")
    common(m)
    m.add_argument("--target")
    m.add_argument("-n", type=int, help="number of buckets minus one")
    m.add_argument("-k", type=float, help="delay resolution, in trace time units")
    m.add_argument("--max-depth", dest="max_depth", type=int)
    m.add_argument("--min-support", dest="min_support", type=float, help="percent")
    m.add_argument("--min-correlation", dest="min_correlation", type=float, help="percent")
    m.set_defaults(func=cmd_mine)

    c = sub.add_parser("check", help="check properties against traces")
    common(c, properties=True)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("rank", help="support, correlation and coverage of properties")
    common(r, properties=True)
    r.set_defaults(func=cmd_rank)

    g = sub.add_parser("gen", help="write synthetic traces and a config")
    g.add_argument("--scenario", required=True, choices=sorted(SCENARIOS))
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--out", required=True)
    g.add_argument("--quiet", action="store_true")
    g.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PredicateError) as e:
        sys.stderr.write(f"psiminer: error: {e}\n")
        return 1
    except TraceError as e:
        sys.stderr.write(f"psiminer: data error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
