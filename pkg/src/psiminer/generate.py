"""Deterministic synthetic traces for demos and tests.

Each scenario returns a list of ``(file name, csv text)`` pairs plus a
matching mining config. Output depends only on the seed.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

ROUTE_RANGES = {
    "route1": (26.90, 28.0),
    "route2": (14.21, 16.0),
    "route3": (18.82, 20.0),
}
ROUTE_STEP = 0.01  # minutes between samples


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6g}" if abs(float(v)) < 1e5 else repr(float(v))


def routes(seed: int = 1, per_route: int = 3):
    """Vehicles leave D and arrive at A; travel time is uniform in the route's range.

    Times are in minutes. The vehicle sits at D for one sample, travels, and the
    trace ends one sample after it reaches A.
    """
    rng = np.random.default_rng(seed)
    files = []
    travel = {}
    for route, (lo, hi) in ROUTE_RANGES.items():
        for r in range(per_route):
            steps = int(round(rng.uniform(lo, hi) / ROUTE_STEP))
            steps = min(max(steps, int(np.ceil(lo / ROUTE_STEP - 1e-9))), int(np.floor(hi / ROUTE_STEP + 1e-9)))
            t = np.arange(steps + 2) * ROUTE_STEP
            at_d = np.zeros(len(t), dtype=int)
            at_d[0] = 1
            at_a = (np.arange(len(t)) >= steps).astype(int)
            name = f"{route}_{r + 1}.csv"
            travel[name] = steps * ROUTE_STEP
            rows = ((f"{ti:.2f}", int(d), int(a)) for ti, d, a in zip(t, at_d, at_a))
            files.append((name, "time,at_D,at_A\n" + "".join(f"{a},{b},{c}\n" for a, b, c in rows)))
    config = {
        "time_column": "time",
        "predicates": [{"name": "D", "expr": "at_D >= 1"}, {"name": "A", "expr": "at_A >= 1"}],
        "target": "A", "n": 15, "k": 2, "max_depth": 20, "min_support": 0, "min_correlation": 0,
    }
    return files, config, travel


def pulse(seed: int = 1, duration: float = 400.0, step: float = 0.5, d1: float = 2.0, d2: float = 6.0,
          width: float = 1.0, hold: float = 12.0, count: int = 12):
    """Pulses of P, each followed by E after a delay drawn from [d1, d2].

    E then holds for ``hold`` time units, longer than the largest stretch n*k,
    so that the negated target does not trivially cover the whole trace.
    """
    rng = np.random.default_rng(seed)
    t = np.round(np.arange(0.0, duration + step / 2, step), 9)
    p = np.zeros(len(t), dtype=int)
    e = np.zeros(len(t), dtype=int)
    gap = duration / count
    for j in range(count - 1):
        start = j * gap + rng.uniform(0.0, gap - d2 - hold - 2 * step)
        start = round(start / step) * step
        lag = round(rng.uniform(d1, d2) / step) * step
        p[(t >= start) & (t < start + width)] = 1
        e[(t >= start + lag) & (t < start + lag + hold)] = 1
    noise = np.round(rng.normal(0.0, 1.0, len(t)), 3)
    files = [("pulse.csv", _csv(["time", "p", "e", "noise"], zip(t, p, e, noise)))]
    config = {
        "time_column": "time",
        "predicates": [{"name": "P", "expr": "p >= 1"}, {"name": "E", "expr": "e >= 1"}],
        "target": "E", "n": 4, "k": 2, "max_depth": 6, "min_support": 0, "min_correlation": 0,
    }
    return files, config


def traffic(seed: int = 1, episodes: int = 8):
    """Junction traffic where a delay follows a specific event order.

    Real episodes: a car enters at I1, lane 2 clears about 40 s later, then
    lane 1 clears while the R3S3 signal is green, and a long delay follows
    within 30 s. Decoy episodes repeat I1 and the lane 2 clearing but never
    reach the lane 1 / R3S3 step and no delay follows.
    """
    rng = np.random.default_rng(seed)
    step = 1.0
    period = 400.0
    t = np.arange(0.0, period * episodes + step / 2, step)
    i1 = np.zeros(len(t), dtype=int)
    lane1 = np.ones(len(t), dtype=int)
    lane2 = np.ones(len(t), dtype=int)
    r3s3 = np.zeros(len(t), dtype=int)
    delay = np.zeros(len(t), dtype=int)

    def on(arr, a, b, v=1):
        arr[(t >= a) & (t < b)] = v

    for ep in range(episodes):
        base = ep * period + 5
        # real episode
        on(i1, base, base + 3)
        clear2 = base + 40 + int(rng.integers(0, 3))
        on(lane2, clear2, clear2 + 4, 0)
        clear1 = clear2 + 3 + int(rng.integers(0, 2))
        on(lane1, clear1, clear1 + 3, 0)
        on(r3s3, clear1, clear1 + 3)
        d = clear1 + 20 + int(rng.integers(0, 5))
        on(delay, d, d + 100)
        # background activity while the delay is on
        on(i1, d + 4, d + 7)
        on(lane2, d + 8, d + 11, 0)
        on(r3s3, d + 12, d + 16)
        on(lane1, d + 14, d + 17, 0)
        # decoy episode
        dec = base + 220 + int(rng.integers(0, 10))
        on(i1, dec, dec + 3)
        clear2 = dec + 40 + int(rng.integers(0, 3))
        on(lane2, clear2, clear2 + 4, 0)
        on(r3s3, clear2 + 60, clear2 + 70)
    files = [("traffic.csv", _csv(["time", "i1", "lane1", "lane2", "r3s3", "delay"],
                                  zip(t, i1, lane1, lane2, r3s3, delay)))]
    config = {
        "time_column": "time",
        "predicates": [
            {"name": "I1", "expr": "i1 >= 1"},
            {"name": "LANE1", "expr": "lane1 >= 1"},
            {"name": "LANE2", "expr": "lane2 >= 1"},
            {"name": "R3S3", "expr": "r3s3 >= 1"},
            {"name": "DELAY", "expr": "delay >= 1"},
        ],
        "target": "DELAY", "n": 15, "k": 5, "max_depth": 8, "min_support": 0, "min_correlation": 0,
    }
    return files, config


def perf(seed: int = 1, samples: int = 10_000, predicates: int = 8):
    """One long trace of smooth random signals with threshold predicates."""
    rng = np.random.default_rng(seed)
    t = np.arange(samples, dtype=float)
    cols = {}
    for j in range(predicates + 1):
        walk = np.cumsum(rng.normal(0.0, 1.0, samples))
        walk -= np.convolve(walk, np.ones(501) / 501, mode="same")
        cols[f"x{j}"] = np.round(walk, 4)
    # the target loosely follows x0 with a lag so there is structure to find
    lagged = np.roll(cols["x0"], 15)
    lagged[:15] = cols["x0"][0]
    cols["y"] = np.round(lagged + rng.normal(0.0, 0.5, samples), 4)
    header = ["time"] + list(cols)
    files = [("perf.csv", _csv(header, zip(t, *cols.values())))]
    config = {
        "time_column": "time",
        "predicates": [{"name": f"P{j}", "expr": f"x{j} > 0"} for j in range(predicates)]
        + [{"name": "Y", "expr": "y > 0"}],
        "target": "Y", "n": 10, "k": 5, "max_depth": 4, "min_support": 0, "min_correlation": 0,
    }
    return files, config


SCENARIOS: dict[str, Callable] = {
    "routes": lambda seed: routes(seed)[:2],
    "pulse": pulse,
    "traffic": traffic,
    "perf": perf,
}
