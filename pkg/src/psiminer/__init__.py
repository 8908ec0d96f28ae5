"""Mine prefix-sequence temporal properties from time-series traces."""

from .intervals import Interval, IntervalSet, parse_intervals
from .miner import MinerConfig, mine
from .psil import PsiProperty, parse_psil
from .trace import Predicate, TruthSet, booleanize, load_trace

__all__ = [
    "Interval", "IntervalSet", "parse_intervals", "MinerConfig", "mine",
    "PsiProperty", "parse_psil", "Predicate", "TruthSet", "booleanize", "load_trace",
]
