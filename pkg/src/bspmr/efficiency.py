"""Empirical check of the necessary conditions for running a BSP algorithm
efficiently on MapReduce through the reduce-only simulation.

Across a sweep of input sizes, each condition compares a MapReduce-side
quantity with its BSP counterpart by fitting log-log growth exponents. A
condition is satisfied when the left side grows no faster than the right
(within ``tolerance``) and their ratio at the largest size stays below
``ratio_bound``. Both thresholds are conventions; passing is evidence, not
proof, of an efficient implementation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .core import BspCostLedger, MrCostLedger

DEFAULT_TOLERANCE = 0.25
DEFAULT_RATIO_BOUND = 16.0
MIN_RUNS = 4


@dataclass
class ConditionResult:
    name: str
    left: str
    right: str
    left_values: list[float]
    right_values: list[float]
    left_exponent: float
    right_exponent: float
    ratio: float | None
    satisfied: bool
    degenerate: bool = False
    note: str = ""

    @property
    def exponent_gap(self) -> float:
        return self.left_exponent - self.right_exponent


@dataclass
class EfficiencyReport:
    sizes: list[int]
    p: int
    tolerance: float
    ratio_bound: float
    conditions: list[ConditionResult] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return all(c.satisfied for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        return next(c for c in self.conditions if c.name == name)

    def to_dict(self) -> dict:
        return {
            "sizes": self.sizes,
            "p": self.p,
            "tolerance": self.tolerance,
            "ratio_bound": self.ratio_bound,
            "conditions": [
                {
                    **asdict(c),
                    "left_exponent": _num(c.left_exponent),
                    "right_exponent": _num(c.right_exponent),
                    "ratio": _num(c.ratio),
                    "exponent_gap": _num(c.exponent_gap),
                    "verdict": "satisfied" if c.satisfied else "violated",
                }
                for c in self.conditions
            ],
            "verdict": "conditions satisfied" if self.satisfied else "conditions violated",
        }


def _num(x: float | None) -> float | None:
    if x is None or math.isnan(x):
        return None
    return round(x, 6)


def fit_exponent(sizes: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log(values)`` against ``log(sizes)``."""
    return float(np.polyfit(np.log(sizes), np.log(values), 1)[0])


def _compare(name, left, right, sizes, lv, rv, tolerance, ratio_bound) -> ConditionResult:
    lv, rv = list(lv), list(rv)
    common = dict(name=name, left=left, right=right, left_values=lv, right_values=rv)
    if len(set(sizes)) == 1:
        ratio = lv[-1] / rv[-1] if rv[-1] else None
        return ConditionResult(
            **common, left_exponent=0.0, right_exponent=0.0, ratio=ratio, satisfied=True,
            degenerate=True, note="all runs share one size; no growth to fit",
        )
    if len(set(lv)) == 1 and len(set(rv)) == 1:
        ratio = lv[-1] / rv[-1] if rv[-1] else None
        return ConditionResult(
            **common, left_exponent=0.0, right_exponent=0.0, ratio=ratio, satisfied=True,
            degenerate=True, note="both series are constant across sizes",
        )
    if all(x == 0 for x in lv):
        return ConditionResult(
            **common, left_exponent=0.0, right_exponent=0.0, ratio=0.0, satisfied=True,
            degenerate=True, note=f"{left} is identically zero",
        )
    if any(x <= 0 for x in lv) or any(x <= 0 for x in rv):
        return ConditionResult(
            **common, left_exponent=float("nan"), right_exponent=float("nan"), ratio=None, satisfied=False,
            degenerate=True, note="zero values prevent a log-log fit",
        )
    le = fit_exponent(sizes, lv)
    re = fit_exponent(sizes, rv)
    ratio = lv[-1] / rv[-1]
    satisfied = le - re <= tolerance and ratio <= ratio_bound
    return ConditionResult(**common, left_exponent=le, right_exponent=re, ratio=ratio, satisfied=satisfied)


def check_efficiency(
    runs: Sequence[tuple[int, BspCostLedger, MrCostLedger]],
    p: int,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    ratio_bound: float = DEFAULT_RATIO_BOUND,
) -> EfficiencyReport:
    """Evaluate the four conditions over ``(n, bsp_ledger, mr_ledger)`` runs.

    The MapReduce ledgers come from the reduce-only simulation with one
    reduce task per BSP processor, so ``v = p``.
    """
    if len(runs) < MIN_RUNS:
        raise ValueError(f"need at least {MIN_RUNS} runs at increasing sizes, got {len(runs)}")
    runs = sorted(runs, key=lambda r: r[0])
    sizes = [r[0] for r in runs]
    bsp = [r[1] for r in runs]
    mr = [r[2] for r in runs]
    report = EfficiencyReport(sizes, p, tolerance, ratio_bound)
    specs = [
        ("i", "T", "W*p", [m.T for m in mr], [b.W * p for b in bsp]),
        ("ii", "C", "H*p", [m.C for m in mr], [b.H * p for b in bsp]),
        ("iii", "D", "S", [m.D for m in mr], [b.S for b in bsp]),
        ("iv", "F", "H_n", [b.F for b in bsp], [b.H_n for b in bsp]),
    ]
    for name, left, right, lv, rv in specs:
        report.conditions.append(_compare(name, left, right, sizes, lv, rv, tolerance, ratio_bound))
    return report
