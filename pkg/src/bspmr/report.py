"""JSON cost reports (schema version 1)."""

from __future__ import annotations

import json
from dataclasses import asdict
from typing import Any

from .core import BspCostLedger, MrCostLedger, estimate_bsp_time, estimate_bspmr_on_mr_time, estimate_mr_time
from .efficiency import EfficiencyReport
from .workload import RunOutcome

SCHEMA = 1


def _estimators(bsp: BspCostLedger | None, mr: MrCostLedger | None, g: float, l: float) -> dict[str, Any]:
    return {
        "bsp_time": estimate_bsp_time(bsp, g, l) if bsp is not None else None,
        "bspmr_on_mr_time": estimate_bspmr_on_mr_time(bsp, g, l) if bsp is not None else None,
        "mr_time": estimate_mr_time(mr, g, l) if mr is not None else None,
    }


def emit_report(outcome: RunOutcome) -> dict[str, Any]:
    """Schema-stable report for a single run. Unit counts stay integers."""
    cfg = outcome.config
    return {
        "schema": SCHEMA,
        "kind": "run",
        "status": "ok" if outcome.passed else "failed",
        "workload": asdict(outcome.spec),
        "config": {"p": cfg.p, "g": cfg.g, "l": cfg.l, "q": cfg.q, "r": cfg.r, "seed": cfg.seed},
        "ledger": {
            "bsp": outcome.bsp_ledger.to_dict() if outcome.bsp_ledger is not None else None,
            "mr": outcome.mr_ledger.to_dict() if outcome.mr_ledger is not None else None,
        },
        "estimators": _estimators(outcome.bsp_ledger, outcome.mr_ledger, cfg.g, cfg.l),
        "checks": [asdict(c) for c in outcome.checks],
        "verdicts": {"invariants": "passed" if outcome.passed else "failed", **outcome.extra},
    }


def emit_sweep_report(outcomes: list[RunOutcome], efficiency: EfficiencyReport | None) -> dict[str, Any]:
    runs = [emit_report(o) for o in outcomes]
    passed = all(o.passed for o in outcomes)
    return {
        "schema": SCHEMA,
        "kind": "sweep",
        "status": "ok" if passed else "failed",
        "sizes": [o.spec.n for o in outcomes],
        "runs": runs,
        "efficiency": efficiency.to_dict() if efficiency is not None else None,
        "verdicts": {
            "invariants": "passed" if passed else "failed",
            "efficiency": efficiency.to_dict()["verdict"] if efficiency is not None else None,
        },
    }


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
