"""Workload descriptions and their execution under one of the four models."""

from __future__ import annotations

import importlib
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .algorithms import BspJob, MrJob, bfs_bsp, bfs_mr, matmul_bsp, matmul_mr, psrs_bsp, psrs_mr, wordcount
from .algorithms import inputs as gen
from .algorithms import oracles
from .bsp import run_bsp
from .core import BspCostLedger, MachineConfig, MrCostLedger, RegimeWarning, TaskTrace
from .crosssim import simulate_bsp_on_mr, simulate_mr_on_bsp
from .mapreduce import run_mr
from .scheduling import BRUTEFORCE_LIMIT, greedy_schedule, optimal_makespan_bruteforce

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ALGORITHMS = ("psrs", "matmul", "bfs", "wordcount", "custom-ref")
MODELS = ("bsp", "mr", "bsp-on-mr", "mr-on-bsp")
SUPPORTED = {
    "psrs": MODELS,
    "matmul": MODELS,
    "bfs": MODELS,
    "wordcount": ("mr", "mr-on-bsp"),
    "custom-ref": MODELS,
}


class SpecError(ValueError):
    """The workload description cannot be parsed or is inconsistent."""


@dataclass
class WorkloadSpec:
    algorithm: str
    model: str
    n: int | None = None
    input: str | None = None
    input_b: str | None = None
    p: int = 4
    q: int | None = None
    r: int | None = None
    g: float = 1
    l: float = 10
    seed: int = 0
    sweep: list[int] = field(default_factory=list)
    root: int = 0
    edge_prob: float = 0.05
    ref: str | None = None

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise SpecError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.model not in MODELS:
            raise SpecError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.model not in SUPPORTED[self.algorithm]:
            raise SpecError(f"{self.algorithm} is not available under model {self.model}")
        if self.algorithm == "custom-ref" and not self.ref:
            raise SpecError("custom-ref needs ref = 'module:factory'")
        if self.input is None and self.n is None and not self.sweep and self.algorithm != "custom-ref":
            raise SpecError("give either n or an input file")
        if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
            raise SpecError(f"sweep sizes must be strictly increasing: {self.sweep}")
        if self.p < 1:
            raise SpecError("p must be >= 1")

    @property
    def effective_q(self) -> int:
        return self.q if self.q is not None else 2 * self.p

    @property
    def effective_r(self) -> int:
        return self.r if self.r is not None else self.p

    def machine(self, p: int | None = None, q: int | None = None, r: int | None = None) -> MachineConfig:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            return MachineConfig(
                p=p or self.p, g=self.g, l=self.l, q=q or self.effective_q, r=r or self.effective_r, seed=self.seed
            )

    def with_overrides(self, **overrides: Any) -> "WorkloadSpec":
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return WorkloadSpec(**data)


def load_spec(path: str | Path, **overrides: Any) -> WorkloadSpec:
    """Read a ``key = value`` (TOML) workload file; non-None overrides win."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"{path}: {exc}") from exc
    known = {f.name for f in fields(WorkloadSpec)}
    unknown = set(data) - known
    if unknown:
        raise SpecError(f"{path}: unknown keys {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return WorkloadSpec(**data)
    except TypeError as exc:
        raise SpecError(str(exc)) from exc


# --------------------------------------------------------------------------
# building concrete inputs
# --------------------------------------------------------------------------


def _load_input(spec: WorkloadSpec) -> Any:
    if spec.input is None and spec.n is None and spec.algorithm != "custom-ref":
        raise SpecError("n is required when no input file is given")
    try:
        if spec.algorithm == "psrs":
            return gen.read_ints(spec.input) if spec.input else gen.random_ints(spec.n, spec.seed)
        if spec.algorithm == "matmul":
            if spec.input:
                a = gen.read_matrix_csv(spec.input)
                b = gen.read_matrix_csv(spec.input_b) if spec.input_b else a
                if a.shape != b.shape:
                    raise SpecError(f"matrix shapes differ: {a.shape} vs {b.shape}")
                return a, b
            return gen.random_matrix_pair(spec.n, spec.seed)
        if spec.algorithm == "bfs":
            graph = gen.read_edge_list(spec.input) if spec.input else gen.random_graph(spec.n, spec.seed, spec.edge_prob)
            if spec.root not in graph:
                raise SpecError(f"root {spec.root} is not a vertex of the graph")
            return graph
        if spec.algorithm == "wordcount":
            if spec.input:
                return Path(spec.input).read_text().split()
            return gen.random_words(spec.n, spec.seed)
    except (OSError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad input: {exc}") from exc
    return None


def _build_job(spec: WorkloadSpec, data: Any, bsp_side: bool, config: MachineConfig) -> BspJob | MrJob:
    q, r, p = config.q, config.r, spec.p
    if spec.algorithm == "psrs":
        return psrs_bsp(data, p) if bsp_side else psrs_mr(data, q, r)
    if spec.algorithm == "matmul":
        a, b = data
        return matmul_bsp(a, b, p) if bsp_side else matmul_mr(a, b, q)
    if spec.algorithm == "bfs":
        return bfs_bsp(data, spec.root, p) if bsp_side else bfs_mr(data, spec.root)
    if spec.algorithm == "wordcount":
        return wordcount(data)
    return _resolve_ref(spec.ref)(spec)


def _resolve_ref(ref: str) -> Callable[[WorkloadSpec], BspJob | MrJob]:
    module, _, attr = ref.partition(":")
    try:
        return getattr(importlib.import_module(module), attr)
    except (ImportError, AttributeError) as exc:
        raise SpecError(f"cannot resolve custom ref {ref!r}: {exc}") from exc


def _oracle(spec: WorkloadSpec, data: Any) -> Any:
    if spec.algorithm == "psrs":
        return oracles.sequential_sort(data)
    if spec.algorithm == "matmul":
        return np.asarray(oracles.matmul_triple_loop(*data), dtype=np.int64)
    if spec.algorithm == "bfs":
        return oracles.bfs_sequential(data, spec.root)
    if spec.algorithm == "wordcount":
        return oracles.wordcount_sequential(data)
    return None


def _same(a: Any, b: Any) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return bool(np.array_equal(a, b))
    return a == b


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class RunOutcome:
    spec: WorkloadSpec
    config: MachineConfig
    bsp_ledger: BspCostLedger | None = None
    mr_ledger: MrCostLedger | None = None
    traces: list[TaskTrace] = field(default_factory=list)
    messages: list[tuple] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)
    bsp_procs: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _graham_checks(traces: list[TaskTrace], p: int) -> list[Check]:
    phases: dict[tuple[int, str], list[int]] = {}
    for tr in traces:
        phases.setdefault((tr.round, tr.kind), []).append(tr.t)
    checks = []
    for (rnd, kind), times in sorted(phases.items()):
        if len(times) > BRUTEFORCE_LIMIT:
            continue
        greedy = greedy_schedule(times, p).makespan
        opt = optimal_makespan_bruteforce(times, p)
        ok = greedy * p <= (2 * p - 1) * opt
        checks.append(Check(f"graham_bound[round={rnd},{kind}]", ok, f"greedy={greedy} opt={opt} p={p}"))
    return checks


def _ledger_checks(out: RunOutcome) -> None:
    if out.bsp_ledger is not None:
        led = out.bsp_ledger
        ok = led.W == sum(r.w for r in led.records) and led.H == sum(r.h_in + r.h_out for r in led.records)
        out.checks.append(Check("bsp_ledger_consistent", ok and led.H_n <= led.H))
    if out.mr_ledger is not None:
        led = out.mr_ledger
        ok = led.T == sum(sum(r.map_times) + sum(r.reduce_times) for r in led.rounds)
        ok = ok and led.C == sum(sum(r.map_io) + sum(r.reduce_io) for r in led.rounds)
        out.checks.append(Check("mr_ledger_consistent", ok))
        out.checks.append(Check("compute_dominates_io", led.T >= led.C, f"T={led.T} C={led.C}"))


def run_workload(spec: WorkloadSpec) -> RunOutcome:
    """Execute one workload and collect ledgers, traces and post-run checks.

    Engine failures propagate as :class:`~bspmr.core.SimulationError`.
    """
    data = _load_input(spec)
    model = spec.model
    if spec.algorithm == "matmul" and model in ("mr", "mr-on-bsp"):
        # one map task per block triple: q = r must be a perfect cube
        side = spec.q or spec.p
        config = spec.machine(q=side, r=side)
    else:
        config = spec.machine()
    out = RunOutcome(spec, config)
    expected = _oracle(spec, data)
    bsp_side = model in ("bsp", "bsp-on-mr")
    try:
        job = _build_job(spec, data, bsp_side, config)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc

    if bsp_side:
        out.bsp_procs = job.p
    if model == "bsp":
        res = run_bsp(job.program, job.inputs, config.replace(p=job.p))
        out.bsp_ledger, out.messages = res.ledger, res.messages
        result = job.program.collect(res.outputs)
    elif model == "mr":
        res = run_mr(job.program, job.input, config)
        out.mr_ledger, out.traces = res.ledger, res.traces
        result = job.program.collect(res.output)
        out.checks += _graham_checks(res.traces, config.p)
    elif model == "bsp-on-mr":
        native = run_bsp(job.program, job.inputs, config.replace(p=job.p))
        cfg = config.replace(r=max(config.r, job.p))
        sim = simulate_bsp_on_mr(job.program, job.inputs, cfg)
        out.config = cfg
        out.bsp_ledger, out.mr_ledger, out.traces = native.ledger, sim.ledger, sim.mr.traces
        result = job.program.collect(sim.outputs)
        out.checks.append(Check("outputs_match_native_bsp", _same(result, job.program.collect(native.outputs))))
        out.checks.append(
            Check("rounds_equal_supersteps", sim.ledger.D == native.ledger.S, f"D={sim.ledger.D} S={native.ledger.S}")
        )
        out.extra = {"state_units": sim.state_units, "message_units": sim.message_units}
    else:
        sim = simulate_mr_on_bsp(job.program, job.input, config)
        out.bsp_ledger, out.mr_ledger, out.traces = sim.ledger, sim.reference.ledger, sim.reference.traces
        out.messages = sim.bsp.messages
        result = job.program.collect(sim.output)
        D, S = sim.reference.ledger.D, sim.ledger.S
        out.checks.append(Check("outputs_match_native_mr", _same(result, job.program.collect(sim.reference.output))))
        out.checks.append(Check("superstep_bounds", 2 * D <= S <= 3 * D - 1, f"D={D} S={S}"))
        out.checks += _graham_checks(sim.reference.traces, config.p)
        out.extra = {"supersteps_per_round": sim.supersteps_per_round}

    if expected is not None:
        out.checks.append(Check("oracle_equivalence", _same(result, expected)))
    _ledger_checks(out)
    return out
