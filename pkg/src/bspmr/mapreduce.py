"""Round-by-round MapReduce execution over ``p`` simulated workers.

Each round splits global memory into ``q`` parts, runs the map tasks (which
also assign every emitted pair to a reduce partition), shuffles, runs the
reduce tasks and writes their output back to global memory. Workers keep
nothing between tasks.
"""

from __future__ import annotations

import copy
import csv
import hashlib
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence, TextIO

from .core import KVPair, MachineConfig, MrCostLedger, RoundRecord, SimulationError, TaskTrace, pair_units, sort_cost
from .scheduling import greedy_schedule

DEFAULT_MAX_ROUNDS = 1_000

TRACE_COLUMNS = ("task_id", "kind", "round", "worker", "start", "finish", "t", "c")


def stable_hash(key: Any) -> int:
    """Process-independent 64-bit hash for partitioning."""
    if isinstance(key, bool):
        return int(key)
    if isinstance(key, int):
        return key
    if isinstance(key, str):
        key = key.encode()
    if isinstance(key, (bytes, bytearray)):
        return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    if isinstance(key, tuple):
        h = 0xCBF29CE484222325
        for part in key:
            h = ((h ^ (stable_hash(part) & 0xFFFFFFFFFFFFFFFF)) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
        return h
    raise TypeError(f"no stable hash for key type {type(key).__name__}")


def default_partition(key: Any, n_reduce: int) -> int:
    return stable_hash(key) % n_reduce


class TaskContext:
    """Handed to map and reduce functions for operation counting."""

    def __init__(self, round: int, task_id: int, kind: str):
        self.round = round
        self.task_id = task_id
        self.kind = kind
        self.ops = 0

    def count_op(self, units: int = 1) -> None:
        self.ops += units


class MrProgram:
    """Base class for MapReduce programs.

    Defaults give an identity map, an identity reduce, the hash partitioner,
    all ``r`` reduce tasks in every round and a single round.
    """

    def map(self, ctx: TaskContext, key: Any, value: Any) -> Iterable[tuple]:
        yield key, value

    def reduce(self, ctx: TaskContext, key: Any, values: list) -> Iterable[tuple]:
        for v in values:
            yield key, v

    def partition(self, key: Any, n_reduce: int) -> int:
        return default_partition(key, n_reduce)

    def reduce_tasks(self, round: int, r: int) -> int:
        return r

    def prepare_round(self, round: int) -> None:
        """Master-side hook run before a round's tasks are handed out."""

    def next_round(self, round: int, output: list[KVPair]) -> bool:
        """Master-side controller, called with the round's output; True to continue."""
        return False


@dataclass
class PrePartitioned:
    """Round-1 input already divided into exactly ``q`` splits."""

    splits: list[list[KVPair]]


def split_input(memory: Sequence[tuple], q: int) -> list[list[KVPair]]:
    """Cut global memory into ``q`` contiguous splits whose pair counts differ by at most one.

    Keys are ignored, so map tasks cannot be targeted with particular data.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    base, extra = divmod(len(memory), q)
    splits = []
    pos = 0
    for i in range(q):
        size = base + (1 if i < extra else 0)
        splits.append([KVPair(*kv) for kv in memory[pos : pos + size]])
        pos += size
    return splits


def shuffle(
    intermediate: Sequence[Sequence[tuple[int, Any, Any]]], n_reduce: int
) -> list[list[tuple[Any, list]]]:
    """Route, sort and group map output.

    ``intermediate[i]`` holds map task ``i``'s output as
    ``(partition, key, value)`` triples in emission order. Returns, per reduce
    task, ``(key, values)`` groups in increasing key order; values keep
    (map task, emission) order.
    """
    buckets: list[list[tuple[Any, Any]]] = [[] for _ in range(n_reduce)]
    for emitted in intermediate:
        for part, key, value in emitted:
            if not 0 <= part < n_reduce:
                raise SimulationError(f"partition {part} for key {key!r} outside [0, {n_reduce})")
            buckets[part].append((key, value))
    grouped = []
    for bucket in buckets:
        bucket.sort(key=lambda kv: kv[0])  # stable
        groups: list[tuple[Any, list]] = []
        for key, value in bucket:
            if groups and groups[-1][0] == key:
                groups[-1][1].append(value)
            else:
                groups.append((key, [value]))
        grouped.append(groups)
    return grouped


@dataclass
class MapTaskResult:
    emitted: list[tuple[int, Any, Any]]
    t: int
    c: int


@dataclass
class ReduceTaskResult:
    output: list[KVPair]
    t: int
    c: int


def run_map_task(program: MrProgram, round: int, task_id: int, split: Sequence[tuple], n_reduce: int) -> MapTaskResult:
    """Apply ``map`` to every pair of a split and partition the output.

    ``t`` is counted ops plus one unit per partitioner call plus ``c``; ``c``
    is input units read plus output units written.
    """
    ctx = TaskContext(round, task_id, "map")
    emitted = []
    c_in = 0
    c_out = 0
    for key, value in split:
        c_in += pair_units((key, value))
        for out in program.map(ctx, key, value):
            part = program.partition(out[0], n_reduce)
            emitted.append((part, out[0], out[1]))
            c_out += pair_units(out)
    c = c_in + c_out
    return MapTaskResult(emitted, ctx.ops + len(emitted) + c, c)


def run_reduce_task(program: MrProgram, round: int, task_id: int, groups: Sequence[tuple[Any, list]]) -> ReduceTaskResult:
    """Apply ``reduce`` per key; sorting the ``m`` input pairs is charged ``m*ceil(log2 m)``."""
    ctx = TaskContext(round, task_id, "reduce")
    output = []
    m = 0
    c_in = 0
    for key, values in groups:
        m += len(values)
        c_in += sum(pair_units((key, v)) for v in values)
        for out in program.reduce(ctx, key, values):
            output.append(KVPair(out[0], out[1]))
    c = c_in + sum(pair_units(kv) for kv in output)
    return ReduceTaskResult(output, ctx.ops + sort_cost(m) + c, c)


@dataclass
class RoundResult:
    round: int
    splits: list[list[KVPair]]
    n_reduce: int
    maps: list[MapTaskResult]
    reduces: list[ReduceTaskResult]
    groups: list[list[tuple[Any, list]]]
    program: MrProgram | None = None
    """Snapshot of the program as configured when the round started (if kept)."""

    @property
    def output(self) -> list[KVPair]:
        return [kv for red in self.reduces for kv in red.output]

    @property
    def map_times(self) -> list[int]:
        return [m.t for m in self.maps]

    @property
    def reduce_times(self) -> list[int]:
        return [r.t for r in self.reduces]


def run_round(program: MrProgram, round: int, splits: Sequence[Sequence[tuple]], config: MachineConfig) -> RoundResult:
    """Execute one round on already-split input (no scheduling)."""
    if len(splits) != config.q:
        raise ValueError(f"expected {config.q} splits, got {len(splits)}")
    program.prepare_round(round)
    n_reduce = program.reduce_tasks(round, config.r)
    if not 1 <= n_reduce <= config.r:
        raise SimulationError(f"round {round} asked for {n_reduce} reduce tasks; allowed 1..{config.r}")
    maps = [run_map_task(program, round, i, split, n_reduce) for i, split in enumerate(splits)]
    groups = shuffle([m.emitted for m in maps], n_reduce)
    reduces = [run_reduce_task(program, round, i, g) for i, g in enumerate(groups)]
    return RoundResult(round, [list(s) for s in splits], n_reduce, maps, reduces, groups)


@dataclass
class MrResult:
    output: list[KVPair]
    ledger: MrCostLedger
    traces: list[TaskTrace]
    rounds: list[RoundResult] = field(default_factory=list)


def run_mr(
    program: MrProgram,
    input: Sequence[tuple] | PrePartitioned,
    config: MachineConfig,
    *,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    keep_rounds: bool = False,
) -> MrResult:
    """Run ``program`` until its round controller halts.

    Map and reduce tasks are list-scheduled on ``config.p`` workers; the
    reduce phase starts when the last map task finishes. With
    ``keep_rounds`` every :class:`RoundResult` is returned together with a
    snapshot of the program taken at the start of its round.
    """
    ledger = MrCostLedger()
    traces: list[TaskTrace] = []
    kept: list[RoundResult] = []
    clock = 0
    if isinstance(input, PrePartitioned):
        splits = input.splits
        if len(splits) != config.q:
            raise ValueError(f"pre-partitioned input has {len(splits)} splits, q={config.q}")
    else:
        splits = split_input(list(input), config.q)

    round = 0
    while True:
        round += 1
        if round > max_rounds:
            raise SimulationError(f"no halt after {max_rounds} rounds")
        snapshot = copy.deepcopy(program) if keep_rounds else None
        res = run_round(program, round, splits, config)
        res.program = snapshot

        map_sched = greedy_schedule(
            res.map_times, config.p, kind="map", round=round, start=clock, task_io=[m.c for m in res.maps]
        )
        clock += map_sched.makespan
        red_sched = greedy_schedule(
            res.reduce_times, config.p, kind="reduce", round=round, start=clock, task_io=[r.c for r in res.reduces]
        )
        clock += red_sched.makespan
        traces.extend(map_sched.traces)
        traces.extend(red_sched.traces)
        ledger.append(
            RoundRecord(
                map_times=tuple(res.map_times),
                reduce_times=tuple(res.reduce_times),
                map_io=tuple(m.c for m in res.maps),
                reduce_io=tuple(r.c for r in res.reduces),
                makespan=map_sched.makespan + red_sched.makespan,
            )
        )
        if keep_rounds:
            kept.append(res)

        output = res.output
        if not program.next_round(round, output):
            break
        splits = split_input(output, config.q)

    ledger.check_compute_dominates()
    return MrResult(output, ledger, traces, kept)


def write_trace_csv(traces: Iterable[TaskTrace], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for tr in traces:
        writer.writerow([getattr(tr, col) for col in TRACE_COLUMNS])
