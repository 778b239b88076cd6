"""Running MapReduce programs on the BSP engine and BSP programs on the MapReduce engine."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Any, Sequence

from .bsp import BspProgram, BspResult, Message, Processor, run_bsp
from .core import KVPair, MachineConfig, MrCostLedger, Sized, pair_units
from .mapreduce import (
    MrProgram,
    MrResult,
    PrePartitioned,
    TaskContext,
    run_map_task,
    run_mr,
    run_reduce_task,
    shuffle,
)
from .scheduling import Schedule, greedy_schedule


# --------------------------------------------------------------------------
# MapReduce on BSP
# --------------------------------------------------------------------------


@dataclass
class _PlannedRound:
    program: MrProgram
    n_reduce: int
    map_schedule: Schedule
    reduce_schedule: Schedule


class MrOnBspProgram(BspProgram):
    """BSP program replaying a MapReduce computation round by round.

    Round ``d`` is a map superstep (tasks statically placed by list
    scheduling on known task times; map output is partitioned and sent to the
    processor hosting its reduce task), a reduce superstep (group, sort,
    reduce) and, unless ``d`` is the last round, a redistribution superstep
    in which every processor learns all reduce-output counts, computes the
    next round's split boundaries and ships each pair to the processor that
    will run its map task.
    """

    def __init__(self, plan: Sequence[_PlannedRound], q: int):
        self.plan = list(plan)
        self.q = q
        self.phases: list[tuple[int, str]] = []
        for d in range(1, len(self.plan) + 1):
            self.phases += [(d, "map"), (d, "reduce")]
            if d < len(self.plan):
                self.phases.append((d, "redistribute"))

    def init_state(self, pid, local_input):
        return {"splits": local_input, "out": {}}

    def input_units(self, local_input):
        return sum(pair_units(kv) for split in local_input.values() for kv in split)

    def superstep(self, proc: Processor, state):
        d, phase = self.phases[proc.superstep - 1]
        return getattr(self, f"_{phase}")(proc, state, d)

    def _map(self, proc, state, d):
        rnd = self.plan[d - 1]
        splits = state["splits"]
        if d > 1:
            splits = {}
            for m in proc.inbox:
                for task, pos, key, value in m.payload:
                    splits.setdefault(task, []).append((pos, KVPair(key, value)))
            splits = {t: [kv for _, kv in sorted(entries, key=lambda e: e[0])] for t, entries in splits.items()}
        outgoing: dict[int, list] = {}
        sizes: dict[int, int] = {}
        for task, worker in enumerate(rnd.map_schedule.assignment):
            if worker != proc.pid:
                continue
            res = run_map_task(rnd.program, d, task, splits.get(task, []), rnd.n_reduce)
            proc.count_op(res.t)
            for seq, (part, key, value) in enumerate(res.emitted):
                dest = rnd.reduce_schedule.assignment[part]
                outgoing.setdefault(dest, []).append((part, task, seq, key, value))
                sizes[dest] = sizes.get(dest, 0) + pair_units((key, value))
        for dest in sorted(outgoing):
            proc.send(dest, tuple(outgoing[dest]), size=sizes[dest])
        return {"splits": {}, "out": {}}

    def _reduce(self, proc, state, d):
        rnd = self.plan[d - 1]
        received: dict[int, list] = {}
        for m in proc.inbox:
            for part, task, seq, key, value in m.payload:
                received.setdefault(part, []).append((task, seq, key, value))
        out = {}
        for task, worker in enumerate(rnd.reduce_schedule.assignment):
            if worker != proc.pid:
                continue
            entries = sorted(received.get(task, []), key=lambda e: (e[0], e[1]))
            groups = shuffle([[(0, key, value) for _, _, key, value in entries]], 1)[0]
            res = run_reduce_task(rnd.program, d, task, groups)
            proc.count_op(res.t)
            out[task] = res.output
        if d == len(self.plan):
            proc.vote_halt()
        else:
            counts = tuple((task, len(pairs)) for task, pairs in out.items())
            for dest in range(proc.nprocs):
                proc.send(dest, counts, size=max(1, len(counts)))
            proc.retain(sum(pair_units(kv) for pairs in out.values() for kv in pairs))
        return {"splits": {}, "out": out}

    def _redistribute(self, proc, state, d):
        rnd = self.plan[d - 1]
        nxt = self.plan[d]
        counts = [0] * rnd.n_reduce
        for m in proc.inbox:
            for task, count in m.payload:
                counts[task] = count
        offsets = [0] * rnd.n_reduce
        for t in range(1, rnd.n_reduce):
            offsets[t] = offsets[t - 1] + counts[t - 1]
        base, extra = divmod(sum(counts), self.q)
        starts = [i * base + min(i, extra) for i in range(self.q + 1)]
        proc.count_op(rnd.n_reduce + self.q)

        outgoing: dict[int, list] = {}
        sizes: dict[int, int] = {}
        split = 0
        for task in sorted(state["out"]):
            for i, kv in enumerate(state["out"][task]):
                gi = offsets[task] + i
                while starts[split + 1] <= gi:
                    split += 1
                dest = nxt.map_schedule.assignment[split]
                outgoing.setdefault(dest, []).append((split, gi - starts[split], kv.key, kv.value))
                sizes[dest] = sizes.get(dest, 0) + pair_units(kv)
        for dest in sorted(outgoing):
            proc.send(dest, tuple(outgoing[dest]), size=sizes[dest])
        return {"splits": {}, "out": {}}

    def output(self, pid, state):
        return sorted(state["out"].items())

    def output_units(self, local_output):
        return sum(pair_units(kv) for _, pairs in local_output for kv in pairs)


@dataclass
class MrOnBspResult:
    output: list[KVPair]
    bsp: BspResult
    supersteps_per_round: list[int]
    reference: MrResult
    """The dry run that supplied task times (and the native output)."""

    @property
    def ledger(self):
        return self.bsp.ledger

    def round_supersteps(self, d: int) -> list[int]:
        """Ledger indices of the supersteps simulating round ``d`` (1-based)."""
        start = sum(self.supersteps_per_round[: d - 1])
        return list(range(start, start + self.supersteps_per_round[d - 1]))


def simulate_mr_on_bsp(
    program: MrProgram, input: Sequence[tuple] | PrePartitioned, config: MachineConfig
) -> MrOnBspResult:
    """Simulate an MR(p, g, l) computation on a BSP(p, g, l) machine.

    Task times are obtained from a deterministic dry run of the MapReduce
    program; each round then takes two supersteps, plus one redistribution
    superstep when another round follows.
    """
    reference = run_mr(copy.deepcopy(program), input, config, keep_rounds=True)
    plan = []
    for res in reference.rounds:
        prog = res.program
        prog.prepare_round(res.round)
        plan.append(
            _PlannedRound(
                program=prog,
                n_reduce=res.n_reduce,
                map_schedule=greedy_schedule(res.map_times, config.p, kind="map", round=res.round),
                reduce_schedule=greedy_schedule(res.reduce_times, config.p, kind="reduce", round=res.round),
            )
        )
    first = reference.rounds[0]
    inputs: list[dict[int, list]] = [{} for _ in range(config.p)]
    for task, worker in enumerate(plan[0].map_schedule.assignment):
        inputs[worker][task] = first.splits[task]

    bsp_program = MrOnBspProgram(plan, config.q)
    result = run_bsp(bsp_program, inputs, config, max_supersteps=len(bsp_program.phases))
    by_task = dict(item for local in result.outputs for item in local)
    output = [kv for task in sorted(by_task) for kv in by_task[task]]
    per_round = [3] * (len(plan) - 1) + [2]
    return MrOnBspResult(output, result, per_round, reference)


# --------------------------------------------------------------------------
# BSP on MapReduce
# --------------------------------------------------------------------------

_INPUT, _STATE, _MESSAGE = "i", "s", "m"


class BspOnMrProgram(MrProgram):
    """MapReduce program in which reduce task ``i`` plays BSP processor ``i``.

    Map is the identity. Every pair is keyed by the destination processor id
    and tagged as initial input, carried-over local state or message; local
    state travels through global memory because workers forget everything
    between tasks.
    """

    def __init__(self, program: BspProgram, nprocs: int):
        self.program = program
        self.nprocs = nprocs
        self.message_units = 0
        self.state_units = 0

    def reduce_tasks(self, round, r):
        return self.nprocs

    def partition(self, key, n_reduce):
        return key % n_reduce

    def reduce(self, ctx: TaskContext, key, values):
        pid = key
        state: Any = None
        inbox = []
        for value in values:
            tag = value[0]
            if tag == _INPUT:
                state = self.program.init_state(pid, value[1].obj)
            elif tag == _STATE:
                state = value[1].obj
            else:
                _, src, seq, payload = value
                inbox.append(Message(src, pid, seq, payload.obj, payload.units))
        inbox.sort(key=lambda m: (m.src, m.seq))
        proc = Processor(pid, self.nprocs, ctx.round, inbox)
        state = self.program.superstep(proc, state)
        ctx.count_op(proc.ops)
        for m in proc.outbox:
            self.message_units += m.size
            yield m.dest, (_MESSAGE, m.src, m.seq, Sized(m.payload, m.size))
        self.state_units += proc.retained
        yield pid, (_STATE, Sized(state, proc.retained), proc.halted)

    def next_round(self, round, output):
        return not all(v[0] == _STATE and v[2] for _, v in output)


@dataclass
class BspOnMrResult:
    outputs: list[Any]
    mr: MrResult
    message_units: int
    state_units: int

    @property
    def ledger(self) -> MrCostLedger:
        return self.mr.ledger


def simulate_bsp_on_mr(program: BspProgram, inputs: Sequence[Any], config: MachineConfig) -> BspOnMrResult:
    """Reduce-only simulation: one MapReduce round per BSP superstep.

    Needs ``config.r`` at least the number of BSP processors.
    """
    nprocs = len(inputs)
    if config.r < nprocs:
        raise ValueError(f"need r >= {nprocs} reduce tasks to host the BSP processors, got r={config.r}")
    wrapper = BspOnMrProgram(program, nprocs)
    memory = [
        KVPair(pid, (_INPUT, Sized(inputs[pid], program.input_units(inputs[pid])))) for pid in range(nprocs)
    ]
    mr = run_mr(wrapper, memory, config)
    states = {k: v[1].obj for k, v in mr.output if v[0] == _STATE}
    outputs = [program.output(pid, states[pid]) for pid in range(nprocs)]
    return BspOnMrResult(outputs, mr, wrapper.message_units, wrapper.state_units)
