"""Parallel Sorting by Regular Sampling, as a BSP program and as two MapReduce rounds."""

from __future__ import annotations

import heapq
from bisect import bisect_right
from typing import Any, Sequence

from ..bsp import BspProgram, Processor
from ..core import KVPair, sort_cost
from ..mapreduce import MrProgram, TaskContext
from .base import BspJob, CostDescriptor, MrJob

BSP_DESCRIPTOR = CostDescriptor(
    bounds={"W": "n log n / p", "H": "n / p", "S": "1", "F": "n / p", "H_n": "n / p"},
    exponents={"W": 1.0, "H": 1.0, "S": 0.0, "F": 1.0, "H_n": 1.0},
    log_factors={"W": 1},
)

MR_DESCRIPTOR = CostDescriptor(
    bounds={"T": "n log n", "C": "n", "D": "1"},
    exponents={"T": 1.0, "C": 1.0, "D": 0.0},
    log_factors={"T": 1},
)


def regular_samples(sorted_items: Sequence[Any], count: int) -> list[Any]:
    """``count + 1`` evenly spaced picks, always including the first and last item."""
    m = len(sorted_items)
    if m == 0:
        return []
    return [sorted_items[t * (m - 1) // count] for t in range(count + 1)]


def block_partition(data: Sequence[Any], parts: int) -> list[list[Any]]:
    base, extra = divmod(len(data), parts)
    out, pos = [], 0
    for i in range(parts):
        size = base + (1 if i < extra else 0)
        out.append(list(data[pos : pos + size]))
        pos += size
    return out


class PsrsBsp(BspProgram):
    """Four supersteps: local sort and sampling, splitter selection on
    processor 0, bucket exchange, final merge.

    Elements travel as ``(value, source, index)`` so duplicates still split
    evenly across buckets.
    """

    def init_state(self, pid, local_input):
        return {"data": list(local_input)}

    def superstep(self, proc: Processor, state):
        p, s = proc.nprocs, proc.superstep
        if s == 1:
            data = sorted(state["data"])
            proc.count_op(sort_cost(len(data)))
            tagged = [(x, proc.pid, i) for i, x in enumerate(data)]
            samples = regular_samples(tagged, p)
            proc.count_op(len(samples))
            proc.send(0, tuple(samples), size=max(1, len(samples)))
            proc.retain(len(tagged))
            return {"data": tagged}
        if s == 2:
            if proc.pid == 0:
                samples = sorted(x for m in proc.inbox for x in m.payload)
                proc.count_op(sort_cost(len(samples)))
                splitters = tuple(regular_samples(samples, p)[1:p])
                for dest in range(p):
                    proc.send(dest, splitters, size=max(1, len(splitters)))
            proc.retain(len(state["data"]))
            return state
        if s == 3:
            splitters = proc.inbox[0].payload
            data = state["data"]
            cuts = [0] + [bisect_right(data, sp) for sp in splitters] + [len(data)]
            proc.count_op(len(splitters) * max(1, len(data)).bit_length())
            for dest in range(p):
                bucket = data[cuts[dest] : cuts[dest + 1]]
                if bucket:
                    proc.send(dest, tuple(bucket), size=len(bucket))
            return {"data": []}
        runs = [m.payload for m in proc.inbox]
        merged = list(heapq.merge(*runs))
        proc.count_op(len(merged) * max(0, len(runs) - 1).bit_length())
        proc.vote_halt()
        return {"data": [x for x, _, _ in merged]}

    def output(self, pid, state):
        return state["data"]

    def collect(self, outputs: Sequence[list]) -> list:
        return [x for out in outputs for x in out]


def psrs_bsp(data: Sequence[Any], p: int) -> BspJob:
    if p < 1:
        raise ValueError("p must be >= 1")
    if len(data) < p * p:
        raise ValueError(f"PSRS needs n >= p^2 ({len(data)} < {p * p}); use a smaller p")
    return BspJob(PsrsBsp(), block_partition(data, p), BSP_DESCRIPTOR)


SAMPLE_KEY = (0,)


class PsrsMr(MrProgram):
    """Round 1 samples and carries the data forward; round 2 range-partitions
    on the chosen splitters and lets the shuffle sort do the rest."""

    def __init__(self, r: int):
        self.r = r
        self.splitters: tuple | None = None

    def map(self, ctx: TaskContext, key, value):
        if ctx.round == 1:
            block = sorted(value)
            ctx.count_op(sort_cost(len(block)))
            for sample in regular_samples(block, self.r):
                yield SAMPLE_KEY, sample
            yield (1, key[1]), tuple(block)
        elif key != SAMPLE_KEY:
            for x in value:
                yield x, x

    def prepare_round(self, round):
        if round == 1:
            self.splitters = None

    def partition(self, key, n_reduce):
        if self.splitters is None:
            return 0 if key == SAMPLE_KEY else key[1] % n_reduce
        return bisect_right(self.splitters, key)

    def reduce(self, ctx: TaskContext, key, values):
        if ctx.round == 1:
            if key == SAMPLE_KEY:
                samples = sorted(values)
                ctx.count_op(sort_cost(len(samples)))
                yield SAMPLE_KEY, tuple(regular_samples(samples, self.r))
            else:
                for v in values:
                    yield key, v
        else:
            ctx.count_op(len(values))
            for v in values:
                yield key, v

    def next_round(self, round, output):
        if round == 1:
            secondary = next(v for k, v in output if k == SAMPLE_KEY)
            self.splitters = tuple(secondary[1:-1])
            return True
        return False

    def collect(self, output: Sequence[KVPair]) -> list:
        return [v for _, v in output]


def psrs_mr(data: Sequence[Any], q: int, r: int) -> MrJob:
    if q < r:
        raise ValueError(f"PSRS on MapReduce assumes q >= r (q={q}, r={r})")
    if len(data) < q * (r + 1):
        raise ValueError(f"need n >= q*(r+1) = {q * (r + 1)}, got {len(data)}")
    blocks = block_partition(data, q)
    pairs = [KVPair((1, i), tuple(b)) for i, b in enumerate(blocks)]
    return MrJob(PsrsMr(r), pairs, MR_DESCRIPTOR)
