"""Task-to-worker assignment as performed by the MapReduce master."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .core import TaskTrace

BRUTEFORCE_LIMIT = 14


class TooManyTasksError(ValueError):
    pass


@dataclass
class Schedule:
    assignment: list[int]
    makespan: int
    traces: list[TaskTrace]

    def loads(self, p: int) -> list[int]:
        out = [0] * p
        for trace in self.traces:
            out[trace.worker] += trace.t
        return out


def greedy_schedule(
    task_times: Sequence[int],
    p: int,
    *,
    kind: str = "map",
    round: int = 0,
    start: int = 0,
    task_io: Sequence[int] | None = None,
) -> Schedule:
    """List scheduling in task-index order.

    Each task goes to the worker that becomes idle first, lowest worker id on
    ties. ``start`` offsets the virtual clock, e.g. to place a reduce phase
    after its map phase.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if any(t < 0 for t in task_times):
        raise ValueError("task times must be non-negative")
    idle = [(start, w) for w in range(p)]
    assignment = []
    traces = []
    for i, t in enumerate(task_times):
        free_at, w = heapq.heappop(idle)
        assignment.append(w)
        traces.append(
            TaskTrace(
                task_id=i,
                kind=kind,
                round=round,
                t=t,
                c=task_io[i] if task_io is not None else 0,
                worker=w,
                start=free_at,
                finish=free_at + t,
            )
        )
        heapq.heappush(idle, (free_at + t, w))
    makespan = max((tr.finish for tr in traces), default=start) - start
    return Schedule(assignment, makespan, traces)


def optimal_makespan_bruteforce(
    task_times: Sequence[int], p: int, *, limit: int = BRUTEFORCE_LIMIT
) -> int:
    """Exact minimum makespan by exhaustive branch-and-bound search.

    Only sensible for small inputs; above ``limit`` tasks use the greedy
    bound instead.
    """
    if len(task_times) > limit:
        raise TooManyTasksError(
            f"{len(task_times)} tasks exceeds brute-force limit {limit}; "
            "rely on the greedy (2 - 1/p) bound instead"
        )
    times = sorted(task_times, reverse=True)
    if not times:
        return 0
    lower = max(times[0], -(-sum(times) // p))
    best = greedy_schedule(times, p).makespan
    loads = [0] * p

    def search(i: int) -> None:
        nonlocal best
        if best == lower:
            return
        if i == len(times):
            best = min(best, max(loads))
            return
        seen = set()
        for w in range(p):
            # workers with equal load are interchangeable
            if loads[w] in seen:
                continue
            seen.add(loads[w])
            if loads[w] + times[i] >= best:
                continue
            loads[w] += times[i]
            search(i + 1)
            loads[w] -= times[i]

    search(0)
    return best
