"""Level-synchronous breadth-first search.

Vertices are owned by ``vertex mod p`` together with their adjacency lists.
Each superstep settles one BFS level and notifies the owners of the
neighbours of newly settled vertices. A processor sends at most one
notification per target vertex per superstep, naming the smallest-id
parent; every vertex ends up with its smallest-id neighbour on the previous
level as parent.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from ..bsp import BspProgram, Processor
from ..core import KVPair
from ..mapreduce import MrProgram, TaskContext
from .base import BspJob, CostDescriptor, MrJob

Graph = Mapping[int, Sequence[int]]

BSP_DESCRIPTOR = CostDescriptor(
    bounds={"W": "|V|^2 / p", "H": "|V|^2 / p", "S": "d", "F": "|V|^2 / p", "H_n": "|V|"},
    exponents={"W": 2.0, "H": 2.0, "F": 2.0, "H_n": 1.0},
)

INF = math.inf


def owner(v: int, p: int) -> int:
    return v % p


def partition_graph(graph: Graph, p: int) -> list[dict[int, tuple[int, ...]]]:
    parts: list[dict[int, tuple[int, ...]]] = [{} for _ in range(p)]
    for v in sorted(graph):
        parts[owner(v, p)][v] = tuple(sorted(graph[v]))
    return parts


def graph_units(adj: Mapping[int, Sequence[int]]) -> int:
    return sum(1 + len(nbrs) for nbrs in adj.values())


class BfsBsp(BspProgram):
    def __init__(self, root: int):
        self.root = root

    def init_state(self, pid, local_input):
        return {"adj": local_input, "dist": {}, "parent": {}}

    def input_units(self, local_input):
        return graph_units(local_input)

    def superstep(self, proc: Processor, state):
        p, pid = proc.nprocs, proc.pid
        adj, dist, parent = state["adj"], state["dist"], state["parent"]
        level = proc.superstep - 1
        if proc.superstep == 1:
            candidates = [(self.root, self.root)] if self.root in adj else []
        else:
            candidates = sorted(pair for m in proc.inbox for pair in m.payload)

        frontier = []
        for v, par in candidates:
            proc.count_op()
            if v not in dist:
                dist[v] = level
                parent[v] = par
                frontier.append(v)

        notify: list[dict[int, int]] = [{} for _ in range(p)]
        for v in frontier:
            for u in adj[v]:
                proc.count_op()
                dest = owner(u, p)
                if dest == pid and u in dist:
                    continue
                if u not in notify[dest]:
                    notify[dest][u] = v  # frontier is ascending, so v is the smallest parent
        sent = False
        for dest, targets in enumerate(notify):
            if targets:
                proc.send(dest, tuple(sorted(targets.items())), size=len(targets))
                sent = True
        proc.retain(graph_units(adj) + len(adj))
        if not sent:
            proc.vote_halt()
        return state

    def output(self, pid, state):
        return {v: (state["dist"].get(v, INF), state["parent"].get(v)) for v in state["adj"]}

    def output_units(self, local_output):
        return 2 * len(local_output)

    def collect(self, outputs: Sequence[dict]) -> dict[int, tuple]:
        merged = {}
        for out in outputs:
            merged.update(out)
        return dict(sorted(merged.items()))


def bfs_bsp(graph: Graph, root: int, p: int) -> BspJob:
    if root not in graph:
        raise ValueError(f"root {root} is not a vertex of the graph")
    if p < 1:
        raise ValueError("p must be >= 1")
    return BspJob(BfsBsp(root), partition_graph(graph, p), BSP_DESCRIPTOR)


class BfsMr(MrProgram):
    """Iterative MapReduce BFS carrying the whole graph through global memory.

    Records are ``<v; (dist, parent, adjacency, on_frontier)>``; each round
    expands the frontier by one level.
    """

    def map(self, ctx: TaskContext, key, value):
        dist, parent, adj, frontier = value
        yield key, ("node", dist, parent, adj, False)
        if frontier:
            for u in adj:
                ctx.count_op()
                yield u, ("cand", dist + 1, key, (), False)

    def reduce(self, ctx: TaskContext, key, values):
        node = next(v for v in values if v[0] == "node")
        _, dist, parent, adj, _ = node
        frontier = False
        if dist is None:
            cands = [(d, par) for tag, d, par, _, _ in values if tag == "cand"]
            ctx.count_op(len(cands))
            if cands:
                dist, parent = min(cands)
                frontier = True
        yield key, (dist, parent, adj, frontier)

    def next_round(self, round, output):
        return any(v[3] for _, v in output)

    def collect(self, output: Sequence[KVPair]) -> dict[int, tuple]:
        return dict(sorted((k, (INF if v[0] is None else v[0], v[1])) for k, v in output))


def bfs_mr_input(graph: Graph, root: int) -> list[KVPair]:
    if root not in graph:
        raise ValueError(f"root {root} is not a vertex of the graph")
    return [
        KVPair(v, (0, v, tuple(sorted(graph[v])), True) if v == root else (None, None, tuple(sorted(graph[v])), False))
        for v in sorted(graph)
    ]


MR_DESCRIPTOR = CostDescriptor(bounds={"T": "|V| + |E| per round", "C": "|V| + |E| per round", "D": "d"}, exponents={})


def bfs_mr(graph: Graph, root: int) -> MrJob:
    return MrJob(BfsMr(), bfs_mr_input(graph, root), MR_DESCRIPTOR)
