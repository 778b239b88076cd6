"""Seeded workload generation and the plain-text input formats.

All randomness comes from a Philox counter-based generator so the same seed
yields the same workload on every platform.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

Graph = dict[int, list[int]]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_ints(n: int, seed: int, low: int = 0, high: int = 2**31) -> list[int]:
    return [int(x) for x in make_rng(seed).integers(low, high, size=n)]


def random_matrix(n: int, seed: int, low: int = -9, high: int = 10) -> np.ndarray:
    return make_rng(seed).integers(low, high, size=(n, n), dtype=np.int64)


def random_graph(n: int, seed: int, edge_prob: float = 0.05, connected: bool = True) -> Graph:
    """Erdős–Rényi G(n, edge_prob), optionally unioned with a random spanning tree."""
    rng = make_rng(seed)
    upper = np.triu(rng.random((n, n)) < edge_prob, k=1)
    if connected and n > 1:
        parents = (rng.random(n - 1) * np.arange(1, n)).astype(np.int64)
        upper[parents, np.arange(1, n)] = True
    sym = upper | upper.T
    return {v: [int(u) for u in np.flatnonzero(sym[v])] for v in range(n)}


def path_graph(n: int) -> Graph:
    return {v: [u for u in (v - 1, v + 1) if 0 <= u < n] for v in range(n)}


def regular_graph(n: int, k: int, seed: int) -> Graph:
    """A ``k``-regular circulant graph (``k`` even) with randomly permuted labels."""
    if k % 2 or k >= n:
        raise ValueError("need even k < n")
    perm = make_rng(seed).permutation(n)
    graph: Graph = {int(v): [] for v in perm}
    for i in range(n):
        for off in range(1, k // 2 + 1):
            a, b = int(perm[i]), int(perm[(i + off) % n])
            graph[a].append(b)
            graph[b].append(a)
    return {v: sorted(nbrs) for v, nbrs in sorted(graph.items())}


def write_ints(values: Iterable[int], fh: TextIO) -> None:
    for v in values:
        fh.write(f"{v}\n")


def read_ints(path: str | Path) -> list[int]:
    with open(path) as fh:
        return [int(line) for line in fh if line.strip()]


def write_matrix_csv(m: np.ndarray, fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    for row in m:
        writer.writerow(int(x) for x in row)


def read_matrix_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[int(x) for x in row] for row in csv.reader(fh) if row]
    m = np.array(rows, dtype=np.int64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{path}: expected a square matrix, got shape {m.shape}")
    return m


def write_edge_list(graph: Graph, fh: TextIO) -> None:
    for v in sorted(graph):
        if not graph[v]:
            fh.write(f"{v}\n")
        for u in graph[v]:
            if v < u:
                fh.write(f"{v} {u}\n")


def read_edge_list(path: str | Path) -> Graph:
    """``u v`` per line; a lone ``v`` declares an isolated vertex; ``#`` starts a comment."""
    graph: dict[int, set[int]] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            fields = line.split("#", 1)[0].split()
            if not fields:
                continue
            if len(fields) > 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {line.strip()!r}")
            ids = [int(x) for x in fields]
            for v in ids:
                graph.setdefault(v, set())
            if len(ids) == 2 and ids[0] != ids[1]:
                graph[ids[0]].add(ids[1])
                graph[ids[1]].add(ids[0])
    return {v: sorted(nbrs) for v, nbrs in sorted(graph.items())}


def random_matrix_pair(n: int, seed: int, low: int = -9, high: int = 10) -> tuple[np.ndarray, np.ndarray]:
    rng = make_rng(seed)
    a = rng.integers(low, high, size=(n, n), dtype=np.int64)
    b = rng.integers(low, high, size=(n, n), dtype=np.int64)
    return a, b


def random_words(n: int, seed: int, vocabulary: int = 64) -> list[str]:
    return [f"w{int(i)}" for i in make_rng(seed).integers(0, vocabulary, size=n)]
