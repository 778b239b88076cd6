"""Plain sequential reference implementations used to check the parallel ones."""

from __future__ import annotations

import math
from collections import Counter, deque
from typing import Any, Iterable, Mapping, Sequence


def sequential_sort(data: Iterable[Any]) -> list:
    return sorted(data)


def merge_sort_comparisons(data: Sequence[Any]) -> int:
    """Number of element comparisons a top-down merge sort makes on ``data``."""
    count = 0

    def sort(xs):
        nonlocal count
        if len(xs) <= 1:
            return list(xs)
        mid = len(xs) // 2
        left, right = sort(xs[:mid]), sort(xs[mid:])
        out, i, j = [], 0, 0
        while i < len(left) and j < len(right):
            count += 1
            if right[j] < left[i]:
                out.append(right[j])
                j += 1
            else:
                out.append(left[i])
                i += 1
        out.extend(left[i:])
        out.extend(right[j:])
        return out

    sort(list(data))
    return count


def matmul_triple_loop(A, B) -> list[list]:
    a = [[int(x) for x in row] for row in A]
    b = [[int(x) for x in row] for row in B]
    n, m, k = len(a), len(b), len(b[0]) if b else 0
    return [[sum(a[i][j] * b[j][col] for j in range(m)) for col in range(k)] for i in range(n)]


def bfs_sequential(graph: Mapping[int, Sequence[int]], root: int) -> dict[int, tuple]:
    """Distances from ``root`` (``inf`` if unreachable) and, for reached
    vertices, the smallest-id neighbour one level closer as parent."""
    dist = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in graph[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    out = {}
    for v in sorted(graph):
        if v not in dist:
            out[v] = (math.inf, None)
        elif v == root:
            out[v] = (0, root)
        else:
            out[v] = (dist[v], min(u for u in graph[v] if dist.get(u) == dist[v] - 1))
    return out


def wordcount_sequential(tokens: Iterable[str]) -> dict[str, int]:
    counts: Counter = Counter()
    for tok in tokens:
        counts.update(str(tok).split())
    return dict(sorted(counts.items()))
