"""Block-cube dense matrix multiplication.

The ``n^3`` elementary products form a cube; with ``p = c^3`` processors
each one multiplies one pair of ``b x b`` blocks (``b = n / c``) and the
partial blocks are summed along the shared index.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..bsp import BspProgram, Processor
from ..core import KVPair
from ..mapreduce import MrProgram, PrePartitioned, TaskContext
from .base import BspJob, CostDescriptor, MrJob

BSP_DESCRIPTOR = CostDescriptor(
    bounds={"W": "n^3 / p", "H": "n^2 / p^(2/3)", "S": "1", "F": "n^2 / p", "H_n": "n^2 / p^(2/3)"},
    exponents={"W": 3.0, "H": 2.0, "S": 0.0, "F": 2.0, "H_n": 2.0},
)

MR_DESCRIPTOR = CostDescriptor(
    bounds={"T": "n^3", "C": "n^2 q^(1/3)", "D": "1"},
    exponents={"T": 3.0, "C": 2.0, "D": 0.0},
)


def cube_side(p: int) -> int:
    c = round(p ** (1 / 3))
    if c < 1 or c**3 != p:
        raise ValueError(f"processor count {p} is not a perfect cube")
    return c


def pad_to_multiple(m: np.ndarray, c: int) -> np.ndarray:
    n = m.shape[0]
    size = -(-n // c) * c
    if size == n:
        return m
    out = np.zeros((size, size), dtype=m.dtype)
    out[:n, :n] = m
    return out


def _check_square(A: np.ndarray, B: np.ndarray) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise ValueError(f"need two n x n matrices, got {A.shape} and {B.shape}")


def _block(m: np.ndarray, i: int, j: int, b: int) -> np.ndarray:
    return m[i * b : (i + 1) * b, j * b : (j + 1) * b].copy()


class MatmulBsp(BspProgram):
    """Two supersteps. Processor ``(i, j, k)`` forms ``A[i,j] B[j,k]``, keeps
    slice ``j`` of the product and ships slice ``t`` to ``(i, t, k)``; the
    second superstep sums the slices it owns."""

    def __init__(self, n: int, c: int):
        self.n = n
        self.c = c

    def coords(self, pid: int) -> tuple[int, int, int]:
        c = self.c
        return pid // (c * c), (pid // c) % c, pid % c

    def pid_of(self, i: int, j: int, k: int) -> int:
        return (i * self.c + j) * self.c + k

    def init_state(self, pid, local_input):
        a, b = local_input
        return {"a": a, "b": b}

    def superstep(self, proc: Processor, state):
        i, j, k = self.coords(proc.pid)
        if proc.superstep == 1:
            a, b = state["a"], state["b"]
            v = a @ b
            proc.count_op(2 * a.shape[0] ** 3)
            pieces = np.array_split(v.ravel(), self.c)
            for t, piece in enumerate(pieces):
                if t != j:
                    proc.send(self.pid_of(i, t, k), piece, size=max(1, piece.size))
            proc.retain(pieces[j].size)
            return {"acc": pieces[j]}
        acc = state["acc"].copy()
        for m in proc.inbox:
            acc += m.payload
            proc.count_op(m.payload.size)
        proc.vote_halt()
        return {"acc": acc}

    def output(self, pid, state):
        i, j, k = self.coords(pid)
        return (i, k), j, state["acc"]

    def output_units(self, local_output):
        return local_output[2].size

    def collect(self, outputs: Sequence[tuple]) -> np.ndarray:
        slices: dict[tuple[int, int], list] = {}
        for ik, j, piece in outputs:
            slices.setdefault(ik, []).append((j, piece))
        return _assemble(
            {ik: np.concatenate([pc for _, pc in sorted(parts, key=lambda t: t[0])]) for ik, parts in slices.items()},
            self.n,
            self.c,
        )


def _assemble(flat_blocks: dict[tuple[int, int], np.ndarray], n: int, c: int) -> np.ndarray:
    size = -(-n // c) * c
    b = size // c
    dtype = next(iter(flat_blocks.values())).dtype
    out = np.zeros((size, size), dtype=dtype)
    for (i, k), flat in flat_blocks.items():
        out[i * b : (i + 1) * b, k * b : (k + 1) * b] = flat.reshape(b, b)
    return out[:n, :n]


def matmul_bsp(A, B, p: int) -> BspJob:
    A, B = np.asarray(A), np.asarray(B)
    _check_square(A, B)
    c = cube_side(p)
    n = A.shape[0]
    Ap, Bp = pad_to_multiple(A, c), pad_to_multiple(B, c)
    b = Ap.shape[0] // c
    prog = MatmulBsp(n, c)
    inputs = []
    for pid in range(p):
        i, j, k = prog.coords(pid)
        inputs.append((_block(Ap, i, j, b), _block(Bp, j, k, b)))
    return BspJob(prog, inputs, BSP_DESCRIPTOR)


class MatmulMr(MrProgram):
    """One round. Map task ``(i, j, k)`` multiplies its pair of blocks and
    keys the product by ``(i, k)``; reduce ``(i, k)`` sums along ``j``."""

    def __init__(self, n: int, c: int):
        self.n = n
        self.c = c

    def map(self, ctx: TaskContext, key, value):
        i, j, k = key
        a, b = value
        ctx.count_op(2 * a.shape[0] ** 3)
        yield (i, k), (j, a @ b)

    def partition(self, key, n_reduce):
        i, k = key
        return (i * self.c + k) % n_reduce

    def reduce(self, ctx: TaskContext, key, values):
        parts = sorted(values, key=lambda jv: jv[0])
        total = parts[0][1].copy()
        for _, v in parts[1:]:
            total += v
            ctx.count_op(v.size)
        yield key, total

    def collect(self, output: Sequence[KVPair]) -> np.ndarray:
        return _assemble({k: v.ravel() for k, v in output}, self.n, self.c)


def matmul_mr(A, B, q: int, r: int | None = None) -> MrJob:
    """Round-1 input is pre-partitioned: split ``(i, j, k)`` holds exactly
    the pair ``<(i, j, k); (A[i,j], B[j,k])>``."""
    A, B = np.asarray(A), np.asarray(B)
    _check_square(A, B)
    if r is not None and r != q:
        raise ValueError(f"single-round matmul uses q = r (got q={q}, r={r})")
    c = cube_side(q)
    n = A.shape[0]
    Ap, Bp = pad_to_multiple(A, c), pad_to_multiple(B, c)
    b = Ap.shape[0] // c
    prog = MatmulMr(n, c)
    splits = []
    for i in range(c):
        for j in range(c):
            for k in range(c):
                splits.append([KVPair((i, j, k), (_block(Ap, i, j, b), _block(Bp, j, k, b)))])
    return MrJob(prog, PrePartitioned(splits), MR_DESCRIPTOR)
