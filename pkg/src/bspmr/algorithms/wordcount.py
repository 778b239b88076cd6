from __future__ import annotations

from typing import Iterable, Sequence

from ..core import KVPair
from ..mapreduce import MrProgram, TaskContext
from .base import CostDescriptor, MrJob

DESCRIPTOR = CostDescriptor(bounds={"T": "n", "C": "n", "D": "1"}, exponents={"T": 1.0, "C": 1.0, "D": 0.0})


class WordCount(MrProgram):
    """Values are whitespace-separated text; output is ``<word; count>``."""

    def map(self, ctx: TaskContext, key, value):
        for word in str(value).split():
            ctx.count_op()
            yield word, 1

    def reduce(self, ctx: TaskContext, key, values):
        ctx.count_op(len(values))
        yield key, sum(values)

    def collect(self, output: Sequence[KVPair]) -> dict[str, int]:
        return dict(sorted(output))


def wordcount(tokens: Iterable[str]) -> MrJob:
    return MrJob(WordCount(), [KVPair(i, tok) for i, tok in enumerate(tokens)], DESCRIPTOR)
