from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..bsp import BspProgram
from ..mapreduce import MrProgram, PrePartitioned


@dataclass(frozen=True)
class CostDescriptor:
    """Asymptotic costs an algorithm is expected to exhibit.

    ``exponents`` gives, per measured quantity, the polynomial growth
    exponent in the problem size with the processor count held fixed;
    ``log_factors`` the power of ``log n`` that multiplies it.
    """

    bounds: dict[str, str]
    exponents: dict[str, float]
    log_factors: dict[str, int] = field(default_factory=dict)


@dataclass
class BspJob:
    program: BspProgram
    inputs: list[Any]
    descriptor: CostDescriptor

    @property
    def p(self) -> int:
        return len(self.inputs)


@dataclass
class MrJob:
    program: MrProgram
    input: list[tuple] | PrePartitioned
    descriptor: CostDescriptor
