"""Shared domain types: key/value pairs, machine shape, cost ledgers, estimators.

Cost units are integers throughout. One unit is one key comparison, one
arithmetic operation or one key/value pair moved; payloads add one unit per
8-byte word.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

UNIT_BYTES = 8


class SimulationError(RuntimeError):
    """Raised when a simulated program breaks an engine contract."""


class RegimeWarning(UserWarning):
    """Machine shape lies outside the q > p, r > p regime the cost model assumes."""


class Sized:
    """Wrap a payload with an explicitly declared size in cost units.

    Useful when the Python object carried around is not a faithful picture of
    what would actually be stored or transmitted.
    """

    __slots__ = ("obj", "units")

    def __init__(self, obj: Any, units: int):
        if units < 0:
            raise ValueError("units must be non-negative")
        self.obj = obj
        self.units = int(units)

    def __repr__(self) -> str:
        return f"Sized({self.obj!r}, units={self.units})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Sized) and self.units == other.units and _eq(self.obj, other.obj)

    def __hash__(self) -> int:
        return hash(("Sized", self.units))


def _eq(a: Any, b: Any) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return bool(np.array_equal(a, b))
    return a == b


def value_units(value: Any) -> int:
    """Size of a payload in 8-byte words.

    Byte and text sequences count ``ceil(len / 8)``; scalars count one word;
    arrays count ``ceil(nbytes / 8)``; containers count the sum of their
    elements; ``None`` is free.
    """
    if value is None:
        return 0
    if isinstance(value, Sized):
        return value.units
    if isinstance(value, (bytes, bytearray, memoryview, str)):
        return -(-len(value) // UNIT_BYTES)
    if isinstance(value, bool):
        return 1
    if isinstance(value, int):
        return max(1, -(-value.bit_length() // 64))
    if isinstance(value, (float, np.generic)):
        return 1
    if isinstance(value, np.ndarray):
        return -(-value.nbytes // UNIT_BYTES)
    if isinstance(value, dict):
        return sum(value_units(k) + value_units(v) for k, v in value.items())
    if isinstance(value, (tuple, list, set, frozenset)):
        return sum(value_units(v) for v in value)
    raise TypeError(f"cannot size payload of type {type(value).__name__}")


class KVPair(NamedTuple):
    """A ``<key; value>`` pair. Keys must be mutually comparable within a run."""

    key: Any
    value: Any

    @property
    def units(self) -> int:
        return 1 + value_units(self.value)


def pair_units(pair: tuple) -> int:
    return 1 + value_units(pair[1])


@dataclass(frozen=True)
class MachineConfig:
    """Simulated cluster shape: processors, network parameters, task counts."""

    p: int = 4
    g: float = 1
    l: float = 10
    q: int = 8
    r: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.p < 1 or self.q < 1 or self.r < 1:
            raise ValueError(f"p, q and r must be >= 1 (got p={self.p}, q={self.q}, r={self.r})")
        if self.g < 0 or self.l < 0:
            raise ValueError("g and l must be non-negative")
        if self.q <= self.p or self.r <= self.p:
            warnings.warn(
                f"q={self.q}, r={self.r} not both greater than p={self.p}",
                RegimeWarning,
                stacklevel=3,
            )

    def replace(self, **changes: Any) -> "MachineConfig":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            fields = {**self.__dict__, **changes}
            return MachineConfig(**fields)


@dataclass(frozen=True)
class SuperstepRecord:
    w: int
    h_in: int
    h_out: int
    f: int = 0
    is_input_read: bool = False
    is_output_write: bool = False

    def __post_init__(self) -> None:
        if min(self.w, self.h_in, self.h_out, self.f) < 0:
            raise ValueError("superstep costs must be non-negative")

    @property
    def h(self) -> int:
        return self.h_in + self.h_out


@dataclass
class BspCostLedger:
    """Append-only per-superstep cost records with derived BSP/BSPMR totals."""

    records: list[SuperstepRecord] = field(default_factory=list)

    def append(self, record: SuperstepRecord) -> None:
        self.records.append(record)

    @property
    def W(self) -> int:
        return sum(r.w for r in self.records)

    @property
    def H(self) -> int:
        return sum(r.h for r in self.records)

    @property
    def S(self) -> int:
        return len(self.records)

    @property
    def F(self) -> int:
        return sum(r.f for r in self.records)

    @property
    def H_n(self) -> int:
        """H without the input read and output write contributions."""
        excluded = sum(r.h_in for r in self.records if r.is_input_read)
        excluded += sum(r.h_out for r in self.records if r.is_output_write)
        return self.H - excluded

    def totals(self) -> dict[str, int]:
        return {"W": self.W, "H": self.H, "S": self.S, "F": self.F, "H_n": self.H_n}

    def to_dict(self) -> dict:
        return {
            **self.totals(),
            "supersteps": [
                {
                    "w": r.w,
                    "h_in": r.h_in,
                    "h_out": r.h_out,
                    "f": r.f,
                    "is_input_read": r.is_input_read,
                    "is_output_write": r.is_output_write,
                }
                for r in self.records
            ],
        }


@dataclass(frozen=True)
class RoundRecord:
    map_times: tuple[int, ...]
    reduce_times: tuple[int, ...]
    map_io: tuple[int, ...]
    reduce_io: tuple[int, ...]
    makespan: int = 0

    def __post_init__(self) -> None:
        if len(self.map_times) != len(self.map_io) or len(self.reduce_times) != len(self.reduce_io):
            raise ValueError("time and I/O vectors must align")

    @property
    def R_d(self) -> int:
        return len(self.reduce_times)

    @property
    def T_d(self) -> int:
        return sum(self.map_times) + sum(self.reduce_times)

    @property
    def C_d(self) -> int:
        return sum(self.map_io) + sum(self.reduce_io)


@dataclass
class MrCostLedger:
    """Append-only per-round cost records with totals T, C, D."""

    rounds: list[RoundRecord] = field(default_factory=list)

    def append(self, record: RoundRecord) -> None:
        self.rounds.append(record)

    @property
    def T(self) -> int:
        return sum(r.T_d for r in self.rounds)

    @property
    def C(self) -> int:
        return sum(r.C_d for r in self.rounds)

    @property
    def D(self) -> int:
        return len(self.rounds)

    def totals(self) -> dict[str, int]:
        return {"T": self.T, "C": self.C, "D": self.D}

    def check_compute_dominates(self) -> None:
        if self.T < self.C:
            raise SimulationError(f"cost model assumption T >= C broken: T={self.T}, C={self.C}")

    def to_dict(self) -> dict:
        return {
            **self.totals(),
            "rounds": [
                {
                    "T_d": r.T_d,
                    "C_d": r.C_d,
                    "R_d": r.R_d,
                    "makespan": r.makespan,
                    "map_times": list(r.map_times),
                    "reduce_times": list(r.reduce_times),
                    "map_io": list(r.map_io),
                    "reduce_io": list(r.reduce_io),
                }
                for r in self.rounds
            ],
        }


@dataclass(frozen=True)
class TaskTrace:
    task_id: int
    kind: str
    round: int
    t: int
    c: int
    worker: int
    start: int
    finish: int

    def __post_init__(self) -> None:
        if self.finish != self.start + self.t:
            raise ValueError("finish must equal start + t")


def estimate_bsp_time(ledger: BspCostLedger, g: float, l: float) -> float:
    return ledger.W + ledger.H * g + ledger.S * l


def estimate_mr_time(ledger: MrCostLedger, g: float, l: float) -> float:
    return ledger.T + ledger.C * g + ledger.D * l


def estimate_bspmr_on_mr_time(ledger: BspCostLedger, g: float, l: float) -> float:
    """BSP time with retained local data charged as extra communication."""
    return ledger.W + (ledger.H + ledger.F) * g + ledger.S * l


def sort_cost(m: int) -> int:
    """Comparison units charged for sorting ``m`` items: ``m * ceil(log2 m)``."""
    return m * (m - 1).bit_length() if m > 1 else 0

