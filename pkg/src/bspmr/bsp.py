"""Barrier-synchronised execution of BSP programs on ``p`` simulated processors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .core import BspCostLedger, MachineConfig, SimulationError, SuperstepRecord, value_units

DEFAULT_MAX_SUPERSTEPS = 10_000


@dataclass(frozen=True)
class Message:
    src: int
    dest: int
    seq: int
    payload: Any
    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("message size must be at least one unit")


class Processor:
    """Per-superstep view a BSP program gets of its processor.

    A fresh instance is handed to every ``superstep`` call. ``inbox`` holds the
    messages addressed to this processor in the previous superstep, ordered by
    (sender, send sequence).
    """

    def __init__(self, pid: int, nprocs: int, superstep: int, inbox: list[Message]):
        self.pid = pid
        self.nprocs = nprocs
        self.superstep = superstep
        self.inbox = inbox
        self.outbox: list[Message] = []
        self.ops = 0
        self.retained = 0
        self.halted = False

    def send(self, dest: int, payload: Any, size: int | None = None) -> None:
        if not 0 <= dest < self.nprocs:
            raise SimulationError(
                f"processor {self.pid} sent to {dest} in superstep {self.superstep}; "
                f"valid destinations are [0, {self.nprocs})"
            )
        if size is None:
            size = max(1, value_units(payload))
        self.outbox.append(Message(self.pid, dest, len(self.outbox), payload, size))

    def count_op(self, units: int = 1) -> None:
        self.ops += units

    def retain(self, units: int) -> None:
        """Declare local data kept past this superstep's barrier."""
        self.retained += units

    def vote_halt(self) -> None:
        self.halted = True

    @property
    def received_units(self) -> int:
        return sum(m.size for m in self.inbox)

    @property
    def sent_units(self) -> int:
        return sum(m.size for m in self.outbox)


def count_op(proc: Processor, units: int = 1) -> None:
    proc.count_op(units)


class BspProgram:
    """Base class for BSP programs.

    Subclasses implement :meth:`superstep`; everything else has a usable
    default. Programs must be deterministic functions of their arguments.
    """

    def init_state(self, pid: int, local_input: Any) -> Any:
        return local_input

    def superstep(self, proc: Processor, state: Any) -> Any:
        raise NotImplementedError

    def output(self, pid: int, state: Any) -> Any:
        return state

    def input_units(self, local_input: Any) -> int:
        return value_units(local_input)

    def output_units(self, local_output: Any) -> int:
        return value_units(local_output)


@dataclass
class BspResult:
    outputs: list[Any]
    ledger: BspCostLedger
    messages: list[tuple[int, int, int, int, int]] = field(default_factory=list)
    """Message log entries: (superstep, src, dest, seq, size)."""


def run_bsp(
    program: BspProgram,
    inputs: Sequence[Any],
    config: MachineConfig | None = None,
    *,
    max_supersteps: int = DEFAULT_MAX_SUPERSTEPS,
) -> BspResult:
    """Run ``program`` with one input partition per processor.

    The run stops after the first superstep in which every processor voted to
    halt and no message was sent. Input is charged to superstep 1's incoming
    volume and output to the final superstep's outgoing volume; both records
    are flagged so ``H_n`` can exclude them.
    """
    p = len(inputs)
    if config is not None and config.p != p:
        raise ValueError(f"expected {config.p} input partitions, got {p}")
    if p < 1:
        raise ValueError("need at least one processor")

    states = [program.init_state(pid, inputs[pid]) for pid in range(p)]
    input_units = [program.input_units(x) for x in inputs]
    inboxes: list[list[Message]] = [[] for _ in range(p)]
    ledger = BspCostLedger()
    log: list[tuple[int, int, int, int, int]] = []

    s = 0
    while True:
        s += 1
        if s > max_supersteps:
            raise SimulationError(f"no global halt after {max_supersteps} supersteps")
        procs = []
        for pid in range(p):
            proc = Processor(pid, p, s, inboxes[pid])
            states[pid] = program.superstep(proc, states[pid])
            procs.append(proc)

        h_in = [proc.received_units for proc in procs]
        h_out = [proc.sent_units for proc in procs]
        if s == 1:
            h_in = [a + b for a, b in zip(h_in, input_units)]

        inboxes = [[] for _ in range(p)]
        for proc in procs:
            for m in proc.outbox:
                inboxes[m.dest].append(m)
                log.append((s, m.src, m.dest, m.seq, m.size))
        # senders are visited in pid order, so each inbox is already sorted by (src, seq)

        done = all(proc.halted for proc in procs) and not any(inboxes)
        outputs = None
        if done:
            outputs = [program.output(pid, states[pid]) for pid in range(p)]
            h_out = [a + program.output_units(o) for a, o in zip(h_out, outputs)]

        ledger.append(
            SuperstepRecord(
                w=max(proc.ops for proc in procs),
                h_in=max(h_in),
                h_out=max(h_out),
                f=max(proc.retained for proc in procs),
                is_input_read=s == 1,
                is_output_write=done,
            )
        )
        if done:
            return BspResult(outputs, ledger, log)
