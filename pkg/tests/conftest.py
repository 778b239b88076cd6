import warnings

import pytest

from bspmr import BspProgram, MrProgram
from bspmr.core import RegimeWarning


class Ping(BspProgram):
    """Processor 0 sends one unit to processor 1; everyone halts in superstep 2."""

    def init_state(self, pid, local_input):
        return {"got": []}

    def superstep(self, proc, state):
        if proc.superstep == 1 and proc.pid == 0:
            proc.send(1, "ping", size=1)
        if proc.superstep == 2:
            state = {"got": [m.payload for m in proc.inbox]}
            proc.vote_halt()
        return state

    def output(self, pid, state):
        return state["got"]

    def input_units(self, local_input):
        return 0


class Chatter(BspProgram):
    """Sends a seeded pattern of messages for a fixed number of supersteps."""

    def __init__(self, pattern, rounds):
        self.pattern = pattern  # pattern[s][src] -> list of (dest, size)
        self.rounds = rounds

    def init_state(self, pid, local_input):
        return {"received": []}

    def superstep(self, proc, state):
        state["received"].extend((m.src, m.size) for m in proc.inbox)
        s = proc.superstep
        if s <= self.rounds:
            for dest, size in self.pattern[s - 1][proc.pid]:
                proc.send(dest, (proc.pid, s), size=size)
        else:
            proc.vote_halt()
        return state

    def output(self, pid, state):
        return state["received"]

    def input_units(self, local_input):
        return 0


class TwoRound(MrProgram):
    """Identity map and reduce for two rounds."""

    def next_round(self, round, output):
        return round < 2


@pytest.fixture
def ping():
    return Ping()


@pytest.fixture(autouse=True)
def _quiet_regime():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
