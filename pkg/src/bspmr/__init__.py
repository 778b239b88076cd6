"""Deterministic simulator for BSP and MapReduce computations and their cost models."""

from .bsp import BspProgram, BspResult, Message, Processor, count_op, run_bsp
from .core import (
    BspCostLedger,
    KVPair,
    MachineConfig,
    MrCostLedger,
    RegimeWarning,
    RoundRecord,
    SimulationError,
    Sized,
    SuperstepRecord,
    TaskTrace,
    estimate_bsp_time,
    estimate_bspmr_on_mr_time,
    estimate_mr_time,
    value_units,
)
from .crosssim import simulate_bsp_on_mr, simulate_mr_on_bsp
from .efficiency import EfficiencyReport, check_efficiency
from .mapreduce import MrProgram, PrePartitioned, TaskContext, run_mr, shuffle, split_input
from .scheduling import TooManyTasksError, greedy_schedule, optimal_makespan_bruteforce

__version__ = "0.1.0"
