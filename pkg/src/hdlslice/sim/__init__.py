"""Cycle-based two-state simulation with per-cycle statement coverage."""

from .codegen import compile_design
from .engine import (
    CoverageTrace,
    CycleResult,
    GoldenTrace,
    SimState,
    Stimulus,
    evaluate_cycle,
    simulate_flip,
    simulate_golden,
)
from .io import (
    load_stimulus,
    read_coverage,
    read_golden,
    read_stimulus,
    write_coverage,
    write_golden,
    write_stimulus,
)

__all__ = [
    "CoverageTrace",
    "CycleResult",
    "GoldenTrace",
    "SimState",
    "Stimulus",
    "compile_design",
    "evaluate_cycle",
    "load_stimulus",
    "read_coverage",
    "read_golden",
    "read_stimulus",
    "simulate_flip",
    "simulate_golden",
    "write_coverage",
    "write_golden",
    "write_stimulus",
]
