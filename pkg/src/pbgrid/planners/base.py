"""Shared planner result types and the nominal memory-accounting scheme."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from pbgrid.grid import Cell, Path

# Failure reasons carried in PlanOutcome so the analyzer can histogram them.
UNREACHABLE = "unreachable"            # complete search exhausted: no path exists
BUDGET_EXHAUSTED = "budget_exhausted"  # sampler ran out of max_samples
ROADMAP_DISCONNECTED = "roadmap_disconnected"  # PRM query found no graph path
LOCAL_MINIMUM = "local_minimum"        # potential field trapped
STEP_LIMIT = "step_limit"              # walk exceeded its step budget

# Nominal per-entry sizes (bytes) for the instrumented memory high-water mark.
# These are documented accounting weights for planner-owned structures, not
# allocator measurements: the metric needs a portable, comparable number.
HEAP_ENTRY_BYTES = 64
DICT_ENTRY_BYTES = 72
SET_ENTRY_BYTES = 32
TREE_NODE_BYTES = 96
WAVE_CELL_BYTES = 8


@dataclass
class SearchTrace:
    """What a planner looked at: expanded cells plus frontier bookkeeping."""

    explored: Set[Cell]
    frontier_peak: int = 0
    step_log: Optional[List[Tuple[Cell, float, float]]] = None


@dataclass
class PlanOutcome:
    """One planner run's raw result; metrics are computed from this."""

    success: bool
    path: Optional[Path]
    trace: SearchTrace
    elapsed_seconds: float
    peak_memory_bytes: int
    terminal_cell: Cell
    failure_reason: Optional[str] = None

    def __post_init__(self):
        if self.success != (self.path is not None):
            raise ValueError("success must hold exactly when a path is present")
        if self.success and self.failure_reason is not None:
            raise ValueError("successful outcome cannot carry a failure reason")
        if self.elapsed_seconds < 0:
            raise ValueError("elapsed_seconds must be >= 0")
