"""Planners that act on local information only.

The Bug pair walks straight at the goal and slides along obstacle
boundaries on contact; the potential-field planner descends an
artificial energy surface built from the goal distance and an obstacle
repulsion term. None of them see the whole map at once, which keeps
their memory footprint tiny and their paths long.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from ..grid import (
    Cell,
    Connectivity,
    DomainError,
    GridMap,
    MoveModel,
    Path,
    distance_transform,
    euclidean_distance,
    neighbors,
)
from .base import (
    DICT_ENTRY_BYTES,
    LOCAL_MINIMUM,
    SET_ENTRY_BYTES,
    STEP_LIMIT,
    UNREACHABLE,
    WAVE_CELL_BYTES,
    PlanOutcome,
    SearchTrace,
)
from .graph import _require_endpoints, _trivial_outcome
from .sampling import _move_legal, discrete_line

_PROGRESS_EPS = 1e-12

# Traversal log annotations: second float is distance-to-goal (bugs) or
# potential (field descent), third marks the movement mode.
MOTION_TO_GOAL = 0.0
BOUNDARY_FOLLOW = 1.0


def _require_flat(grid: GridMap) -> None:
    if grid.dims != 2:
        raise DomainError("boundary following is only defined on 2-d maps")


def _heading_ring(model: MoveModel) -> Tuple[Tuple[Cell, ...], Dict[Cell, int]]:
    """Model moves ordered counterclockwise starting east, i.e. (0, 1)."""

    def angle(d: Cell) -> float:
        a = math.atan2(-d[0], d[1])
        return a if a >= 0.0 else a + 2.0 * math.pi

    ring = tuple(sorted(model.moves(2), key=angle))
    return ring, {d: i for i, d in enumerate(ring)}


def _step_ok(grid: GridMap, pos: Cell, delta: Cell) -> bool:
    dst = tuple(p + d for p, d in zip(pos, delta))
    return grid.in_bounds(dst) and _move_legal(grid.occupancy, pos, dst)


def _slide(
    grid: GridMap,
    pos: Cell,
    heading: int,
    ring: Tuple[Cell, ...],
    quarter: int,
    left: bool,
) -> Tuple[Optional[Cell], int]:
    """One wall-following move: prefer the sharpest turn toward the wall
    side, falling back through progressively straighter options."""
    n = len(ring)
    for k in range(n):
        cand = (heading + quarter - k) % n if left else (heading - quarter + k) % n
        delta = ring[cand]
        if _step_ok(grid, pos, delta):
            return tuple(p + d for p, d in zip(pos, delta)), cand
    return None, heading


def _walk_outcome(
    grid: GridMap,
    log: List[Tuple[Cell, float, float]],
    failure: Optional[str],
    pos: Cell,
    t0: float,
    extra_bytes: int,
) -> PlanOutcome:
    elapsed = time.perf_counter() - t0
    trace = SearchTrace(
        explored={c for c, _, _ in log}, frontier_peak=0, step_log=log
    )
    memory = len(log) * WAVE_CELL_BYTES + extra_bytes
    if failure is None:
        cells = tuple(c for c, _, _ in log)
        return PlanOutcome(
            success=True,
            path=Path.from_cells(cells),
            trace=trace,
            elapsed_seconds=elapsed,
            peak_memory_bytes=memory,
            terminal_cell=pos,
        )
    return PlanOutcome(
        success=False,
        path=None,
        trace=trace,
        elapsed_seconds=elapsed,
        peak_memory_bytes=memory,
        terminal_cell=pos,
        failure_reason=failure,
    )


def bug1(
    grid: GridMap,
    model: MoveModel = MoveModel(),
    step_limit: Optional[int] = None,
    *,
    follow_left: bool = True,
) -> PlanOutcome:
    """Head for the goal; on contact circle the whole obstacle, then
    come back to the boundary cell closest to the goal and carry on.

    Fails as unreachable when a full circuit finds no boundary cell
    closer to the goal than the contact point.
    """
    _require_endpoints(grid)
    _require_flat(grid)
    if step_limit is not None and step_limit <= 0:
        raise ValueError("step_limit must be positive")
    limit = 10 * grid.free_count if step_limit is None else step_limit
    t0 = time.perf_counter()
    if grid.agent == grid.goal:
        return _trivial_outcome(grid, time.perf_counter() - t0)

    ring, ring_index = _heading_ring(model)
    quarter = len(ring) // 4
    orth = model.connectivity is Connectivity.ORTHOGONAL
    goal = grid.goal
    pos = grid.agent
    log: List[Tuple[Cell, float, float]] = [
        (pos, euclidean_distance(pos, goal), MOTION_TO_GOAL)
    ]
    steps = 0
    peak_states = 0
    failure: Optional[str] = None

    while pos != goal and failure is None:
        # Straight-line pursuit until something blocks the next cell.
        line = discrete_line(pos, goal, orthogonal=orth)
        i = 0
        blocked: Optional[int] = None
        while i + 1 < len(line):
            if _move_legal(grid.occupancy, line[i], line[i + 1]):
                i += 1
                pos = line[i]
                steps += 1
                log.append((pos, euclidean_distance(pos, goal), MOTION_TO_GOAL))
                if pos != goal and steps >= limit:
                    failure = STEP_LIMIT
                    break
            else:
                blocked = ring_index[
                    tuple(b - a for a, b in zip(line[i], line[i + 1]))
                ]
                break
        if failure is not None or pos == goal:
            break
        if blocked is None:
            break  # line walked to its end, pos == goal

        # Full circumnavigation, remembering the closest boundary cell.
        hit = pos
        d_hit = euclidean_distance(hit, goal)
        heading = (blocked - quarter) % len(ring) if follow_left else (
            blocked + quarter
        ) % len(ring)
        episode = [pos]
        best_idx, best_d = 0, d_hit
        seen: Set[Tuple[Cell, int]] = {(pos, heading)}
        while failure is None:
            nxt, heading = _slide(grid, pos, heading, ring, quarter, follow_left)
            if nxt is None:
                failure = UNREACHABLE  # nowhere to move at all
                break
            pos = nxt
            steps += 1
            d = euclidean_distance(pos, goal)
            log.append((pos, d, BOUNDARY_FOLLOW))
            episode.append(pos)
            if pos == goal:
                break
            if steps >= limit:
                failure = STEP_LIMIT
                break
            if d < best_d - _PROGRESS_EPS:
                best_idx, best_d = len(episode) - 1, d
            if (pos, heading) in seen:
                break  # circuit closed
            seen.add((pos, heading))
        peak_states = max(peak_states, len(seen))
        if failure is not None or pos == goal:
            break

        # Retrace our own steps back to the remembered closest cell.
        for j in range(len(episode) - 2, best_idx - 1, -1):
            pos = episode[j]
            steps += 1
            log.append((pos, euclidean_distance(pos, goal), BOUNDARY_FOLLOW))
            if pos == goal:
                break
            if steps >= limit:
                failure = STEP_LIMIT
                break
        if failure is not None or pos == goal:
            break
        if best_d >= d_hit - _PROGRESS_EPS:
            failure = UNREACHABLE  # circled the obstacle without progress
            break

    return _walk_outcome(grid, log, failure, pos, t0, peak_states * SET_ENTRY_BYTES)


def bug2(
    grid: GridMap,
    model: MoveModel = MoveModel(),
    step_limit: Optional[int] = None,
    *,
    follow_left: bool = True,
) -> PlanOutcome:
    """Like bug1 but commits to the original start-goal line: boundary
    following ends at the first cell of that line strictly closer to
    the goal than the contact point.

    Fails as unreachable when boundary following returns to the contact
    point before finding such a cell.
    """
    _require_endpoints(grid)
    _require_flat(grid)
    if step_limit is not None and step_limit <= 0:
        raise ValueError("step_limit must be positive")
    limit = 10 * grid.free_count if step_limit is None else step_limit
    t0 = time.perf_counter()
    if grid.agent == grid.goal:
        return _trivial_outcome(grid, time.perf_counter() - t0)

    ring, ring_index = _heading_ring(model)
    quarter = len(ring) // 4
    orth = model.connectivity is Connectivity.ORTHOGONAL
    goal = grid.goal
    pos = grid.agent
    line = discrete_line(pos, goal, orthogonal=orth)
    index_of = {c: i for i, c in enumerate(line)}
    i = 0
    log: List[Tuple[Cell, float, float]] = [
        (pos, euclidean_distance(pos, goal), MOTION_TO_GOAL)
    ]
    steps = 0
    failure: Optional[str] = None

    while pos != goal and failure is None:
        blocked: Optional[int] = None
        while i + 1 < len(line):
            if _move_legal(grid.occupancy, line[i], line[i + 1]):
                i += 1
                pos = line[i]
                steps += 1
                log.append((pos, euclidean_distance(pos, goal), MOTION_TO_GOAL))
                if pos != goal and steps >= limit:
                    failure = STEP_LIMIT
                    break
            else:
                blocked = ring_index[
                    tuple(b - a for a, b in zip(line[i], line[i + 1]))
                ]
                break
        if failure is not None or pos == goal:
            break
        if blocked is None:
            break

        hit = pos
        d_hit = euclidean_distance(hit, goal)
        heading = (blocked - quarter) % len(ring) if follow_left else (
            blocked + quarter
        ) % len(ring)
        while failure is None:
            nxt, heading = _slide(grid, pos, heading, ring, quarter, follow_left)
            if nxt is None:
                failure = UNREACHABLE
                break
            pos = nxt
            steps += 1
            d = euclidean_distance(pos, goal)
            log.append((pos, d, BOUNDARY_FOLLOW))
            if pos == goal:
                break
            if steps >= limit:
                failure = STEP_LIMIT
                break
            j = index_of.get(pos)
            if j is not None and d < d_hit - _PROGRESS_EPS:
                i = j  # leave event: strictly closer cell on the line
                break
            if pos == hit:
                failure = UNREACHABLE  # came all the way around
                break
        # loop back into line pursuit from index i

    return _walk_outcome(
        grid, log, failure, pos, t0, len(line) * DICT_ENTRY_BYTES
    )


@dataclass(frozen=True)
class PotentialParams:
    """Tuning for the artificial-potential descent.

    ``k_att`` defaults to 1/max(extent)^2 so the attractive term stays
    near unit scale regardless of map size.
    """

    k_att: Optional[float] = None
    k_rep: float = 100.0
    influence_radius_cells: float = 5.0
    step_limit: Optional[int] = None

    def __post_init__(self) -> None:
        if self.k_att is not None and self.k_att <= 0:
            raise ValueError("k_att must be positive")
        if self.k_rep < 0:
            raise ValueError("k_rep must be non-negative")
        if self.influence_radius_cells <= 0:
            raise ValueError("influence_radius_cells must be positive")
        if self.step_limit is not None and self.step_limit <= 0:
            raise ValueError("step_limit must be positive")


def potential_field(
    grid: GridMap,
    model: MoveModel = MoveModel(),
    params: Optional[PotentialParams] = None,
) -> PlanOutcome:
    """Greedy descent of U(c) = k_att*|c-goal|^2 plus a repulsion term
    (1/d - 1/R)^2 inside radius R of the nearest obstacle.

    Moves to the neighbor with the lowest potential as long as that is
    strictly below the current one; otherwise reports a local minimum.
    """
    _require_endpoints(grid)
    p = params if params is not None else PotentialParams()
    limit = 10 * grid.free_count if p.step_limit is None else p.step_limit
    t0 = time.perf_counter()
    if grid.agent == grid.goal:
        return _trivial_outcome(grid, time.perf_counter() - t0)

    field = distance_transform(grid)
    goal = grid.goal
    k_att = p.k_att if p.k_att is not None else 1.0 / max(grid.extent) ** 2
    k_rep = p.k_rep
    radius = p.influence_radius_cells

    def energy(cell: Cell) -> float:
        u = k_att * float(sum((a - b) ** 2 for a, b in zip(cell, goal)))
        if not field.unbounded:
            d = float(field.values[cell])
            if d < radius:
                u += k_rep * (1.0 / d - 1.0 / radius) ** 2
        return u

    pos = grid.agent
    u_cur = energy(pos)
    log: List[Tuple[Cell, float, float]] = [(pos, u_cur, MOTION_TO_GOAL)]
    steps = 0
    failure: Optional[str] = None
    while pos != goal:
        best: Optional[Tuple[float, Cell]] = None
        for nb, _ in neighbors(grid, pos, model):
            u = energy(nb)
            if u < u_cur - _PROGRESS_EPS and (best is None or (u, nb) < best):
                best = (u, nb)
        if best is None:
            failure = LOCAL_MINIMUM
            break
        u_cur, pos = best
        steps += 1
        log.append((pos, u_cur, MOTION_TO_GOAL))
        if pos != goal and steps >= limit:
            failure = STEP_LIMIT
            break

    field_bytes = int(grid.occupancy.size) * 8
    return _walk_outcome(grid, log, failure, pos, t0, field_bytes)
