"""Training-record extraction from solved maps, plus its text format.

Each record captures one step of the optimal path: where the agent
stands, what it senses, and which move the baseline planner took next.
The move is stored as an index into ``model.moves(dims)`` so a record
sequence can be replayed into the exact path it was cut from.

File format: a tab-separated line per record under a header line.
Boolean fields are written as ``<e1>x<e2>[x<e3>]:<bits>`` with bits in
row-major order; vectors are space-separated; a lone ``-`` marks an
absent optional field. Floats use repr for lossless round trips.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .grid import Cell, GridMap, MoveModel, euclidean_distance
from .mapgen import ConfigError
from .mapio import ParseError
from .planners.graph import astar

DATASET_FIELDS = (
    "distance_to_goal",
    "direction_to_goal",
    "global_obstacle_map",
    "local_view",
    "agent_position",
    "label",
)


@dataclass(frozen=True, eq=False)
class TrainingRecord:
    distance_to_goal: float
    direction_to_goal: Tuple[float, ...]
    global_obstacle_map: np.ndarray
    local_view: Optional[np.ndarray]
    agent_position: Cell
    label: int


def _window(occ: np.ndarray, center: Cell, radius: int) -> np.ndarray:
    """Local occupancy around ``center``; cells beyond the map edge read
    as obstacles."""
    k = 2 * radius + 1
    view = np.ones((k,) * occ.ndim, dtype=bool)
    src = []
    dst = []
    for axis, c in enumerate(center):
        lo = max(0, c - radius)
        hi = min(occ.shape[axis], c + radius + 1)
        src.append(slice(lo, hi))
        dst.append(slice(lo - (c - radius), hi - (c - radius)))
    view[tuple(dst)] = occ[tuple(src)]
    return view


def label_dataset(
    grid: GridMap,
    local_view_radius: Optional[int],
    model: MoveModel = MoveModel(),
) -> List[TrainingRecord]:
    """One record per transition of the optimal path; empty when the
    goal is unreachable."""
    if local_view_radius is not None and local_view_radius < 0:
        raise ConfigError("local_view_radius must be non-negative")
    outcome = astar(grid, model)
    if not outcome.success:
        return []
    moves = model.moves(grid.dims)
    move_index = {m: i for i, m in enumerate(moves)}
    occ = grid.occupancy
    goal = grid.goal
    records = []
    cells = outcome.path.cells
    for here, there in zip(cells, cells[1:]):
        delta = tuple(b - a for a, b in zip(here, there))
        dist = euclidean_distance(here, goal)
        direction = tuple((g - c) / dist for c, g in zip(here, goal))
        records.append(
            TrainingRecord(
                distance_to_goal=dist,
                direction_to_goal=direction,
                global_obstacle_map=occ,
                local_view=(
                    None
                    if local_view_radius is None
                    else _window(occ, here, local_view_radius)
                ),
                agent_position=here,
                label=move_index[delta],
            )
        )
    return records


def augment_dataset(
    records: Sequence[TrainingRecord],
    extra_features: Iterable[str],
    *,
    local_view_radius: int = 1,
) -> List[TrainingRecord]:
    """Fill in requested features that are absent; everything already
    present is passed through untouched, so the call is idempotent."""
    wanted = set(extra_features)
    unknown = wanted - set(DATASET_FIELDS)
    if unknown:
        raise ConfigError(f"unknown dataset features: {sorted(unknown)}")
    records = list(records)
    for r in records[1:]:
        if not np.array_equal(r.global_obstacle_map, records[0].global_obstacle_map):
            raise ConfigError("records must all come from one map")
    if "local_view" not in wanted:
        return records
    if local_view_radius < 0:
        raise ConfigError("local_view_radius must be non-negative")
    out = []
    for r in records:
        if r.local_view is None:
            view = _window(r.global_obstacle_map, r.agent_position, local_view_radius)
            r = replace(r, local_view=view)
        out.append(r)
    return out


def _bits(field: np.ndarray) -> str:
    shape = "x".join(str(s) for s in field.shape)
    body = "".join("1" if v else "0" for v in field.reshape(-1))
    return f"{shape}:{body}"


def _parse_bits(token: str, what: str, line: int) -> np.ndarray:
    head, sep, body = token.partition(":")
    if not sep:
        raise ParseError(f"{what} needs a <shape>:<bits> value", line=line)
    try:
        shape = tuple(int(t) for t in head.split("x"))
    except ValueError:
        raise ParseError(f"{what} has a malformed shape", line=line) from None
    size = int(np.prod(shape)) if shape else 0
    if len(shape) not in (2, 3) or any(s <= 0 for s in shape):
        raise ParseError(f"{what} has a malformed shape", line=line)
    if len(body) != size or set(body) - {"0", "1"}:
        raise ParseError(f"{what} bits do not match its shape", line=line)
    flat = np.frombuffer(body.encode(), dtype=np.uint8) == ord("1")
    return flat.reshape(shape)


def save_dataset(records: Sequence[TrainingRecord]) -> str:
    lines = ["\t".join(DATASET_FIELDS)]
    for r in records:
        lines.append(
            "\t".join(
                (
                    repr(r.distance_to_goal),
                    " ".join(repr(v) for v in r.direction_to_goal),
                    _bits(r.global_obstacle_map),
                    "-" if r.local_view is None else _bits(r.local_view),
                    " ".join(str(c) for c in r.agent_position),
                    str(r.label),
                )
            )
        )
    return "\n".join(lines) + "\n"


def load_dataset(text: str) -> List[TrainingRecord]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    if not lines or lines[0] != "\t".join(DATASET_FIELDS):
        raise ParseError("bad or missing dataset header", line=1)
    records = []
    for i, raw in enumerate(lines[1:], start=2):
        parts = raw.split("\t")
        if len(parts) != len(DATASET_FIELDS):
            raise ParseError(
                f"expected {len(DATASET_FIELDS)} fields, got {len(parts)}", line=i
            )
        dist_s, direction_s, global_s, view_s, pos_s, label_s = parts
        try:
            dist = float(dist_s)
            direction = tuple(float(v) for v in direction_s.split())
            position = tuple(int(v) for v in pos_s.split())
            label = int(label_s)
        except ValueError:
            raise ParseError("malformed numeric field", line=i) from None
        global_map = _parse_bits(global_s, "global_obstacle_map", i)
        view = None if view_s == "-" else _parse_bits(view_s, "local_view", i)
        if len(direction) != global_map.ndim or len(position) != global_map.ndim:
            raise ParseError("field dimensionality mismatch", line=i)
        records.append(
            TrainingRecord(
                distance_to_goal=dist,
                direction_to_goal=direction,
                global_obstacle_map=global_map,
                local_view=view,
                agent_position=position,
                label=label,
            )
        )
    return records
