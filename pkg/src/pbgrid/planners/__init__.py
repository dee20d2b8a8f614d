"""Planner implementations and the by-name registry.

Every planner is registered under a canonical name (``astar``, ``d-rrt``,
``bug2``, ...) together with the set of parameters it accepts, so the
benchmark harness and the command line can construct runs uniformly:
``resolve_planner(name).run(grid, model, seed, overrides)``.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple

from pbgrid.grid import GridMap, MoveModel
from pbgrid.mapgen import ConfigError
from pbgrid.planners.base import PlanOutcome, SearchTrace
from pbgrid.planners.graph import astar, dijkstra, dump_trace, wavefront
from pbgrid.planners.local import PotentialParams, bug1, bug2, potential_field
from pbgrid.planners.sampling import (
    SamplerParams,
    d_rrt,
    d_rrt_connect,
    d_rrt_star,
    d_rt,
    d_sprm,
    discrete_line,
    dump_tree,
    grid_steer,
)

__all__ = [
    "PlanOutcome",
    "SearchTrace",
    "PlannerEntry",
    "available_planners",
    "resolve_planner",
    "astar",
    "dijkstra",
    "wavefront",
    "dump_trace",
    "dump_tree",
    "discrete_line",
    "grid_steer",
    "SamplerParams",
    "PotentialParams",
    "d_rrt",
    "d_rt",
    "d_rrt_connect",
    "d_rrt_star",
    "d_sprm",
    "bug1",
    "bug2",
    "potential_field",
]

# Convenience spellings accepted on the command line.
_NAME_ALIASES = {
    "rrt": "d-rrt",
    "rt": "d-rt",
    "rrt-connect": "d-rrt-connect",
    "rrt-star": "d-rrt-star",
    "sprm": "d-sprm",
    "pf": "potential-field",
}

_PARAM_ALIASES = {"step": "step_cells"}


@dataclass(frozen=True)
class PlannerEntry:
    """One registry row: canonical name, family, and the accepted knobs."""

    name: str
    kind: str                       # "graph" | "sampling" | "local"
    params: Mapping[str, type]      # override key -> value type (for coercion)
    _call: Callable[[GridMap, MoveModel, int, Dict[str, object]], PlanOutcome]

    def run(
        self,
        grid: GridMap,
        model: MoveModel,
        seed: int = 0,
        overrides: Optional[Mapping[str, object]] = None,
    ) -> PlanOutcome:
        cleaned: Dict[str, object] = {}
        for key, value in dict(overrides or {}).items():
            key = _PARAM_ALIASES.get(key, key)
            if key not in self.params:
                allowed = ", ".join(sorted(self.params)) or "none"
                raise ConfigError(
                    f"planner {self.name!r} does not accept parameter {key!r}"
                    f" (accepted: {allowed})"
                )
            cleaned[key] = value
        return self._call(grid, model, seed, cleaned)


def _graph_call(fn):
    def call(grid, model, seed, overrides):
        return fn(grid, model)

    return call


def _sampling_call(fn):
    def call(grid, model, seed, overrides):
        try:
            params = SamplerParams(seed=seed, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return fn(grid, model, params)

    return call


def _bug_call(fn):
    def call(grid, model, seed, overrides):
        step_limit = overrides.get("step_limit")
        follow_left = bool(overrides.get("follow_left", True))
        return fn(grid, model, step_limit, follow_left=follow_left)

    return call


def _potential_call(grid, model, seed, overrides):
    try:
        params = PotentialParams(**overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return potential_field(grid, model, params)


_RRT_PARAMS = {"max_samples": int, "step_cells": int, "goal_bias": float}
_BUG_PARAMS = {"step_limit": int, "follow_left": bool}

_REGISTRY: Dict[str, PlannerEntry] = {
    entry.name: entry
    for entry in (
        PlannerEntry("astar", "graph", {}, _graph_call(astar)),
        PlannerEntry("dijkstra", "graph", {}, _graph_call(dijkstra)),
        PlannerEntry("wavefront", "graph", {}, _graph_call(wavefront)),
        PlannerEntry("d-rrt", "sampling", dict(_RRT_PARAMS), _sampling_call(d_rrt)),
        PlannerEntry("d-rt", "sampling", dict(_RRT_PARAMS), _sampling_call(d_rt)),
        PlannerEntry(
            "d-rrt-connect",
            "sampling",
            {"max_samples": int, "step_cells": int},
            _sampling_call(d_rrt_connect),
        ),
        PlannerEntry(
            "d-rrt-star",
            "sampling",
            dict(_RRT_PARAMS, rewire_radius=float),
            _sampling_call(d_rrt_star),
        ),
        PlannerEntry(
            "d-sprm",
            "sampling",
            {"prm_nodes": int, "prm_radius": float},
            _sampling_call(d_sprm),
        ),
        PlannerEntry("bug1", "local", dict(_BUG_PARAMS), _bug_call(bug1)),
        PlannerEntry("bug2", "local", dict(_BUG_PARAMS), _bug_call(bug2)),
        PlannerEntry(
            "potential-field",
            "local",
            {
                "k_att": float,
                "k_rep": float,
                "influence_radius_cells": float,
                "step_limit": int,
            },
            _potential_call,
        ),
    )
}


def available_planners() -> Tuple[str, ...]:
    """Canonical planner names, in registry order."""
    return tuple(_REGISTRY)


def resolve_planner(name: str) -> PlannerEntry:
    """Look up a planner by canonical name or alias.

    Matching is case-insensitive and treats ``_`` like ``-``.  Raises
    KeyError naming the available planners when nothing matches.
    """
    key = name.strip().lower().replace("_", "-")
    key = _NAME_ALIASES.get(key, key)
    if key not in _REGISTRY:
        raise KeyError(
            f"unknown planner {name!r}; available: {', '.join(_REGISTRY)}"
        )
    return _REGISTRY[key]
