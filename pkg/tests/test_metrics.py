import math
from pathlib import Path as FilePath

import numpy as np
import pytest

from pbgrid.grid import (
    Connectivity,
    DistanceField,
    GridMap,
    MoveModel,
    Path,
    distance_transform,
)
from pbgrid.mapio import load_native
from pbgrid.metrics import (
    InconsistencyError,
    compute_report,
    obstacle_clearance,
    path_deviation_pct,
    search_space_pct,
    smoothness_deg,
)
from pbgrid.planners.base import PlanOutcome, SearchTrace
from pbgrid.planners.graph import astar, dijkstra

FULL = MoveModel(Connectivity.FULL)
FIXTURE = FilePath(__file__).parent / "fixtures" / "metric_fixture.map"

# Obstacles sit at (2,2), (2,3), (3,2); agent (0,0), goal (4,4).
# Optimal cost on this map is 6 + sqrt(2) (derived by enumerating the
# corner-cut-legal routes around the blob; the diagonal through (3,3)
# is sealed off by its blocked shoulders).
OPTIMAL_COST = 6 + math.sqrt(2)

# A deliberately suboptimal but legal walk used as the golden outcome.
DETOUR = ((0, 0), (1, 1), (1, 2), (1, 3), (1, 4), (2, 5), (3, 4), (4, 4))
DETOUR_COST = 4 + 3 * math.sqrt(2)


def fixture_map() -> GridMap:
    return load_native(FIXTURE.read_text())


def outcome_for(path_cells, elapsed=0.25, memory=2**20):
    path = Path.from_cells(path_cells)
    return PlanOutcome(
        success=True,
        path=path,
        trace=SearchTrace(explored=set(path_cells), frontier_peak=4),
        elapsed_seconds=elapsed,
        peak_memory_bytes=memory,
        terminal_cell=path_cells[-1],
    )


def failed_outcome(terminal, explored=frozenset()):
    return PlanOutcome(
        success=False,
        path=None,
        trace=SearchTrace(explored=set(explored), frontier_peak=0),
        elapsed_seconds=0.1,
        peak_memory_bytes=0,
        terminal_cell=terminal,
        failure_reason="unreachable",
    )


# --- standalone ops -------------------------------------------------------------

def test_deviation_examples():
    assert path_deviation_pct(10.0, 10.0) == 0.0
    assert path_deviation_pct(13.5, 10.0) == 35.0
    with pytest.raises(ValueError):
        path_deviation_pct(1.0, 0.0)


def test_search_space_bounds_and_examples():
    g = fixture_map()
    empty = SearchTrace(explored=set(), frontier_peak=0)
    assert search_space_pct(empty, g) == 0.0
    full = SearchTrace(
        explored={tuple(c) for c in np.argwhere(~g.occupancy)}, frontier_peak=0
    )
    assert search_space_pct(full, g) == 100.0


def test_clearance_on_wall_hugging_path():
    occ = np.zeros((3, 5), dtype=bool)
    occ[0, :] = True
    g = GridMap(occ)
    path = Path.from_cells([(1, c) for c in range(5)])
    assert obstacle_clearance(path, distance_transform(g)) == pytest.approx(1.0)


def test_clearance_undefined_without_obstacles():
    g = GridMap(np.zeros((4, 4), dtype=bool))
    path = Path.from_cells([(0, 0), (1, 1)])
    assert obstacle_clearance(path, distance_transform(g)) is None


def test_clearance_translation_invariance():
    occ = np.zeros((8, 8), dtype=bool)
    occ[2, 2] = True
    cells = [(1, 1), (1, 2), (1, 3)]
    a = obstacle_clearance(Path.from_cells(cells), distance_transform(GridMap(occ)))
    shifted = np.zeros((8, 8), dtype=bool)
    shifted[5, 4] = True
    cells2 = [(c0 + 3, c1 + 2) for c0, c1 in cells]
    b = obstacle_clearance(
        Path.from_cells(cells2), distance_transform(GridMap(shifted))
    )
    assert a == pytest.approx(b, abs=1e-12)


def test_smoothness_examples():
    straight = Path.from_cells([(0, c) for c in range(5)])
    assert smoothness_deg(straight) == 0.0
    stairs = Path.from_cells([(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)])
    assert smoothness_deg(stairs) == pytest.approx(90.0)
    bend = Path.from_cells([(0, 0), (0, 1), (1, 2), (1, 3)])
    assert smoothness_deg(bend) == pytest.approx(45.0)
    assert smoothness_deg(Path.from_cells([(0, 0), (0, 1)])) is None


def test_smoothness_reversal_invariance():
    cells = [(0, 0), (1, 1), (1, 2), (2, 3), (3, 3), (4, 4)]
    fwd = smoothness_deg(Path.from_cells(cells))
    rev = smoothness_deg(Path.from_cells(list(reversed(cells))))
    assert fwd == pytest.approx(rev, abs=1e-12)


# --- distance transform on the committed fixture ---------------------------------

def test_fixture_distance_transform_hand_values():
    field = distance_transform(fixture_map())
    hand = {
        (0, 0): 2 * math.sqrt(2),
        (1, 2): 1.0,
        (4, 0): math.sqrt(5),
        (0, 5): 2 * math.sqrt(2),
        (5, 5): math.sqrt(13),
        (2, 2): 0.0,
    }
    for cell, value in hand.items():
        assert float(field.values[cell]) == pytest.approx(value, abs=1e-9)


# --- compute_report ---------------------------------------------------------------

def test_full_report_golden_values():
    g = fixture_map()
    field = distance_transform(g)
    baseline = astar(g, FULL)
    assert baseline.path.cost == OPTIMAL_COST
    report = compute_report(outcome_for(DETOUR), baseline, g, field)
    assert report.success is True
    assert report.path_length_cells == pytest.approx(DETOUR_COST, abs=1e-9)
    assert report.path_cell_count == 8
    assert report.distance_left_cells == 0.0
    assert report.time_seconds == 0.25
    assert report.path_deviation_pct == pytest.approx(
        100.0 * (2 * math.sqrt(2) - 2) / (6 + math.sqrt(2)), abs=1e-9
    )
    assert report.search_space_pct == pytest.approx(800.0 / 33.0, abs=1e-9)
    assert report.peak_memory_mb == 1.0
    # per-cell nearest obstacles worked out by hand on the 6x6 layout
    assert report.obstacle_clearance_cells == pytest.approx(
        (5 * math.sqrt(2) + 4 + math.sqrt(5)) / 8, abs=1e-9
    )
    assert report.smoothness_deg == pytest.approx(37.5, abs=1e-9)


def test_baseline_against_itself_is_exactly_zero():
    g = fixture_map()
    baseline = astar(g, FULL)
    report = compute_report(baseline, baseline, g, distance_transform(g))
    assert report.path_deviation_pct == 0.0
    assert report.distance_left_cells == 0.0


def test_failed_run_distance_left():
    occ = np.zeros((6, 6), dtype=bool)
    g = GridMap(occ, agent=(3, 4), goal=(0, 0))
    report = compute_report(
        failed_outcome((3, 4)), astar(g, FULL), g, distance_transform(g)
    )
    assert report.success is False
    assert report.distance_left_cells == 5.0
    assert report.path_length_cells is None
    assert report.path_deviation_pct is None
    assert report.smoothness_deg is None


def test_success_against_failed_baseline_is_inconsistent():
    g = fixture_map()
    ok = outcome_for(DETOUR)
    bad = failed_outcome((0, 0))
    with pytest.raises(InconsistencyError):
        compute_report(ok, bad, g, distance_transform(g))


def test_astar_search_space_never_exceeds_dijkstra():
    rng = np.random.default_rng(17)
    for _ in range(40):
        occ = rng.random((12, 12)) < 0.25
        free = np.argwhere(~occ)
        if len(free) < 2:
            continue
        picks = rng.choice(len(free), size=2, replace=False)
        g = GridMap(occ, agent=tuple(free[picks[0]]), goal=tuple(free[picks[1]]))
        a = search_space_pct(astar(g, FULL).trace, g)
        d = search_space_pct(dijkstra(g, FULL).trace, g)
        assert a <= d + 1e-12
