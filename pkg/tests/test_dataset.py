import numpy as np
import pytest

from pbgrid.dataset import (
    TrainingRecord,
    augment_dataset,
    label_dataset,
    load_dataset,
    save_dataset,
)
from pbgrid.grid import Connectivity, GridMap, MoveModel, euclidean_distance
from pbgrid.mapgen import ConfigError, GenConfig, MapType, generate, place_agent_goal
from pbgrid.mapio import ParseError
from pbgrid.planners.graph import astar

FULL = MoveModel(Connectivity.FULL)


def replay(records, model):
    """Oracle: walk the labels from the first position."""
    cells = [records[0].agent_position]
    for r in records:
        assert r.agent_position == cells[-1]
        move = model.moves(len(cells[-1]))[r.label]
        cells.append(tuple(c + d for c, d in zip(cells[-1], move)))
    return tuple(cells)


def solvable_instance(seed):
    cfg = GenConfig(map_type=MapType.BLOCK, extent=(16, 16), seed=seed)
    g = place_agent_goal(generate(cfg), np.random.default_rng(seed))
    return g if astar(g, FULL).success else None


def test_adjacent_goal_yields_one_record():
    g = GridMap(np.zeros((4, 4), dtype=bool), agent=(1, 1), goal=(2, 2))
    records = label_dataset(g, 1, FULL)
    assert len(records) == 1
    r = records[0]
    assert r.agent_position == (1, 1)
    assert FULL.moves(2)[r.label] == (1, 1)
    assert r.distance_to_goal == euclidean_distance((1, 1), (2, 2))
    assert r.direction_to_goal == pytest.approx((1 / 2**0.5, 1 / 2**0.5))


def test_record_count_matches_path_transitions():
    for seed in range(10):
        g = solvable_instance(seed)
        if g is None:
            continue
        records = label_dataset(g, 2, FULL)
        assert len(records) == len(astar(g, FULL).path.cells) - 1


def test_labels_replay_to_the_optimal_path():
    for seed in range(10):
        g = solvable_instance(seed)
        if g is None:
            continue
        records = label_dataset(g, None, FULL)
        assert replay(records, FULL) == astar(g, FULL).path.cells


def test_unreachable_goal_yields_empty_dataset():
    occ = np.zeros((6, 6), dtype=bool)
    occ[3, :] = True
    g = GridMap(occ, agent=(0, 0), goal=(5, 5))
    assert label_dataset(g, 1, FULL) == []


def test_local_view_clips_to_obstacle_outside_the_map():
    g = GridMap(np.zeros((5, 5), dtype=bool), agent=(0, 0), goal=(4, 4))
    r = label_dataset(g, 1, FULL)[0]
    assert r.local_view.shape == (3, 3)
    assert r.local_view[0].all() and r.local_view[:, 0].all()  # beyond the edge
    assert not r.local_view[1:, 1:].any()


def test_local_view_matches_slice_oracle():
    rng = np.random.default_rng(5)
    occ = rng.random((12, 12)) < 0.3
    occ[6, 6] = occ[6, 7] = False
    g = GridMap(occ, agent=(6, 6), goal=(6, 7))
    r = label_dataset(g, 2, FULL)[0]
    assert np.array_equal(r.local_view, occ[4:9, 4:9])


def test_label_dataset_in_3d():
    g = GridMap(np.zeros((5, 5, 5), dtype=bool), agent=(0, 0, 0), goal=(4, 4, 4))
    records = label_dataset(g, 1, FULL)
    assert len(records) == 4
    assert records[0].local_view.shape == (3, 3, 3)
    assert replay(records, FULL)[-1] == (4, 4, 4)


def test_augment_adds_local_view():
    g = GridMap(np.zeros((6, 6), dtype=bool), agent=(0, 0), goal=(5, 5))
    bare = label_dataset(g, None, FULL)
    assert all(r.local_view is None for r in bare)
    out = augment_dataset(bare, {"local_view"}, local_view_radius=2)
    assert all(r.local_view.shape == (5, 5) for r in out)
    for before, after in zip(bare, out):
        assert after.agent_position == before.agent_position
        assert after.label == before.label
        assert after.distance_to_goal == before.distance_to_goal


def test_augment_is_idempotent_and_identity_on_empty_set():
    g = GridMap(np.zeros((6, 6), dtype=bool), agent=(0, 0), goal=(5, 5))
    records = label_dataset(g, 1, FULL)
    assert augment_dataset(records, set()) == records
    once = augment_dataset(records, {"local_view"})
    twice = augment_dataset(once, {"local_view"})
    assert once == twice  # records pass through by identity
    assert [a is b for a, b in zip(once, twice)] == [True] * len(once)


def test_augment_rejects_unknown_feature():
    g = GridMap(np.zeros((4, 4), dtype=bool), agent=(0, 0), goal=(3, 3))
    records = label_dataset(g, None, FULL)
    with pytest.raises(ConfigError):
        augment_dataset(records, {"lidar_scan"})


def test_augment_rejects_mixed_maps():
    a = GridMap(np.zeros((4, 4), dtype=bool), agent=(0, 0), goal=(3, 3))
    occ = np.zeros((4, 4), dtype=bool)
    occ[2, 0] = True
    b = GridMap(occ, agent=(0, 0), goal=(3, 3))
    records = label_dataset(a, None, FULL) + label_dataset(b, None, FULL)
    with pytest.raises(ConfigError):
        augment_dataset(records, {"local_view"})


def test_dataset_round_trip():
    for seed in range(5):
        g = solvable_instance(seed)
        if g is None:
            continue
        records = label_dataset(g, 1 if seed % 2 else None, FULL)
        text = save_dataset(records)
        back = load_dataset(text)
        assert len(back) == len(records)
        for a, b in zip(records, back):
            assert b.distance_to_goal == a.distance_to_goal  # repr round trip
            assert b.direction_to_goal == a.direction_to_goal
            assert np.array_equal(b.global_obstacle_map, a.global_obstacle_map)
            if a.local_view is None:
                assert b.local_view is None
            else:
                assert np.array_equal(b.local_view, a.local_view)
            assert b.agent_position == a.agent_position
            assert b.label == a.label
        assert save_dataset(back) == text


def test_load_rejects_bad_header():
    with pytest.raises(ParseError) as e:
        load_dataset("who\twhat\n")
    assert e.value.line == 1


def test_load_locates_malformed_lines():
    g = GridMap(np.zeros((3, 3), dtype=bool), agent=(0, 0), goal=(2, 2))
    text = save_dataset(label_dataset(g, None, FULL))
    lines = text.split("\n")
    broken = "\n".join([lines[0], lines[1].replace("\t-\t", "\t2x2:01\t")] + lines[2:])
    with pytest.raises(ParseError) as e:
        load_dataset(broken)
    assert e.value.line == 2
    broken = "\n".join([lines[0], lines[1] + "\textra"] + lines[2:])
    with pytest.raises(ParseError) as e:
        load_dataset(broken)
    assert e.value.line == 2
