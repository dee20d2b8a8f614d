import numpy as np
import pytest

from pbgrid.grid import GridMap


def build_u_trap() -> GridMap:
    """A C-shaped wall opening toward the agent, goal behind the back
    wall. Greedy potential descent walks into the cavity and stalls."""
    occ = np.zeros((25, 25), dtype=bool)
    occ[6, 6:19] = True   # upper arm
    occ[18, 6:19] = True  # lower arm
    occ[6:19, 18] = True  # back wall
    return GridMap(occ, agent=(12, 2), goal=(12, 22))


@pytest.fixture
def u_trap() -> GridMap:
    return build_u_trap()
