"""pbgrid: grid-world path planning and benchmarking."""

from pbgrid.grid import (
    Cell,
    Connectivity,
    DistanceField,
    DomainError,
    GridMap,
    InvalidPathError,
    MapError,
    MoveModel,
    Path,
    distance_transform,
    euclidean_distance,
    neighbors,
    validate_path,
)

__version__ = "0.1.0"

MAP_SCHEMA = "pbgrid v1"
RESULT_SCHEMA = "pbr1"

__all__ = [
    "Cell",
    "Connectivity",
    "DistanceField",
    "DomainError",
    "GridMap",
    "InvalidPathError",
    "MapError",
    "MoveModel",
    "Path",
    "distance_transform",
    "euclidean_distance",
    "neighbors",
    "validate_path",
    "MAP_SCHEMA",
    "RESULT_SCHEMA",
    "__version__",
]
