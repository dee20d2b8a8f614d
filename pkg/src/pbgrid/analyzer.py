"""Benchmark harness: seeded sweeps, aggregation, merging, and reports.

The flow is: a :class:`BenchmarkSpec` names planners and map sources;
``simple_analysis``/``complex_analysis`` materialize maps, draw seeded
agent/goal pairs, run every planner against an optimal baseline, and
return :class:`AggregateStats` holding one :class:`RunRecord` per run.
Stats can be saved to and reloaded from a json-lines result file
(schema ``pbr1``), merged across machines, and rendered as CSV,
json-lines, or a text table.

Every random choice is derived from the spec's master seed through
SHA-256, never from Python's salted ``hash()``, so a sweep is
reproducible across processes, machines, and worker counts.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from pbgrid.dataset import load_dataset
from pbgrid.grid import GridMap, MoveModel, Path, distance_transform, euclidean_distance
from pbgrid.mapgen import ConfigError, GenConfig, generate, place_agent_goal
from pbgrid.mapio import ParseError, load_native, parse_movingai
from pbgrid.metrics import compute_report
from pbgrid.planners import PlannerEntry, astar, resolve_planner

RESULT_SCHEMA = "pbr1"

# Pinned report column order; everything after success_rate_pct is extended.
REPORT_COLUMNS = (
    "planner",
    "map_type",
    "path_dev_pct",
    "distance_left",
    "time_sec",
    "success_rate_pct",
    "path_length_cells",
    "path_cell_count",
    "search_space_pct",
    "peak_memory_mb",
    "obstacle_clearance_cells",
    "smoothness_deg",
    "hardware_tag",
    "runs",
)

_STRING_COLUMNS = frozenset({"planner", "map_type", "hardware_tag"})

# Which runs feed each aggregated metric.  Deviation and the path-shape
# metrics only exist on successes; distance_left is only meaningful on
# failures; the cost metrics exist on every run.
_METRIC_SOURCES = {
    "path_deviation_pct": "success",
    "path_length_cells": "success",
    "path_cell_count": "success",
    "obstacle_clearance_cells": "success",
    "smoothness_deg": "success",
    "distance_left_cells": "failure",
    "time_seconds": "all",
    "search_space_pct": "all",
    "peak_memory_mb": "all",
}

_COLUMN_TO_METRIC = {
    "path_dev_pct": "path_deviation_pct",
    "distance_left": "distance_left_cells",
    "time_sec": "time_seconds",
    "path_length_cells": "path_length_cells",
    "path_cell_count": "path_cell_count",
    "search_space_pct": "search_space_pct",
    "peak_memory_mb": "peak_memory_mb",
    "obstacle_clearance_cells": "obstacle_clearance_cells",
    "smoothness_deg": "smoothness_deg",
}


class VersionError(ValueError):
    """Result-file schema does not match what this code writes."""


def derive_seed(*parts: object) -> int:
    """Map an ordered tuple of identifiers to a stable 64-bit seed.

    The canonical form is the parts joined with ``:`` and hashed with
    SHA-256; the top eight digest bytes become the seed.  Python's
    built-in ``hash`` is salted per process and would break replay.
    """
    canon = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(canon.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# Benchmark configuration


@dataclass(frozen=True)
class GeneratedSource:
    """``count`` maps drawn from one generator configuration."""

    config: GenConfig
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"map count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class FileSource:
    """Maps loaded from disk; native and MovingAI files are both accepted."""

    paths: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(str(p) for p in self.paths))
        if not self.paths:
            raise ConfigError("FileSource needs at least one path")


MapSource = Union[GeneratedSource, FileSource]


@dataclass(frozen=True)
class PlannerConfig:
    """A planner selection plus optional parameter overrides."""

    name: str
    overrides: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "overrides", dict(self.overrides))
        resolve_planner(self.name)  # fail fast on unknown names


@dataclass(frozen=True)
class BenchmarkSpec:
    """Everything a sweep needs; two specs with equal fields replay equally."""

    planners: Tuple[PlannerConfig, ...]
    map_sources: Tuple[MapSource, ...]
    runs_per_map: int = 50
    master_seed: int = 0
    parallelism: int = 1
    hardware_tag: str = "local"
    timing_repeats: int = 1
    model: MoveModel = MoveModel()

    def __post_init__(self):
        object.__setattr__(self, "planners", tuple(self.planners))
        object.__setattr__(self, "map_sources", tuple(self.map_sources))
        if not self.planners:
            raise ConfigError("at least one planner is required")
        if not self.map_sources:
            raise ConfigError("at least one map source is required")
        if self.runs_per_map < 1:
            raise ConfigError(f"runs_per_map must be >= 1, got {self.runs_per_map}")
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.timing_repeats < 1:
            raise ConfigError(
                f"timing_repeats must be >= 1, got {self.timing_repeats}"
            )


# ---------------------------------------------------------------------------
# Run records and aggregation


@dataclass(frozen=True)
class RunRecord:
    """One planner execution, flattened for the json-lines result file."""

    planner: str
    map_id: str
    map_type: str
    hardware_tag: str
    seed: int
    success: bool
    path_length_cells: Optional[float]
    path_cell_count: Optional[int]
    distance_left_cells: float
    time_seconds: float
    path_deviation_pct: Optional[float]
    search_space_pct: float
    peak_memory_mb: float
    obstacle_clearance_cells: Optional[float]
    smoothness_deg: Optional[float]
    failure_reason: Optional[str]


_RUN_FIELDS = tuple(f.name for f in dataclasses.fields(RunRecord))


@dataclass(frozen=True)
class CellStats:
    """Aggregates for one (planner, map_type, hardware_tag) cell."""

    planner: str
    map_type: str
    hardware_tag: str
    runs: int
    successes: int
    samples: Mapping[str, Tuple[float, ...]]
    failure_reasons: Mapping[str, int]

    @property
    def success_rate_pct(self) -> float:
        return 100.0 * self.successes / self.runs

    def stats(self, metric: str) -> Optional[Tuple[float, float, float, float]]:
        """(mean, population std, min, max) for a metric, None if no samples."""
        values = self.samples.get(metric, ())
        if not values:
            return None
        arr = np.asarray(values, dtype=float)
        return (float(arr.mean()), float(arr.std()), float(arr.min()), float(arr.max()))

    def mean(self, metric: str) -> Optional[float]:
        st = self.stats(metric)
        return None if st is None else st[0]


@dataclass(frozen=True)
class AggregateStats:
    """All run records from a sweep (or a merge) plus sweep metadata."""

    runs: Tuple[RunRecord, ...]
    warnings: Tuple[str, ...] = ()
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple(self.runs))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        object.__setattr__(self, "meta", dict(self.meta))

    def cells(self) -> Dict[Tuple[str, str, str], CellStats]:
        """Per-(planner, map_type, hardware_tag) aggregation of the raw runs."""
        grouped: Dict[Tuple[str, str, str], List[RunRecord]] = {}
        for run in self.runs:
            grouped.setdefault((run.planner, run.map_type, run.hardware_tag), []).append(run)
        out: Dict[Tuple[str, str, str], CellStats] = {}
        for key, runs in grouped.items():
            samples: Dict[str, Tuple[float, ...]] = {}
            for metric, source in _METRIC_SOURCES.items():
                values = []
                for run in runs:
                    if source == "success" and not run.success:
                        continue
                    if source == "failure" and run.success:
                        continue
                    value = getattr(run, metric)
                    if value is not None:
                        values.append(float(value))
                samples[metric] = tuple(values)
            reasons: Dict[str, int] = {}
            for run in runs:
                if run.failure_reason is not None:
                    reasons[run.failure_reason] = reasons.get(run.failure_reason, 0) + 1
            out[key] = CellStats(
                planner=key[0],
                map_type=key[1],
                hardware_tag=key[2],
                runs=len(runs),
                successes=sum(1 for r in runs if r.success),
                samples=samples,
                failure_reasons=reasons,
            )
        return out

    def table_rows(self) -> List[Dict[str, object]]:
        """Report rows in pinned column order, sorted for stable output."""
        rows = []
        cells = self.cells()
        for key in sorted(cells, key=lambda k: (k[1], k[0], k[2])):
            cell = cells[key]
            row: Dict[str, object] = {
                "planner": cell.planner,
                "map_type": cell.map_type,
                "hardware_tag": cell.hardware_tag,
                "runs": cell.runs,
                "success_rate_pct": cell.success_rate_pct,
            }
            for column, metric in _COLUMN_TO_METRIC.items():
                row[column] = cell.mean(metric)
            rows.append({col: row[col] for col in REPORT_COLUMNS})
        return rows


# ---------------------------------------------------------------------------
# Sweep execution


@dataclass(frozen=True)
class _MapInstance:
    map_id: str
    map_type: str
    grid: GridMap


def _materialize_maps(spec: BenchmarkSpec) -> Tuple[List[_MapInstance], List[str]]:
    """Build the map list; unusable files are skipped with a warning."""
    instances: List[_MapInstance] = []
    warnings: List[str] = []
    for s_idx, source in enumerate(spec.map_sources):
        if isinstance(source, GeneratedSource):
            for m_idx in range(source.count):
                cfg = dataclasses.replace(
                    source.config,
                    seed=derive_seed(
                        spec.master_seed, "map", s_idx, source.config.seed, m_idx
                    ),
                )
                grid = generate(cfg)
                map_id = f"{cfg.map_type.value}-{s_idx}-{m_idx:04d}"
                if grid.free_count < 2:
                    warnings.append(f"skipped {map_id}: fewer than two free cells")
                    continue
                instances.append(_MapInstance(map_id, cfg.map_type.value, grid))
        elif isinstance(source, FileSource):
            for p_idx, path in enumerate(source.paths):
                try:
                    data = FsPath(path).read_bytes()
                except OSError as exc:
                    warnings.append(f"skipped {path}: {exc}")
                    continue
                try:
                    if data.startswith(b"pbgrid "):
                        grid = load_native(data)
                    else:
                        grid = parse_movingai(data)
                except ParseError as exc:
                    warnings.append(f"skipped {path}: {exc}")
                    continue
                if grid.free_count < 2:
                    warnings.append(f"skipped {path}: fewer than two free cells")
                    continue
                map_id = f"file-{s_idx}-{p_idx:04d}-{FsPath(path).stem}"
                instances.append(_MapInstance(map_id, "file", grid))
        else:
            raise ConfigError(f"unknown map source type: {type(source).__name__}")
    return instances, warnings


def _crash_record(
    spec: BenchmarkSpec,
    inst: _MapInstance,
    placed: GridMap,
    planner: str,
    seed: int,
    exc: Exception,
) -> RunRecord:
    return RunRecord(
        planner=planner,
        map_id=inst.map_id,
        map_type=inst.map_type,
        hardware_tag=spec.hardware_tag,
        seed=seed,
        success=False,
        path_length_cells=None,
        path_cell_count=None,
        distance_left_cells=euclidean_distance(placed.agent, placed.goal),
        time_seconds=0.0,
        path_deviation_pct=None,
        search_space_pct=0.0,
        peak_memory_mb=0.0,
        obstacle_clearance_cells=None,
        smoothness_deg=None,
        failure_reason=f"error:{type(exc).__name__}",
    )


def _run_unit(
    spec: BenchmarkSpec,
    inst: _MapInstance,
    run_idx: int,
    entries: Sequence[Tuple[PlannerConfig, PlannerEntry]],
) -> List[RunRecord]:
    """Execute every planner once on one (map, endpoint draw) instance."""
    rng = np.random.default_rng(
        derive_seed(spec.master_seed, "endpoints", inst.map_id, run_idx)
    )
    placed = place_agent_goal(inst.grid, rng)
    dist_field = distance_transform(placed)
    baseline = astar(placed, spec.model)
    records: List[RunRecord] = []
    for planner_cfg, entry in entries:
        seed = derive_seed(spec.master_seed, "run", inst.map_id, run_idx, entry.name)
        try:
            if entry.name == "astar" and not planner_cfg.overrides:
                outcome = baseline
            else:
                outcome = entry.run(placed, spec.model, seed, planner_cfg.overrides)
            elapsed = outcome.elapsed_seconds
            for _ in range(spec.timing_repeats - 1):
                repeat = entry.run(placed, spec.model, seed, planner_cfg.overrides)
                elapsed = min(elapsed, repeat.elapsed_seconds)
            report = compute_report(outcome, baseline, placed, dist_field)
        except Exception as exc:  # crash wall: one bad run never aborts a sweep
            records.append(_crash_record(spec, inst, placed, entry.name, seed, exc))
            continue
        records.append(
            RunRecord(
                planner=entry.name,
                map_id=inst.map_id,
                map_type=inst.map_type,
                hardware_tag=spec.hardware_tag,
                seed=seed,
                success=report.success,
                path_length_cells=report.path_length_cells,
                path_cell_count=report.path_cell_count,
                distance_left_cells=report.distance_left_cells,
                time_seconds=elapsed,
                path_deviation_pct=report.path_deviation_pct,
                search_space_pct=report.search_space_pct,
                peak_memory_mb=report.peak_memory_mb,
                obstacle_clearance_cells=report.obstacle_clearance_cells,
                smoothness_deg=report.smoothness_deg,
                failure_reason=outcome.failure_reason,
            )
        )
    return records


def _analyze(spec: BenchmarkSpec, runs_per_map: int) -> AggregateStats:
    entries = [(cfg, resolve_planner(cfg.name)) for cfg in spec.planners]
    instances, warnings = _materialize_maps(spec)
    units = [(inst, run_idx) for inst in instances for run_idx in range(runs_per_map)]

    def work(unit):
        inst, run_idx = unit
        return _run_unit(spec, inst, run_idx, entries)

    if spec.parallelism == 1:
        unit_results = [work(u) for u in units]
    else:
        # Results are collected in submission order, so worker count can
        # change scheduling but never the output; maps are immutable and
        # shared, per-run state lives inside the unit.
        with ThreadPoolExecutor(max_workers=spec.parallelism) as pool:
            unit_results = list(pool.map(work, units))
    runs = [record for unit in unit_results for record in unit]
    meta = {
        "master_seed": spec.master_seed,
        "hardware_tag": spec.hardware_tag,
        "runs_per_map": runs_per_map,
        "map_count": len(instances),
        "planners": [entry.name for _, entry in entries],
    }
    return AggregateStats(runs=tuple(runs), warnings=tuple(warnings), meta=meta)


def simple_analysis(spec: BenchmarkSpec) -> AggregateStats:
    """One run per map with a fresh seeded agent/goal pair per map."""
    return _analyze(spec, 1)


def complex_analysis(spec: BenchmarkSpec) -> AggregateStats:
    """``runs_per_map`` seeded endpoint draws per map; x=1 matches simple."""
    return _analyze(spec, spec.runs_per_map)


# ---------------------------------------------------------------------------
# Dataset summaries


@dataclass(frozen=True)
class DatasetSummary:
    """Per-path digest of a labeled dataset segment."""

    map_index: int
    obstacle_ratio: float
    path_length_cells: float
    start_goal_distance: float
    steps: int


def dataset_analysis(path: str, model: MoveModel = MoveModel()) -> List[DatasetSummary]:
    """Summarize a dataset file: one row per contiguous labeled path.

    A new segment starts whenever the map changes or the agent position
    does not continue the previous record's labeled move.
    """
    records = load_dataset(FsPath(path).read_text(encoding="utf-8"))
    summaries: List[DatasetSummary] = []
    segment: List = []
    expected_next = None

    def flush():
        if not segment:
            return
        first = segment[0]
        dims = len(first.agent_position)
        moves = model.moves(dims)
        cells = [r.agent_position for r in segment]
        last = segment[-1]
        end = tuple(
            p + d for p, d in zip(last.agent_position, moves[last.label])
        )
        cells.append(end)
        walked = Path.from_cells(cells)
        summaries.append(
            DatasetSummary(
                map_index=len(summaries),
                obstacle_ratio=float(first.global_obstacle_map.mean()),
                path_length_cells=walked.cost,
                start_goal_distance=euclidean_distance(cells[0], end),
                steps=len(segment),
            )
        )

    for record in records:
        same_map = segment and np.array_equal(
            record.global_obstacle_map, segment[0].global_obstacle_map
        )
        if not (same_map and record.agent_position == expected_next):
            flush()
            segment = []
        segment.append(record)
        moves = model.moves(len(record.agent_position))
        expected_next = tuple(
            p + d for p, d in zip(record.agent_position, moves[record.label])
        )
    flush()
    return summaries


# ---------------------------------------------------------------------------
# Result files (schema pbr1) and merging


def save_results(stats: AggregateStats, path: str) -> None:
    """Write a json-lines result file: header object, then one row per run."""
    lines = [
        json.dumps(
            {"schema": RESULT_SCHEMA, "warnings": list(stats.warnings), **stats.meta},
            sort_keys=True,
        )
    ]
    for run in stats.runs:
        lines.append(json.dumps(dataclasses.asdict(run), sort_keys=True))
    FsPath(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_results(path: str) -> AggregateStats:
    """Read a pbr1 result file back into AggregateStats."""
    text = FsPath(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise VersionError(f"{path}: empty result file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise VersionError(f"{path}: unreadable header: {exc}") from exc
    schema = header.get("schema") if isinstance(header, dict) else None
    if schema != RESULT_SCHEMA:
        raise VersionError(
            f"{path}: result schema {schema!r} is not {RESULT_SCHEMA!r}"
        )
    runs = []
    for number, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise VersionError(f"{path}: bad run row (line {number}): {exc}") from exc
        missing = [f for f in _RUN_FIELDS if f not in obj]
        if missing:
            raise VersionError(
                f"{path}: run row missing fields {missing} (line {number})"
            )
        runs.append(RunRecord(**{f: obj[f] for f in _RUN_FIELDS}))
    warnings = tuple(header.get("warnings", ()))
    meta = {k: v for k, v in header.items() if k not in ("schema", "warnings")}
    return AggregateStats(runs=tuple(runs), warnings=warnings, meta=meta)


def merge_results(paths: Sequence[str]) -> AggregateStats:
    """Union result files from different machines into one stats object.

    Cells keep their hardware tags: nothing is averaged across tags.  The
    merged run list is canonically sorted, so input order does not matter.
    """
    if not paths:
        raise ConfigError("merge_results needs at least one input file")
    all_runs: List[RunRecord] = []
    all_warnings: List[str] = []
    for path in paths:
        stats = load_results(path)
        all_runs.extend(stats.runs)
        all_warnings.extend(stats.warnings)
    all_runs.sort(
        key=lambda r: (r.hardware_tag, r.map_type, r.map_id, r.planner, r.seed)
    )
    return AggregateStats(
        runs=tuple(all_runs),
        warnings=tuple(sorted(all_warnings)),
        meta={"merged_files": len(paths)},
    )


# ---------------------------------------------------------------------------
# Report emission


def _format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return "%.6g" % value
    return str(value)


def emit_report(
    stats: AggregateStats,
    directory: str,
    formats: Iterable[str] = ("csv", "jsonl", "text"),
) -> Dict[str, str]:
    """Write the aggregate report; returns {format: path}.

    ``csv`` and ``text`` render the pinned columns with floats at six
    significant digits; ``jsonl`` carries the same rows at full float
    precision plus per-metric spread.  Raw per-cell sample vectors are
    always written to a ``samples.tsv`` sidecar so plots and re-analysis
    do not need the original run machines.
    """
    out_dir = FsPath(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = tuple(formats)
    unknown = set(formats) - {"csv", "jsonl", "text"}
    if unknown:
        raise ConfigError(f"unknown report formats: {sorted(unknown)}")
    rows = stats.table_rows()
    written: Dict[str, str] = {}

    if "csv" in formats:
        csv_path = out_dir / "report.csv"
        lines = [",".join(REPORT_COLUMNS)]
        for row in rows:
            lines.append(",".join(_format_cell(row[c]) for c in REPORT_COLUMNS))
        csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written["csv"] = str(csv_path)

    if "jsonl" in formats:
        jsonl_path = out_dir / "report.jsonl"
        cells = stats.cells()
        lines = []
        for row in rows:
            cell = cells[(row["planner"], row["map_type"], row["hardware_tag"])]
            spread = {}
            for column, metric in _COLUMN_TO_METRIC.items():
                st = cell.stats(metric)
                if st is not None:
                    spread[column] = {"std": st[1], "min": st[2], "max": st[3]}
            obj = dict(row)
            obj["spread"] = spread
            obj["failure_reasons"] = dict(sorted(cell.failure_reasons.items()))
            lines.append(json.dumps(obj, sort_keys=True))
        jsonl_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written["jsonl"] = str(jsonl_path)

    if "text" in formats:
        text_path = out_dir / "report.txt"
        text_path.write_text(render_text_table(stats), encoding="utf-8")
        written["text"] = str(text_path)

    samples_path = out_dir / "samples.tsv"
    sample_lines = ["planner\tmap_type\thardware_tag\tmetric\tvalues"]
    cells = stats.cells()
    for key in sorted(cells, key=lambda k: (k[1], k[0], k[2])):
        cell = cells[key]
        for metric in _METRIC_SOURCES:
            values = cell.samples.get(metric, ())
            if not values:
                continue
            sample_lines.append(
                "\t".join(
                    (
                        cell.planner,
                        cell.map_type,
                        cell.hardware_tag,
                        metric,
                        " ".join(repr(v) for v in values),
                    )
                )
            )
    samples_path.write_text("\n".join(sample_lines) + "\n", encoding="utf-8")
    written["samples"] = str(samples_path)
    return written


def render_text_table(stats: AggregateStats) -> str:
    """Fixed-width table over the pinned columns, one row per cell."""
    rows = stats.table_rows()
    headers = list(REPORT_COLUMNS)
    rendered = [[_format_cell(row[c]) or "-" for c in headers] for row in rows]
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rendered)) if rendered else len(headers[i])
        for i in range(len(headers))
    ]
    out_lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * widths[i] for i in range(len(headers))).rstrip(),
    ]
    for r in rendered:
        out_lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(r))).rstrip())
    if stats.warnings:
        out_lines.append("")
        for warning in stats.warnings:
            out_lines.append(f"warning: {warning}")
    return "\n".join(out_lines) + "\n"


def read_report_csv(path: str) -> List[Dict[str, object]]:
    """Parse a report.csv back into typed rows (None for blank cells)."""
    text = FsPath(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != ",".join(REPORT_COLUMNS):
        raise VersionError(f"{path}: unexpected report header")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(REPORT_COLUMNS):
            raise VersionError(f"{path}: row has {len(parts)} columns")
        row: Dict[str, object] = {}
        for col, token in zip(REPORT_COLUMNS, parts):
            if col in _STRING_COLUMNS:
                row[col] = token
            elif token == "":
                row[col] = None
            elif col == "runs":
                row[col] = int(token)
            else:
                row[col] = float(token)
        rows.append(row)
    return rows


def read_report_jsonl(path: str) -> List[Dict[str, object]]:
    """Parse a report.jsonl down to the pinned report columns."""
    rows = []
    for line in FsPath(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        rows.append({col: obj[col] for col in REPORT_COLUMNS})
    return rows
