"""Command-line front end: generate, run, benchmark, convert, plot.

Flag precedence is flags > config file > environment > built-in defaults.
A config file is plain ``key = value`` text (``#`` starts a comment); keys
are long flag names of the chosen subcommand, and dotted keys such as
``rrt.step = 4`` set per-planner parameters exactly like ``--rrt.step 4``
on the command line.  Environment variables use the ``PBGRID_`` prefix
(``PBGRID_SEED=7``).

Exit codes: 0 success, 1 usage error, 2 data or parse error (including
I/O), 3 internal inconsistency.  ``--version`` prints one JSON line with
the package version and both file-schema versions.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path as FsPath
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import pbgrid
from pbgrid.analyzer import (
    BenchmarkSpec,
    FileSource,
    GeneratedSource,
    PlannerConfig,
    RESULT_SCHEMA,
    VersionError,
    complex_analysis,
    derive_seed,
    emit_report,
    merge_results,
    render_text_table,
    save_results,
    simple_analysis,
)
from pbgrid.grid import Connectivity, DomainError, GridMap, MapError, MoveModel, distance_transform
from pbgrid.mapgen import ConfigError, GenConfig, MapType, generate, place_agent_goal
from pbgrid.mapio import NATIVE_VERSION, ParseError, load_native, parse_movingai, save_native
from pbgrid.metrics import InconsistencyError, MetricReport, compute_report
from pbgrid.planners import (
    PlannerEntry,
    available_planners,
    dump_trace,
    dump_tree,
    resolve_planner,
)
from pbgrid.planners.graph import astar, dijkstra, wavefront
from pbgrid.plots import PLOT_KINDS, emit_plots


class UsageError(Exception):
    """Bad flags or flag combinations; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are 1
        raise UsageError(message)


# Friendly metric spellings for plot axes.
_METRIC_ALIASES = {
    "deviation": "path_deviation_pct",
    "dev": "path_deviation_pct",
    "path_dev_pct": "path_deviation_pct",
    "distance": "distance_left_cells",
    "distance_left": "distance_left_cells",
    "time": "time_seconds",
    "time_sec": "time_seconds",
    "length": "path_length_cells",
    "cells": "path_cell_count",
    "search": "search_space_pct",
    "memory": "peak_memory_mb",
    "clearance": "obstacle_clearance_cells",
    "smoothness": "smoothness_deg",
}

_METRIC_NAMES = (
    "path_deviation_pct",
    "distance_left_cells",
    "time_seconds",
    "path_length_cells",
    "path_cell_count",
    "search_space_pct",
    "peak_memory_mb",
    "obstacle_clearance_cells",
    "smoothness_deg",
)


def _metric_name(token: str) -> str:
    name = _METRIC_ALIASES.get(token, token)
    if name not in _METRIC_NAMES:
        raise UsageError(
            f"unknown metric {token!r}; choose from {', '.join(_METRIC_NAMES)}"
        )
    return name


def _resolve_or_usage(name: str) -> PlannerEntry:
    try:
        return resolve_planner(name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc


def _split_csv(text: str) -> List[str]:
    items = [tok.strip() for tok in text.split(",")]
    return [tok for tok in items if tok and tok.lower() != "none"]


def _coerce_param(entry: PlannerEntry, key: str, raw: object) -> object:
    from pbgrid.planners import _PARAM_ALIASES  # single source for the alias table

    key = _PARAM_ALIASES.get(key, key)
    if key not in entry.params:
        allowed = ", ".join(sorted(entry.params)) or "none"
        raise UsageError(
            f"planner {entry.name!r} does not accept parameter {key!r}"
            f" (accepted: {allowed})"
        )
    typ = entry.params[key]
    if not isinstance(raw, str):
        return raw
    try:
        if typ is bool:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError as exc:
        raise UsageError(
            f"bad value {raw!r} for --{entry.name}.{key} (expected {typ.__name__})"
        ) from exc


def _extract_planner_overrides(argv: Sequence[str]) -> Tuple[Dict[str, Dict[str, str]], List[str]]:
    """Pull ``--<planner>.<param> value`` tokens out before argparse runs."""
    raw: Dict[str, Dict[str, str]] = {}
    rest: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "." in tok.split("=", 1)[0]:
            body = tok[2:]
            if "=" in body:
                key, value = body.split("=", 1)
                i += 1
            else:
                key = body
                if i + 1 >= len(argv):
                    raise UsageError(f"flag {tok} needs a value")
                value = argv[i + 1]
                i += 2
            planner_token, param = key.split(".", 1)
            raw.setdefault(planner_token, {})[param] = value
        else:
            rest.append(tok)
            i += 1
    return raw, rest


def _typed_overrides(
    raw: Dict[str, Dict[str, str]], wanted: Sequence[PlannerEntry]
) -> Dict[str, Dict[str, object]]:
    """Resolve planner tokens, pin keys, and coerce values per the registry."""
    by_name = {entry.name: entry for entry in wanted}
    out: Dict[str, Dict[str, object]] = {}
    for planner_token, params in raw.items():
        entry = _resolve_or_usage(planner_token)
        if entry.name not in by_name:
            raise UsageError(
                f"--{planner_token}.* given but planner {entry.name!r} is not selected"
            )
        bucket = out.setdefault(entry.name, {})
        for key, value in params.items():
            from pbgrid.planners import _PARAM_ALIASES

            bucket[_PARAM_ALIASES.get(key, key)] = _coerce_param(entry, key, value)
    return out


# ---------------------------------------------------------------------------
# Config file / environment overlay


def load_config_file(path: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` comments and blank lines ignored."""
    values: Dict[str, str] = {}
    for number, line in enumerate(FsPath(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}: line {number}: expected key = value")
        key, value = stripped.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _env_overrides() -> Dict[str, str]:
    out = {}
    for key, value in os.environ.items():
        if key.startswith("PBGRID_") and key != "PBGRID_":
            out[key[len("PBGRID_"):].lower()] = value
    return out


def _coerce_flag(action: argparse.Action, raw: str) -> object:
    if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
        return raw.lower() in ("1", "true", "yes", "on")
    convert = action.type or str
    tokens = raw.replace(",", " ").split() if action.nargs in ("+", 2, 3) else None
    try:
        if tokens is not None:
            return [convert(tok) for tok in tokens]
        if action.choices and raw not in action.choices:
            raise ValueError(raw)
        return convert(raw)
    except ValueError as exc:
        raise UsageError(f"bad config value {raw!r} for {action.dest}") from exc


def _apply_overlay(
    parser: argparse.ArgumentParser,
    ns: argparse.Namespace,
    argv: Sequence[str],
    file_values: Dict[str, str],
) -> Dict[str, Dict[str, str]]:
    """Fill non-flag-provided options from file then environment.

    Returns dotted (per-planner) keys from the file for the override pipe.
    """
    provided = set()
    for tok in argv:
        if tok.startswith("--"):
            provided.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    dotted: Dict[str, Dict[str, str]] = {}
    flat: Dict[str, str] = {}
    for key, value in file_values.items():
        if "." in key:
            planner_token, param = key.split(".", 1)
            dotted.setdefault(planner_token, {})[param] = value
        else:
            flat[key.replace("-", "_")] = value
    env = _env_overrides()
    merged = {**env, **flat}  # file wins over environment
    for action in parser._actions:
        dest = action.dest
        if dest in ("help", "==SUPPRESS==") or dest in provided:
            continue
        if dest in merged:
            setattr(ns, dest, _coerce_flag(action, merged[dest]))
    return dotted


# ---------------------------------------------------------------------------
# Subcommands


def _model_from(ns) -> MoveModel:
    conn = Connectivity.FULL if ns.connectivity == "full" else Connectivity.ORTHOGONAL
    return MoveModel(conn)


def _load_map_file(path: str) -> GridMap:
    data = FsPath(path).read_bytes()
    if data.startswith(b"pbgrid "):
        return load_native(data)
    return parse_movingai(data)


def cmd_generate(ns, overrides) -> int:
    if overrides:
        raise UsageError("per-planner parameters do not apply to generate")
    base = GenConfig(
        map_type=MapType(ns.type),
        extent=tuple(ns.extent),
        fill_rate_range=tuple(ns.fill),
        obstacle_count_range=tuple(ns.obstacles),
        min_room_range=tuple(ns.min_room),
        max_room_range=tuple(ns.max_room),
        seed=ns.seed,
    )
    out_dir = FsPath(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for i in range(ns.count):
        cfg = dataclasses.replace(base, seed=derive_seed(ns.seed, "generate", i))
        grid = generate(cfg)
        name = f"{ns.type}-{ns.seed}-{i:04d}.map"
        (out_dir / name).write_text(save_native(grid), encoding="utf-8")
        files.append(name)
    manifest = {
        "command": "generate",
        "map_format": NATIVE_VERSION,
        "type": ns.type,
        "count": ns.count,
        "extent": list(ns.extent),
        "fill_rate_range": list(ns.fill),
        "obstacle_count_range": list(ns.obstacles),
        "min_room_range": list(ns.min_room),
        "max_room_range": list(ns.max_room),
        "seed": ns.seed,
        "files": files,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"seed: {ns.seed}")
    print(f"wrote {len(files)} map(s) and manifest.json to {out_dir}")
    return 0


_REPORT_PRINT_ORDER = tuple(f.name for f in dataclasses.fields(MetricReport))


def _print_report(report: MetricReport) -> None:
    for name in _REPORT_PRINT_ORDER:
        value = getattr(report, name)
        if value is None:
            text = "-"
        elif name == "path_deviation_pct":
            text = "%.2f" % value
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = "%.6g" % value
        else:
            text = str(value)
        print(f"{name}: {text}")


def cmd_run(ns, overrides) -> int:
    entry = _resolve_or_usage(ns.planner)
    typed = _typed_overrides(overrides, [entry]).get(entry.name, {})
    grid = _load_map_file(ns.map)
    model = _model_from(ns)
    if ns.start is not None or ns.goal is not None:
        agent = tuple(ns.start) if ns.start is not None else grid.agent
        goal = tuple(ns.goal) if ns.goal is not None else grid.goal
        grid = GridMap(grid.occupancy, agent=agent, goal=goal)
    if grid.agent is None or grid.goal is None:
        grid = place_agent_goal(grid, np.random.default_rng(ns.seed))
    print(f"planner: {entry.name}")
    print(f"map: {ns.map}")
    print(f"seed: {ns.seed}")
    print(f"agent: {' '.join(str(c) for c in grid.agent)}")
    print(f"goal: {' '.join(str(c) for c in grid.goal)}")
    if ns.trace and entry.kind == "sampling":
        raise UsageError(f"{entry.name} records a sample tree; use --tree")
    if ns.tree and entry.kind != "sampling":
        raise UsageError("--tree only applies to the sampling planners")
    if ns.trace and entry.kind == "graph":
        recorded = {"astar": astar, "dijkstra": dijkstra, "wavefront": wavefront}
        outcome = recorded[entry.name](grid, model, record_steps=True)
    else:
        outcome = entry.run(grid, model, ns.seed, typed)
    if entry.name == "astar" and not typed:
        baseline = outcome
    else:
        baseline = astar(grid, model)
    report = compute_report(outcome, baseline, grid, distance_transform(grid))
    _print_report(report)
    if not outcome.success:
        print(f"failure_reason: {outcome.failure_reason}")
    if ns.trace:
        with open(ns.trace, "w", encoding="utf-8") as sink:
            count = dump_trace(outcome, sink)
        print(f"trace: wrote {count} steps to {ns.trace}")
    if ns.tree:
        with open(ns.tree, "w", encoding="utf-8") as sink:
            count = dump_tree(outcome, sink)
        print(f"tree: wrote {count} nodes to {ns.tree}")
    return 0


def cmd_benchmark(ns, overrides) -> int:
    planner_names = _split_csv(ns.planners)
    if not planner_names:
        raise UsageError("--planners must name at least one planner")
    entries = [_resolve_or_usage(name) for name in planner_names]
    typed = _typed_overrides(overrides, entries)
    planner_cfgs = tuple(
        PlannerConfig(entry.name, typed.get(entry.name, {})) for entry in entries
    )
    if ns.maps:
        map_dir = FsPath(ns.maps)
        if not map_dir.is_dir():
            raise UsageError(f"--maps {ns.maps}: not a directory")
        paths = tuple(str(p) for p in sorted(map_dir.iterdir()) if p.is_file())
        if not paths:
            raise UsageError(f"--maps {ns.maps}: directory holds no files")
        sources: Tuple = (FileSource(paths),)
    else:
        type_names = _split_csv(ns.types)
        if not type_names:
            raise UsageError("--types must name at least one map type")
        try:
            types = [MapType(t) for t in type_names]
        except ValueError as exc:
            raise UsageError(
                f"unknown map type in --types (choose from "
                f"{', '.join(m.value for m in MapType)})"
            ) from exc
        sources = tuple(
            GeneratedSource(
                GenConfig(
                    map_type=t,
                    extent=tuple(ns.extent),
                    fill_rate_range=tuple(ns.fill),
                    obstacle_count_range=tuple(ns.obstacles),
                    min_room_range=tuple(ns.min_room),
                    max_room_range=tuple(ns.max_room),
                    seed=ns.seed,
                ),
                ns.n,
            )
            for t in types
        )
    spec = BenchmarkSpec(
        planners=planner_cfgs,
        map_sources=sources,
        runs_per_map=ns.x,
        master_seed=ns.seed,
        parallelism=ns.jobs,
        hardware_tag=ns.hardware_tag,
        timing_repeats=ns.timing_repeats,
        model=_model_from(ns),
    )
    print(f"master seed: {ns.seed}")
    stats = complex_analysis(spec) if ns.complex else simple_analysis(spec)
    out_dir = FsPath(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result_path = out_dir / "results.pbr1"
    save_results(stats, str(result_path))
    written = emit_report(stats, str(out_dir))
    kinds = _split_csv(ns.plots)
    if kinds:
        unknown = set(kinds) - set(PLOT_KINDS)
        if unknown:
            raise UsageError(f"unknown plot kinds: {sorted(unknown)}")
        plot_files = emit_plots(stats, str(out_dir), kinds=kinds)
        written.update(plot_files)
    sys.stdout.write(render_text_table(stats))
    print(f"results: {result_path}")
    for kind in sorted(written):
        print(f"{kind}: {written[kind]}")
    return 0


def cmd_convert(ns, overrides) -> int:
    if overrides:
        raise UsageError("per-planner parameters do not apply to convert")
    out_dir = FsPath(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for path in ns.files:
        try:
            grid = parse_movingai(FsPath(path).read_bytes())
        except (OSError, ParseError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            failures += 1
            continue
        target = out_dir / (FsPath(path).stem + ".map")
        target.write_text(save_native(grid), encoding="utf-8")
        print(f"{path} -> {target}")
    if failures:
        print(f"{failures} file(s) failed to convert", file=sys.stderr)
        return 2
    return 0


def cmd_plot(ns, overrides) -> int:
    if overrides:
        raise UsageError("per-planner parameters do not apply to plot")
    stats = merge_results(list(ns.results))
    kinds = _split_csv(ns.kinds)
    if not kinds:
        raise UsageError("--kinds must name at least one plot kind")
    unknown = set(kinds) - set(PLOT_KINDS)
    if unknown:
        raise UsageError(f"unknown plot kinds: {sorted(unknown)}")
    written = emit_plots(
        stats,
        ns.out,
        kinds=kinds,
        metric=_metric_name(ns.metric),
        scatter_x=_metric_name(ns.x),
        scatter_y=_metric_name(ns.y),
    )
    for kind in sorted(written):
        print(f"{kind}: {written[kind]}")
    return 0


# ---------------------------------------------------------------------------
# Parser wiring


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="FILE", help="key = value overlay file")
    sub.add_argument(
        "--connectivity",
        choices=("full", "orthogonal"),
        default="full",
        help="movement model (default full: diagonals allowed)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pbgrid", description=__doc__)
    parser.add_argument("--version", action="store_true", help="print versions as JSON")
    subs = parser.add_subparsers(dest="command")

    gen = subs.add_parser("generate", description="write native map files")
    gen.add_argument("--type", choices=[m.value for m in MapType], default="uniform")
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--extent", type=int, nargs="+", default=[64, 64])
    gen.add_argument("--fill", type=float, nargs=2, default=[0.1, 0.3], metavar=("LO", "HI"))
    gen.add_argument("--obstacles", type=int, nargs=2, default=[1, 6], metavar=("LO", "HI"))
    gen.add_argument("--min-room", type=int, nargs=2, default=[8, 15], metavar=("LO", "HI"))
    gen.add_argument("--max-room", type=int, nargs=2, default=[35, 45], metavar=("LO", "HI"))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=".")
    _add_common(gen)
    gen.set_defaults(func=cmd_generate)

    run = subs.add_parser("run", description="run one planner on one map")
    run.add_argument("map", help="native or MovingAI map file")
    run.add_argument("--planner", required=True)
    run.add_argument("--start", type=int, nargs="+", default=None)
    run.add_argument("--goal", type=int, nargs="+", default=None)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--trace", metavar="FILE", help="write the expansion log")
    run.add_argument("--tree", metavar="FILE", help="write the sample tree")
    _add_common(run)
    run.set_defaults(func=cmd_run)

    bench = subs.add_parser("benchmark", description="seeded sweep over maps and planners")
    mode = bench.add_mutually_exclusive_group()
    mode.add_argument("--simple", action="store_true", default=True)
    mode.add_argument("--complex", action="store_true", default=False)
    bench.add_argument("--n", type=int, default=10, help="maps per type")
    bench.add_argument("--x", type=int, default=50, help="runs per map (complex)")
    bench.add_argument("--planners", default="astar,dijkstra,wavefront")
    bench.add_argument("--types", default="uniform,block,house")
    bench.add_argument("--extent", type=int, nargs="+", default=[64, 64])
    bench.add_argument("--fill", type=float, nargs=2, default=[0.1, 0.3], metavar=("LO", "HI"))
    bench.add_argument("--obstacles", type=int, nargs=2, default=[1, 6], metavar=("LO", "HI"))
    bench.add_argument("--min-room", type=int, nargs=2, default=[8, 15], metavar=("LO", "HI"))
    bench.add_argument("--max-room", type=int, nargs=2, default=[35, 45], metavar=("LO", "HI"))
    bench.add_argument("--maps", metavar="DIR", help="benchmark map files instead of generating")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--hardware-tag", default="local")
    bench.add_argument("--timing-repeats", type=int, default=1)
    bench.add_argument("--plots", default="bar,violin,scatter", help="plot kinds or 'none'")
    bench.add_argument("--out", default="results")
    _add_common(bench)
    bench.set_defaults(func=cmd_benchmark)

    conv = subs.add_parser("convert", description="MovingAI maps to native format")
    conv.add_argument("files", nargs="+")
    conv.add_argument("--out", default=".")
    _add_common(conv)
    conv.set_defaults(func=cmd_convert)

    plot = subs.add_parser("plot", description="merge result files and draw charts")
    plot.add_argument("results", nargs="+", help="pbr1 result files")
    plot.add_argument("--kinds", default="bar,violin,scatter")
    plot.add_argument("--metric", default="path_deviation_pct", help="bar/violin metric")
    plot.add_argument("--x", default="obstacle_clearance_cells", help="scatter x metric")
    plot.add_argument("--y", default="time_seconds", help="scatter y metric")
    plot.add_argument("--out", default=".")
    _add_common(plot)
    plot.set_defaults(func=cmd_plot)

    return parser


_SUBCOMMANDS = ("generate", "run", "benchmark", "convert", "plot")


def _dispatch(argv: List[str]) -> int:
    if "--version" in argv:
        print(
            json.dumps(
                {
                    "pbgrid": pbgrid.__version__,
                    "map_schema": NATIVE_VERSION,
                    "result_schema": RESULT_SCHEMA,
                },
                sort_keys=True,
            )
        )
        return 0
    overrides, rest = _extract_planner_overrides(argv)
    parser = build_parser()
    ns = parser.parse_args(rest)
    if not getattr(ns, "command", None):
        parser.print_help()
        return 1
    sub = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    ).choices[ns.command]
    file_values = load_config_file(ns.config) if ns.config else {}
    dotted = _apply_overlay(sub, ns, rest, file_values)
    for planner_token, params in dotted.items():
        bucket = overrides.setdefault(planner_token, {})
        for key, value in params.items():
            bucket.setdefault(key, value)  # flags win over the file
    if getattr(ns, "complex", False):
        ns.simple = False
    return ns.func(ns, overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        return _dispatch(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (MapError, DomainError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except InconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 3
    except (ParseError, VersionError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
