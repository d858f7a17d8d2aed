"""Command-line front end: validate, generate, stats, sweep.

Exit codes: 0 success, 1 warnings under --strict, 2 input error,
3 runtime failure.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bn_io import ScenarioConfig, load_scenario
from .errors import PopweaveError
from .exports import (
    read_run_dir,
    write_dot,
    write_edge_csv,
    write_graph_csv,
    write_graphml,
    write_matching_report,
    write_population_csv,
    write_stats_csv,
    write_sweep_csv,
)
from .linker import kernel_for
from .netmetrics import graph_stats, sweep
from .pipeline import run_pipeline
from .seeding import substream

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3


def _default_workers() -> int:
    raw = os.environ.get("POPWEAVE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="popweave",
        description="Generate synthetic populations and typed social networks "
        "from Bayesian-network scenarios.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario and its networks")
    p.add_argument("scenario", type=Path)
    p.add_argument("--strict", action="store_true",
                   help="exit 1 when warnings are present")

    p = sub.add_parser("generate", help="run the pipeline and export files")
    p.add_argument("scenario", type=Path)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=["graphml", "csv", "dot"],
                   default="graphml")

    p = sub.add_parser("stats", help="graph statistics for a generate output")
    p.add_argument("run_dir", type=Path)
    p.add_argument("--path-sample", type=int, default=1000,
                   help="BFS sources for the path-length estimate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None,
                   help="stats CSV path (default: <run_dir>/stats.csv)")
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("sweep", help="errors and stats across sizes and seeds")
    p.add_argument("scenario", type=Path)
    p.add_argument("--sizes", type=str, required=True,
                   help="comma-separated population sizes")
    p.add_argument("--seeds", type=int, default=1, help="seeds per size")
    p.add_argument("--out", type=Path, required=True, help="sweep CSV path")
    p.add_argument("--path-sample", type=int, default=64)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--no-plots", action="store_true")
    return parser


def _load(path: Path) -> ScenarioConfig:
    return load_scenario(path)


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        scenario = _load(args.scenario)
    except PopweaveError as exc:
        print(f"error: {exc}")
        return EXIT_INPUT
    warnings: list[str] = []
    for spec in scenario.matching_types:
        kernel = kernel_for(spec.network, spec.link_variable)
        if not kernel.link_satisfiable():
            warnings.append(
                f"unsatisfiable link type '{spec.name}': "
                f"'{spec.link_variable}' is never 'yes'"
            )
    print(f"scenario: {args.scenario}")
    print(f"agent network: {scenario.agent_bn_path} "
          f"({len(scenario.agent_network.variables)} variables)")
    print(f"link types: {len(scenario.link_types)} "
          f"({len(scenario.matching_types)} matching)")
    print(f"transitive rules: {len(scenario.transitive_rules)}")
    for w in warnings:
        print(f"warning: {w}")
    if warnings and args.strict:
        return EXIT_WARNINGS
    print("ok")
    return EXIT_OK


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        scenario = _load(args.scenario)
    except PopweaveError as exc:
        print(f"error: {exc}")
        return EXIT_INPUT
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        result = run_pipeline(scenario, size=args.size, seed=args.seed)
        t0 = time.perf_counter()
        written.append(write_population_csv(result.population, out / "population.csv"))
        for type_name in result.graph.types:
            written.append(
                write_edge_csv(result.graph, type_name,
                               out / f"edges_{type_name}.csv")
            )
        if args.format == "graphml":
            written.append(write_graphml(result.graph, out / "graph.graphml"))
        elif args.format == "dot":
            written.append(write_dot(result.graph, out / "graph.dot"))
        else:
            written.extend(
                write_graph_csv(result.graph, out / "nodes.csv", out / "edges.csv")
            )
        written.append(
            write_matching_report(result.report, out / "matching_report.json")
        )
        result.timings["export"] = time.perf_counter() - t0
    except PopweaveError as exc:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: {exc}")
        return EXIT_RUNTIME

    manifest = {
        "scenario": str(args.scenario),
        "size": result.size,
        "seed": result.seed,
        "tool_version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "timings": {k: round(v, 6) for k, v in result.timings.items()},
        "outputs": {p.name: _sha256(p) for p in written},
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )

    total_links = result.graph.link_count()
    print(f"agents: {result.population.size}")
    for name, tr in result.report.per_type.items():
        print(f"{name}: {tr.created_links} links, error {tr.matching_error:.4f} "
              f"({tr.orphans} orphan stubs, {tr.fallbacks} fallbacks)")
    for type_name in result.graph.types:
        if type_name not in result.report.per_type:
            print(f"{type_name}: {result.graph.link_count(type_name)} links "
                  f"(transitive)")
    print(f"total links: {total_links}")
    print(f"wrote {len(written) + 1} files to {out}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    try:
        graph = read_run_dir(args.run_dir)
    except PopweaveError as exc:
        print(f"error: {exc}")
        return EXIT_INPUT
    try:
        stats = graph_stats(graph, args.path_sample, substream(args.seed, "stats"))
    except PopweaveError as exc:
        print(f"error: {exc}")
        return EXIT_RUNTIME

    per_type_means = {
        t: 2 * graph.link_count(t) / graph.n for t in graph.types
    }
    out = args.out or (args.run_dir / "stats.csv")
    write_stats_csv(stats, out, per_type_means)

    print(f"agents: {stats.n}")
    print(f"edges (projection): {stats.edge_count}")
    print(f"density: {stats.density:.6f}")
    print(f"transitivity: {stats.transitivity:.4f}")
    if stats.avg_path_length is not None:
        print(f"avg path length: {stats.avg_path_length:.3f} "
              f"(from {stats.path_sample} sources)")
    print(f"largest component: {stats.largest_component} "
          f"of {stats.n} ({len(stats.component_sizes)} components)")
    for t, mean in per_type_means.items():
        print(f"mean degree [{t}]: {mean:.3f}")
    print(f"wrote {out}")
    if not args.no_plots:
        from .plots import plot_degree_histograms

        figure = plot_degree_histograms(stats, out.with_suffix("") .with_name(
            out.stem + "_degrees.png"))
        print(f"wrote {figure}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        scenario = _load(args.scenario)
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except PopweaveError as exc:
        print(f"error: {exc}")
        return EXIT_INPUT
    except ValueError:
        print(f"error: --sizes must be a comma-separated list of integers")
        return EXIT_INPUT
    if not sizes:
        print("error: --sizes is empty")
        return EXIT_INPUT

    rows = sweep(scenario, sizes, args.seeds,
                 path_sample_k=args.path_sample, workers=args.workers)
    type_names = [t.name for t in scenario.matching_types]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, type_names, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)")

    failed = [r for r in rows if r.status != "ok"]
    for row in failed:
        print(f"row n={row.n} seed={row.seed}: {row.status}")
    if not args.no_plots:
        from .plots import plot_sweep_errors, plot_sweep_stats

        stem = args.out.with_suffix("")
        for figure in (
            plot_sweep_errors(rows, type_names, Path(f"{stem}_errors.png")),
            plot_sweep_stats(rows, Path(f"{stem}_stats.png")),
        ):
            print(f"wrote {figure}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "generate": cmd_generate,
        "stats": cmd_stats,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except PopweaveError as exc:
        print(f"error: {exc}")
        return EXIT_RUNTIME


def entrypoint() -> None:
    sys.exit(main())
