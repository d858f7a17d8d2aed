"""File writers: population tables, edge lists, graph formats, reports.

All writers emit deterministic bytes for a given input (UTF-8, ``\\n``
line endings, stable ordering) so identical runs produce identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

from .errors import BNFormatError, IntegrityError
from .linker import MatchingReport
from .netmetrics import GraphStats, SweepRow
from .population import Population
from .socialgraph import SocialGraph, TypedLink

EDGE_COLORS = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a",
    "#66a61e", "#e6ab02", "#a6761d", "#666666",
]


def _open_w(path: Path):
    return open(path, "w", encoding="utf-8", newline="")


def write_population_csv(pop: Population, path: str | Path) -> Path:
    """One row per agent: id plus every attribute, labels verbatim."""
    path = Path(path)
    names = [v.name for v in pop.network.variables]
    with _open_w(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", *names])
        columns = [pop.labels(name) for name in names]
        for i in range(pop.size):
            writer.writerow([i, *(str(col[i]) for col in columns)])
    return path


def write_edge_csv(graph: SocialGraph, type_name: str, path: str | Path) -> Path:
    path = Path(path)
    directed = int(graph.directed[type_name])
    with _open_w(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "target", "directed", "provenance"])
        for link in graph.links[type_name]:
            writer.writerow([link.a, link.b, directed, link.provenance])
    return path


def write_graph_csv(graph: SocialGraph, nodes_path: str | Path,
                    edges_path: str | Path) -> list[Path]:
    """Merged two-file export: nodes with attributes, edges with a type column."""
    nodes_path, edges_path = Path(nodes_path), Path(edges_path)
    if graph.population is None:
        raise IntegrityError("graph has no population to export")
    write_population_csv(graph.population, nodes_path)
    with _open_w(edges_path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "target", "type", "directed", "provenance"])
        for type_name in graph.types:
            directed = int(graph.directed[type_name])
            for link in graph.links[type_name]:
                writer.writerow([link.a, link.b, type_name, directed, link.provenance])
    return [nodes_path, edges_path]


def write_graphml(graph: SocialGraph, path: str | Path) -> Path:
    """GraphML with agent attributes as node keys and type as an edge key."""
    path = Path(path)
    if graph.population is None:
        raise IntegrityError("graph has no population to export")
    pop = graph.population
    names = [v.name for v in pop.network.variables]
    lines: list[str] = []
    lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    lines.append(
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">'
    )
    for i, name in enumerate(names):
        lines.append(
            f'  <key id="d{i}" for="node" attr.name={quoteattr(name)} '
            f'attr.type="string"/>'
        )
    lines.append('  <key id="etype" for="edge" attr.name="type" attr.type="string"/>')
    lines.append(
        '  <key id="eprov" for="edge" attr.name="provenance" attr.type="string"/>'
    )
    lines.append('  <graph id="G" edgedefault="undirected">')
    columns = [pop.labels(name) for name in names]
    for agent_id in range(pop.size):
        lines.append(f'    <node id="n{agent_id}">')
        for i in range(len(names)):
            lines.append(
                f'      <data key="d{i}">{escape(str(columns[i][agent_id]))}</data>'
            )
        lines.append("    </node>")
    for type_name in graph.types:
        directed = "true" if graph.directed[type_name] else "false"
        for link in graph.links[type_name]:
            lines.append(
                f'    <edge source="n{link.a}" target="n{link.b}" '
                f'directed="{directed}">'
            )
            lines.append(f'      <data key="etype">{escape(type_name)}</data>')
            lines.append(f'      <data key="eprov">{link.provenance}</data>')
            lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_dot(graph: SocialGraph, path: str | Path) -> Path:
    """DOT export with one color per type, for small-graph inspection."""
    path = Path(path)
    lines = ["digraph popweave {", "  node [shape=point];"]
    for type_name in graph.types:
        color = EDGE_COLORS[graph.types.index(type_name) % len(EDGE_COLORS)]
        arrow = "" if graph.directed[type_name] else " dir=none"
        for link in graph.links[type_name]:
            lines.append(
                f'  {link.a} -> {link.b} [color="{color}" '
                f'label="{type_name}"{arrow}];'
            )
    lines.append("}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_matching_report(report: MatchingReport, path: str | Path) -> Path:
    path = Path(path)
    doc = {
        name: {
            "required": r.required,
            "created_links": r.created_links,
            "created_stubs": r.created_stubs,
            "orphans": r.orphans,
            "fallbacks": r.fallbacks,
            "side_a_size": r.side_a_size,
            "side_b_size": r.side_b_size,
            "matching_error": r.matching_error,
            "failure": r.failure,
        }
        for name, r in report.per_type.items()
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


STATS_HEADER = [
    "n", "edges", "density", "transitivity", "avg_path_length",
    "path_sample", "largest_component", "components", "mean_degree",
]


def write_stats_csv(
    stats: GraphStats, path: str | Path, per_type_means: dict[str, float] | None = None
) -> Path:
    path = Path(path)
    header = list(STATS_HEADER)
    values: list = [
        stats.n, stats.edge_count, f"{stats.density:.10g}",
        f"{stats.transitivity:.10g}",
        "" if stats.avg_path_length is None else f"{stats.avg_path_length:.10g}",
        stats.path_sample, stats.largest_component,
        len(stats.component_sizes), f"{stats.mean_degree:.10g}",
    ]
    for type_name, mean in (per_type_means or {}).items():
        header.append(f"mean_degree_{type_name}")
        values.append(f"{mean:.10g}")
    with _open_w(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerow(values)
    return path


def _count_agents(nodes_path: Path) -> int:
    with open(nodes_path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "id":
            raise BNFormatError(f"{nodes_path}: expected an 'id' column first")
        return sum(1 for _ in reader)


def read_run_dir(run_dir: str | Path) -> SocialGraph:
    """Rebuild a graph from a generate output directory.

    Needs ``population.csv`` plus either the merged ``edges.csv`` or the
    per-type ``edges_<type>.csv`` files.
    """
    run_dir = Path(run_dir)
    nodes_path = run_dir / "population.csv"
    if not nodes_path.exists():
        nodes_path = run_dir / "nodes.csv"
    if not nodes_path.exists():
        raise BNFormatError(f"{run_dir}: no population.csv or nodes.csv")
    merged = run_dir / "edges.csv"
    if merged.exists():
        return read_graph_csv(nodes_path, merged)

    n = _count_agents(nodes_path)
    if n == 0:
        raise BNFormatError(f"{nodes_path}: no agents")
    per_type = sorted(run_dir.glob("edges_*.csv"))
    if not per_type:
        raise BNFormatError(f"{run_dir}: no edge files found")
    directed: dict[str, bool] = {}
    rows: list[tuple[str, int, int, str]] = []
    for path in per_type:
        type_name = path.stem[len("edges_"):]
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["source", "target", "directed", "provenance"]:
                raise BNFormatError(f"{path}: unexpected header {header}")
            directed[type_name] = False
            for record in reader:
                directed[type_name] = record[2] == "1"
                rows.append((type_name, int(record[0]), int(record[1]), record[3]))
    graph = SocialGraph(None, directed, n=n)
    for type_name, a, b, provenance in rows:
        graph.add_link(TypedLink(type_name, a, b, provenance))
    return graph


def read_graph_csv(nodes_path: str | Path, edges_path: str | Path) -> SocialGraph:
    """Load a graph back from the two-file CSV export (or conforming files)."""
    nodes_path, edges_path = Path(nodes_path), Path(edges_path)
    n = _count_agents(nodes_path)
    if n == 0:
        raise BNFormatError(f"{nodes_path}: no agents")

    rows: list[tuple[int, int, str, bool, str]] = []
    directed: dict[str, bool] = {}
    with open(edges_path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["source", "target", "type", "directed", "provenance"]
        if header != expected:
            raise BNFormatError(f"{edges_path}: expected header {expected}")
        for record in reader:
            try:
                a, b = int(record[0]), int(record[1])
                type_name = record[2]
                is_directed = record[3] == "1"
            except (ValueError, IndexError):
                raise BNFormatError(
                    f"{edges_path}: malformed row {record}"
                ) from None
            directed.setdefault(type_name, is_directed)
            rows.append((a, b, type_name, is_directed, record[4]))

    graph = SocialGraph(None, directed, n=n)
    for a, b, type_name, _, provenance in rows:
        graph.add_link(TypedLink(type_name, a, b, provenance))
    return graph


def sweep_header(type_names: Sequence[str]) -> list[str]:
    header = ["n", "seed", "status", "distribution_error", "matching_error_mean"]
    for t in type_names:
        header.append(f"matching_error_{t}")
    for t in type_names:
        header.append(f"fallbacks_{t}")
    for t in type_names:
        header.append(f"mean_degree_{t}")
    for t in type_names:
        header.append(f"theory_degree_{t}")
    header += [
        "density", "transitivity", "avg_path_length", "path_sample",
        "largest_component", "mean_degree",
    ]
    return header


def write_sweep_csv(
    rows: Sequence[SweepRow], type_names: Sequence[str], path: str | Path
) -> Path:
    """Plot-ready sweep table with a fixed, documented column order."""
    path = Path(path)

    def fmt(x) -> str:
        if x is None:
            return ""
        if isinstance(x, float):
            return f"{x:.10g}"
        return str(x)

    with _open_w(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(sweep_header(type_names))
        for row in rows:
            record = [row.n, row.seed, row.status,
                      fmt(row.distribution_error), fmt(row.mean_matching_error)]
            record += [fmt(row.matching_errors.get(t)) for t in type_names]
            record += [fmt(row.fallbacks.get(t)) for t in type_names]
            record += [fmt(row.mean_degree_by_type.get(t)) for t in type_names]
            record += [fmt(row.theory_degree_by_type.get(t)) for t in type_names]
            s = row.stats
            if s is None:
                record += [""] * 6
            else:
                record += [
                    fmt(s.density), fmt(s.transitivity),
                    fmt(s.avg_path_length), s.path_sample,
                    s.largest_component, fmt(s.mean_degree),
                ]
            writer.writerow(record)
    return path
