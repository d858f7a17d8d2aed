"""Error measures and graph statistics for generated networks.

All structural statistics (density, transitivity, path lengths,
components) are computed on the simple undirected projection of the
typed multigraph: types merged, directions dropped. Transitivity is the
global ratio 3 * triangles / connected triples, computed exactly; the
average path length is estimated by BFS from a sample of sources inside
the largest component (with the sample covering the whole component it
equals the exact all-pairs mean).
"""

from __future__ import annotations

import collections
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bn import BayesianNetwork
from .bn_io import ScenarioConfig
from .errors import IntegrityError, ScenarioError
from .linker import MatchingReport
from .population import Population, empirical_conditionals
from .socialgraph import SocialGraph


@dataclass
class GraphStats:
    n: int
    edge_count: int
    density: float
    transitivity: float
    avg_path_length: float | None
    path_sample: int
    component_sizes: list[int]
    degree_hist: dict[int, int]
    per_type_degree_hist: dict[str, dict[int, int]]
    mean_degree: float

    @property
    def largest_component(self) -> int:
        return self.component_sizes[0] if self.component_sizes else 0


def distribution_error(bn: BayesianNetwork, pop: Population) -> float:
    """Count-weighted mean gap between observed and declared conditionals.

    Per variable: over parent configurations observed at least once, the
    mean absolute difference between the empirical row and the CPT row,
    weighted by how often each configuration occurred; the score is the
    unweighted mean over variables.
    """
    table = empirical_conditionals(bn, pop)
    per_variable: list[float] = []
    for v in bn.variables:
        rows = table[v.name]
        if not rows:
            continue
        weighted = 0.0
        total = 0
        for config, row in rows.items():
            r = _row_index(bn, v.name, config)
            gap = float(np.abs(row.frequencies - v.cpt[r]).mean())
            count = int(row.counts.sum())
            weighted += count * gap
            total += count
        per_variable.append(weighted / total)
    return float(np.mean(per_variable)) if per_variable else 0.0


def _row_index(bn: BayesianNetwork, variable: str, config: Sequence[str]) -> int:
    v = bn.variable(variable)
    row = 0
    for parent, label in zip(v.parents, config):
        pv = bn.variable(parent)
        row = row * len(pv.domain) + pv.domain_index(label)
    return row


def matching_error(report: MatchingReport) -> dict[str, float]:
    """Per-type unmet-demand rate, in [0, 1]."""
    return report.errors()


def _adjacency(graph: SocialGraph) -> list[set[int]]:
    n = graph.n
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in graph.undirected_pairs():
        adj[a].add(b)
        adj[b].add(a)
    return adj


def _components(adj: list[set[int]]) -> list[list[int]]:
    n = len(adj)
    seen = [False] * n
    components: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        queue = collections.deque([start])
        seen[start] = True
        members = []
        while queue:
            node = queue.popleft()
            members.append(node)
            for other in adj[node]:
                if not seen[other]:
                    seen[other] = True
                    queue.append(other)
        components.append(members)
    components.sort(key=len, reverse=True)
    return components


def _bfs_distance_sum(adj: list[set[int]], source: int) -> tuple[int, int]:
    """Total distance and count of nodes reached from ``source``."""
    dist = {source: 0}
    queue = collections.deque([source])
    total = 0
    while queue:
        node = queue.popleft()
        d = dist[node]
        for other in adj[node]:
            if other not in dist:
                dist[other] = d + 1
                total += d + 1
                queue.append(other)
    return total, len(dist) - 1


def graph_stats(
    graph: SocialGraph,
    path_sample_k: int,
    rng: np.random.Generator,
) -> GraphStats:
    """Density, transitivity, path lengths, components and degrees."""
    n = graph.n
    if n < 2:
        raise IntegrityError("density is undefined for fewer than 2 agents")
    pairs = graph.undirected_pairs()
    adj = _adjacency(graph)

    density = len(pairs) / (n * (n - 1) / 2)

    triples = sum(len(neigh) * (len(neigh) - 1) // 2 for neigh in adj)
    closed = 0  # = 3 * triangles: each edge contributes its common neighbors
    for a, b in pairs:
        small, large = (adj[a], adj[b]) if len(adj[a]) < len(adj[b]) else (adj[b], adj[a])
        closed += sum(1 for x in small if x in large)
    transitivity = closed / triples if triples else 0.0

    components = _components(adj)
    largest = components[0]
    avg_path: float | None = None
    sample_size = 0
    if len(largest) >= 2:
        if path_sample_k >= len(largest):
            sources = largest
        else:
            picked = rng.choice(len(largest), size=path_sample_k, replace=False)
            sources = [largest[int(i)] for i in picked]
        total = 0
        reached = 0
        for source in sources:
            t, r = _bfs_distance_sum(adj, source)
            total += t
            reached += r
        sample_size = len(sources)
        avg_path = total / reached if reached else None

    degrees = [len(neigh) for neigh in adj]
    degree_hist = dict(sorted(collections.Counter(degrees).items()))
    per_type: dict[str, dict[int, int]] = {}
    for type_name in graph.types:
        counts = [0] * n
        for link in graph.links[type_name]:
            counts[link.a] += 1
            counts[link.b] += 1
        per_type[type_name] = dict(sorted(collections.Counter(counts).items()))

    return GraphStats(
        n=n,
        edge_count=len(pairs),
        density=density,
        transitivity=transitivity,
        avg_path_length=avg_path,
        path_sample=sample_size,
        component_sizes=[len(c) for c in components],
        degree_hist=degree_hist,
        per_type_degree_hist=per_type,
        mean_degree=float(np.mean(degrees)) if degrees else 0.0,
    )


@dataclass
class InteractionNetwork:
    """Undirected pairs weighted by a probability of interacting."""

    edges: dict[tuple[int, int], float]

    def weight(self, a: int, b: int) -> float:
        key = (a, b) if a <= b else (b, a)
        return self.edges.get(key, 0.0)


def derive_interaction_network(
    graph: SocialGraph, weights: Mapping[str, float]
) -> InteractionNetwork:
    """Noisy-or combination of per-type interaction probabilities.

    A pair connected through types S gets weight 1 - prod(1 - p_t) over
    t in S; types missing from ``weights`` contribute 0, and pairs whose
    weight is 0 are omitted entirely.
    """
    for type_name, p in weights.items():
        if not 0.0 <= p <= 1.0:
            raise ScenarioError(
                f"interaction weight for '{type_name}' outside [0, 1]: {p}"
            )
    types_by_pair: dict[tuple[int, int], set[str]] = {}
    for link in graph.all_links():
        a, b = (link.a, link.b) if link.a <= link.b else (link.b, link.a)
        types_by_pair.setdefault((a, b), set()).add(link.type)
    edges: dict[tuple[int, int], float] = {}
    for pair, types in types_by_pair.items():
        miss = 1.0
        for t in sorted(types):
            miss *= 1.0 - weights.get(t, 0.0)
        w = 1.0 - miss
        if w > 0.0:
            edges[pair] = w
    return InteractionNetwork(edges)


# --- size/seed sweep --------------------------------------------------------


@dataclass
class SweepRow:
    n: int
    seed: int
    status: str = "ok"
    distribution_error: float | None = None
    matching_errors: dict[str, float] = field(default_factory=dict)
    fallbacks: dict[str, int] = field(default_factory=dict)
    mean_degree_by_type: dict[str, float] = field(default_factory=dict)
    theory_degree_by_type: dict[str, float] = field(default_factory=dict)
    stats: GraphStats | None = None

    @property
    def mean_matching_error(self) -> float | None:
        if not self.matching_errors:
            return None
        return float(np.mean(list(self.matching_errors.values())))


def sweep(
    scenario: ScenarioConfig,
    sizes: Sequence[int],
    seeds: int | Sequence[int],
    path_sample_k: int = 64,
    workers: int = 1,
) -> list[SweepRow]:
    """Run the full pipeline per (size, seed) and collect one row each.

    ``seeds`` is either a repetition count (expanded to consecutive seeds
    starting at the scenario's) or an explicit seed list.
    """
    from .pipeline import run_pipeline  # local import: pipeline builds on us

    if isinstance(seeds, int):
        seed_list = [scenario.seed + i for i in range(seeds)]
    else:
        seed_list = list(seeds)
    jobs = [(n, s) for n in sizes for s in seed_list]

    def one(job: tuple[int, int]) -> SweepRow:
        n, seed = job
        row = SweepRow(n=n, seed=seed)
        try:
            result = run_pipeline(scenario, size=n, seed=seed)
            row.distribution_error = distribution_error(
                scenario.agent_network, result.population
            )
            row.matching_errors = result.report.errors()
            for name, tr in result.report.per_type.items():
                row.fallbacks[name] = tr.fallbacks
                if tr.side_a_size:
                    row.theory_degree_by_type[name] = tr.required / tr.side_a_size
                    row.mean_degree_by_type[name] = (
                        tr.created_stubs / tr.side_a_size
                    )
            row.stats = graph_stats(
                result.graph, path_sample_k, result.stats_rng
            )
        except Exception as exc:  # row-level isolation by contract
            row.status = f"error: {exc}"
        return row

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, jobs))
    return [one(job) for job in jobs]
