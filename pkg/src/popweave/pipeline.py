"""End-to-end run: population, matching links, transitive links."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bn_io import ScenarioConfig
from .linker import MatchingReport, run_all_matching
from .population import Population, generate_population
from .seeding import substream
from .socialgraph import SocialGraph
from .transitive import apply_all_rules


@dataclass
class PipelineResult:
    population: Population
    graph: SocialGraph
    report: MatchingReport
    size: int
    seed: int
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def stats_rng(self) -> np.random.Generator:
        return substream(self.seed, "stats")


def run_pipeline(
    scenario: ScenarioConfig, size: int | None = None, seed: int | None = None
) -> PipelineResult:
    """Generate agents, then matched links, then transitive links.

    (scenario, size, seed) fully determines the result; each stage draws
    from its own named substream.
    """
    n = scenario.population_size if size is None else size
    run_seed = scenario.seed if seed is None else seed
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    pop = generate_population(
        scenario.agent_network, n, run_seed, scenario.matching_types
    )
    timings["population"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    graph, report = run_all_matching(scenario, pop, substream(run_seed, "matching"))
    timings["matching"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    apply_all_rules(
        scenario.transitive_rules, graph, substream(run_seed, "transitive")
    )
    timings["transitive"] = time.perf_counter() - t0

    return PipelineResult(
        population=pop,
        graph=graph,
        report=report,
        size=n,
        seed=run_seed,
        timings=timings,
    )
