"""Create links of each matching type by constraining the matching network.

For one link type the procedure is:

1. Condition the matching network on ``link = yes``; agents whose
   attribute vector keeps positive probability on a side form that
   side's candidate set.
2. Visit side-A candidates in a seeded random permutation. While an
   agent has capacity left, sample a peer prototype from the exact
   posterior over the other side's attributes, and realize it with a
   population member carrying exactly those attributes (capacity
   permitting). If none exists, fall back to a uniform pick among
   support-consistent candidates; failing that, the stub stays orphan.

Consistency checks and peer posteriors are cached per distinct attribute
vector, never per agent, so cost scales with attribute diversity rather
than population size.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bn import (
    ZERO_TOL,
    BayesianNetwork,
    joint_posterior,
    probability_of_evidence,
)
from .bn_io import (
    LINK_YES,
    SIDE_A_PREFIX,
    SIDE_B_PREFIX,
    LinkTypeSpec,
    ScenarioConfig,
)
from .errors import ImpossibleEvidenceError, ScenarioError, UnsatisfiableLinkTypeError
from .population import Population
from .socialgraph import (
    PROVENANCE_FALLBACK,
    PROVENANCE_SAMPLED,
    SocialGraph,
    TypedLink,
)


@dataclass
class CandidateSets:
    side_a: list[int]
    side_b: list[int]


@dataclass
class TypeReport:
    """Matching outcome for one link type, in stub units.

    ``required`` counts the link stubs demanded by side-A capacities;
    every created link serves one stub on each of its governed sides, so
    symmetric (single-pool) types count two stubs per link.
    """

    type: str
    required: int = 0
    created_links: int = 0
    created_stubs: int = 0
    orphans: int = 0
    fallbacks: int = 0
    side_a_size: int = 0
    side_b_size: int = 0
    failure: str | None = None

    @property
    def matching_error(self) -> float:
        if self.failure is not None and self.required == 0:
            return 1.0
        if self.required == 0:
            return 0.0
        return 1.0 - self.created_stubs / self.required


@dataclass
class MatchingReport:
    per_type: dict[str, TypeReport] = field(default_factory=dict)

    def errors(self) -> dict[str, float]:
        return {name: r.matching_error for name, r in self.per_type.items()}

    @property
    def mean_error(self) -> float:
        if not self.per_type:
            return 0.0
        return float(np.mean([r.matching_error for r in self.per_type.values()]))


# --- cached inference kernel ----------------------------------------------


class _PeerDistribution:
    """Posterior over peer attribute vectors, restricted to its support."""

    __slots__ = ("vectors", "probabilities", "_cum")

    def __init__(self, vectors: list[tuple[str, ...]], probabilities: np.ndarray):
        self.vectors = vectors
        self.probabilities = probabilities
        self._cum = np.cumsum(probabilities)

    def sample(self, rng: np.random.Generator) -> tuple[str, ...]:
        i = int(np.searchsorted(self._cum, rng.random() * self._cum[-1], "right"))
        return self.vectors[min(i, len(self.vectors) - 1)]


class MatchKernel:
    """Per-network cache of consistency checks and peer posteriors."""

    def __init__(self, network: BayesianNetwork, link_variable: str):
        self.network = network
        self.link_variable = link_variable
        self.a1_attrs = _side_attrs(network, SIDE_A_PREFIX)
        self.a2_attrs = _side_attrs(network, SIDE_B_PREFIX)
        self._consistent: dict[tuple[str, tuple[str, ...]], bool] = {}
        self._peer: dict[tuple[str, ...], _PeerDistribution | None] = {}
        self._pair: dict[tuple[tuple[str, ...], tuple[str, ...]], bool] = {}

    def _evidence(self, prefix: str, attrs: Sequence[str], vec: Sequence[str]):
        ev = {prefix + a: v for a, v in zip(attrs, vec)}
        ev[self.link_variable] = LINK_YES
        return ev

    def link_satisfiable(self) -> bool:
        return (
            probability_of_evidence(self.network, {self.link_variable: LINK_YES})
            > ZERO_TOL
        )

    def side_consistent(self, prefix: str, vec: tuple[str, ...]) -> bool:
        """True when a side's attribute vector co-exists with link=yes."""
        key = (prefix, vec)
        hit = self._consistent.get(key)
        if hit is None:
            attrs = self.a1_attrs if prefix == SIDE_A_PREFIX else self.a2_attrs
            p = probability_of_evidence(
                self.network, self._evidence(prefix, attrs, vec)
            )
            hit = p > ZERO_TOL
            self._consistent[key] = hit
        return hit

    def peer_distribution(self, a1_vec: tuple[str, ...]) -> _PeerDistribution | None:
        """p(a2 attributes | a1 attributes, link=yes) over the support.

        None when the evidence is impossible (no compatible peer exists).
        """
        if a1_vec in self._peer:
            return self._peer[a1_vec]
        targets = [SIDE_B_PREFIX + a for a in self.a2_attrs]
        evidence = self._evidence(SIDE_A_PREFIX, self.a1_attrs, a1_vec)
        try:
            names, table = joint_posterior(self.network, evidence, targets)
        except ImpossibleEvidenceError:
            self._peer[a1_vec] = None
            return None
        domains = [self.network.variable(t).domain for t in names]
        flat = table.reshape(-1)
        vectors: list[tuple[str, ...]] = []
        probs: list[float] = []
        for combo, p in zip(itertools.product(*domains), flat):
            if p > ZERO_TOL:
                vectors.append(tuple(combo))
                probs.append(float(p))
        if not vectors:
            self._peer[a1_vec] = None
            return None
        dist = _PeerDistribution(vectors, np.asarray(probs))
        self._peer[a1_vec] = dist
        return dist

    def pair_consistent(
        self, a1_vec: tuple[str, ...], a2_vec: tuple[str, ...]
    ) -> bool:
        """Joint support check for a realized pair (used by verification)."""
        key = (a1_vec, a2_vec)
        hit = self._pair.get(key)
        if hit is None:
            ev = self._evidence(SIDE_A_PREFIX, self.a1_attrs, a1_vec)
            ev.update(
                {SIDE_B_PREFIX + a: v for a, v in zip(self.a2_attrs, a2_vec)}
            )
            hit = probability_of_evidence(self.network, ev) > ZERO_TOL
            self._pair[key] = hit
        return hit


def _side_attrs(network: BayesianNetwork, prefix: str) -> list[str]:
    return [
        v.name[len(prefix):] for v in network.variables if v.name.startswith(prefix)
    ]


_KERNELS: "weakref.WeakKeyDictionary[BayesianNetwork, dict[str, MatchKernel]]"
_KERNELS = weakref.WeakKeyDictionary()


def kernel_for(network: BayesianNetwork, link_variable: str) -> MatchKernel:
    per_net = _KERNELS.setdefault(network, {})
    kernel = per_net.get(link_variable)
    if kernel is None:
        kernel = MatchKernel(network, link_variable)
        per_net[link_variable] = kernel
    return kernel


# --- operations ------------------------------------------------------------


def derive_candidate_sets(
    network: BayesianNetwork, link_variable: str, pop: Population
) -> CandidateSets:
    """Agents whose attributes keep positive probability under link=yes."""
    kernel = kernel_for(network, link_variable)
    if not kernel.link_satisfiable():
        raise UnsatisfiableLinkTypeError(
            f"'{link_variable}' can never be '{LINK_YES}'"
        )
    sides = []
    for prefix, attrs in (
        (SIDE_A_PREFIX, kernel.a1_attrs),
        (SIDE_B_PREFIX, kernel.a2_attrs),
    ):
        members: list[int] = []
        for vec, ids in pop.index_by(attrs).items():
            if kernel.side_consistent(prefix, vec):
                members.extend(int(i) for i in ids)
        members.sort()
        sides.append(members)
    return CandidateSets(side_a=sides[0], side_b=sides[1])


def sample_peer_prototype(
    network: BayesianNetwork,
    a1_attributes: Mapping[str, str],
    rng: np.random.Generator,
    link_variable: str,
) -> dict[str, str]:
    """Sample a peer attribute vector from p(a2 | a1 attributes, link=yes)."""
    kernel = kernel_for(network, link_variable)
    vec = tuple(a1_attributes[a] for a in kernel.a1_attrs)
    dist = kernel.peer_distribution(vec)
    if dist is None:
        raise ImpossibleEvidenceError(
            f"no prototype: attributes {dict(a1_attributes)} are incompatible "
            f"with {link_variable}={LINK_YES}"
        )
    drawn = dist.sample(rng)
    return dict(zip(kernel.a2_attrs, drawn))


def _draw_from_bucket(
    bucket: list[int],
    rng: np.random.Generator,
    cap: np.ndarray,
    excluded: set[int],
) -> int | None:
    """Uniform pick among bucket members with capacity, lazily compacting."""
    attempts = 0
    while bucket and attempts < 16:
        j = int(rng.integers(len(bucket)))
        b = bucket[j]
        if cap[b] <= 0:
            bucket[j] = bucket[-1]
            bucket.pop()
            continue
        if b in excluded:
            attempts += 1
            continue
        return b
    survivors = [b for b in bucket if cap[b] > 0]
    bucket[:] = survivors
    eligible = [b for b in survivors if b not in excluded]
    if not eligible:
        return None
    return eligible[int(rng.integers(len(eligible)))]


def _draw_from_support(
    buckets: list[list[int]],
    rng: np.random.Generator,
    cap: np.ndarray,
    excluded: set[int],
) -> int | None:
    """Uniform pick across several buckets (the posterior support union)."""
    for bucket in buckets:
        bucket[:] = [b for b in bucket if cap[b] > 0]
    total = sum(len(b) for b in buckets)
    if total == 0:
        return None
    for _ in range(16):
        r = int(rng.integers(total))
        for bucket in buckets:
            if r < len(bucket):
                b = bucket[r]
                if b not in excluded:
                    return b
                break
            r -= len(bucket)
    eligible = [b for bucket in buckets for b in bucket if b not in excluded]
    if not eligible:
        return None
    return eligible[int(rng.integers(len(eligible)))]


def create_links_for_type(
    spec: LinkTypeSpec, pop: Population, rng: np.random.Generator
) -> tuple[list[TypedLink], TypeReport]:
    """Run the full matching procedure for one link type."""
    if not spec.is_matching:
        raise ScenarioError(f"'{spec.name}' is not a matching type")
    if spec.network is None:
        raise ScenarioError(f"link type '{spec.name}' has no loaded network")
    key_a = pop.capacity_key(spec, "a")
    key_b = pop.capacity_key(spec, "b")
    if key_a not in pop.capacity:
        pop.init_capacities([spec])
    cap_a = pop.capacity[key_a]
    cap_b = pop.capacity[key_b]
    initial_a = pop.initial_capacity[key_a]

    kernel = kernel_for(spec.network, spec.link_variable)
    cands = derive_candidate_sets(spec.network, spec.link_variable, pop)
    side_a = cands.side_a

    report = TypeReport(
        type=spec.name,
        required=int(initial_a[side_a].sum()) if side_a else 0,
        side_a_size=len(side_a),
        side_b_size=len(cands.side_b),
    )

    index = pop.index_by(kernel.a2_attrs)
    buckets: dict[tuple[str, ...], list[int]] = {}

    def bucket(vec: tuple[str, ...]) -> list[int]:
        got = buckets.get(vec)
        if got is None:
            got = [int(i) for i in index.get(vec, ())]
            buckets[vec] = got
        return got

    links: list[TypedLink] = []
    partners: dict[int, set[int]] = {}

    order = rng.permutation(np.asarray(side_a, dtype=np.int64)) if side_a else []
    for a1 in order:
        a1 = int(a1)
        if cap_a[a1] <= 0:
            continue
        a1_vec = pop.vector(kernel.a1_attrs, a1)
        dist = kernel.peer_distribution(a1_vec)
        if dist is None:
            continue  # no compatible peer exists; stubs stay orphan
        while cap_a[a1] > 0:
            proto = dist.sample(rng)
            excluded = partners.get(a1, set()) | {a1}
            b = _draw_from_bucket(bucket(proto), rng, cap_b, excluded)
            provenance = PROVENANCE_SAMPLED
            if b is None:
                b = _draw_from_support(
                    [bucket(v) for v in dist.vectors], rng, cap_b, excluded
                )
                provenance = PROVENANCE_FALLBACK
            if b is None:
                # support exhausted: later stubs of this agent cannot fare
                # better, so leave them in the ledger (counted below)
                break
            links.append(TypedLink(spec.name, a1, b, provenance))
            partners.setdefault(a1, set()).add(b)
            partners.setdefault(b, set()).add(a1)
            cap_a[a1] -= 1
            cap_b[b] -= 1
            if provenance == PROVENANCE_FALLBACK:
                report.fallbacks += 1
            report.created_links += 1

    # Conservation: every capacity decrement on the governed side serves
    # exactly one required stub, so unmet demand is what remains.
    if side_a:
        report.orphans = int(cap_a[side_a].sum())
    report.created_stubs = report.required - report.orphans
    return links, report


def run_all_matching(
    scenario: ScenarioConfig, pop: Population, rng: np.random.Generator
) -> tuple[SocialGraph, MatchingReport]:
    """Process every matching type in declaration order into one graph."""
    if not pop.capacity:
        pop.init_capacities(scenario.matching_types)
    graph = SocialGraph(pop, {t.name: t.directed for t in scenario.link_types})
    report = MatchingReport()
    for spec in scenario.matching_types:
        try:
            links, type_report = create_links_for_type(spec, pop, rng)
        except UnsatisfiableLinkTypeError as exc:
            report.per_type[spec.name] = TypeReport(
                type=spec.name, failure=str(exc)
            )
            continue
        for link in links:
            graph.add_link(link)
        report.per_type[spec.name] = type_report
    return graph, report
