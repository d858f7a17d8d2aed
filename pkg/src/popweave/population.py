"""Heterogeneous agent populations sampled from an agent network.

Agents are stored column-wise (one integer code array per attribute) so
generation, indexing and frequency counting stay vectorized at the
hundred-thousand-agent scale. Per-agent views are materialized on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .bn import BayesianNetwork, topological_order
from .bn_io import LinkTypeSpec
from .errors import CapacityError, IntegrityError
from .seeding import substream


@dataclass
class Agent:
    """Read view of one generated agent."""

    id: int
    attributes: dict[str, str]


class Population:
    """A generated population plus capacity ledgers and attribute indexes."""

    def __init__(self, network: BayesianNetwork, codes: dict[str, np.ndarray]):
        self.network = network
        self.codes = codes
        sizes = {len(arr) for arr in codes.values()}
        if len(sizes) != 1:
            raise IntegrityError("attribute columns disagree on population size")
        self.size = sizes.pop()
        self._domains = {
            v.name: np.asarray(v.domain, dtype=object) for v in network.variables
        }
        # capacity ledgers, keyed (link type, side); values are mutable int arrays
        self.capacity: dict[tuple[str, str], np.ndarray] = {}
        self.initial_capacity: dict[tuple[str, str], np.ndarray] = {}
        self._index_cache: dict[tuple[str, ...], dict] = {}

    def __len__(self) -> int:
        return self.size

    def label(self, attr: str, agent_id: int) -> str:
        return str(self._domains[attr][self.codes[attr][agent_id]])

    def labels(self, attr: str) -> np.ndarray:
        """All agents' labels for one attribute."""
        return self._domains[attr][self.codes[attr]]

    def attributes_of(self, agent_id: int) -> dict[str, str]:
        return {
            v.name: self.label(v.name, agent_id) for v in self.network.variables
        }

    def agent(self, agent_id: int) -> Agent:
        return Agent(agent_id, self.attributes_of(agent_id))

    def __iter__(self) -> Iterator[Agent]:
        return (self.agent(i) for i in range(self.size))

    def vector(self, attrs: Sequence[str], agent_id: int) -> tuple[str, ...]:
        return tuple(self.label(a, agent_id) for a in attrs)

    def index_by(self, attrs: Sequence[str]) -> dict[tuple[str, ...], np.ndarray]:
        """Group agent ids by their joint value on an attribute subset."""
        key = tuple(attrs)
        cached = self._index_cache.get(key)
        if cached is not None:
            return cached
        if not key:
            index = {(): np.arange(self.size)}
        else:
            columns = [self.labels(a) for a in key]
            groups: dict[tuple[str, ...], list[int]] = {}
            for i in range(self.size):
                vec = tuple(str(col[i]) for col in columns)
                groups.setdefault(vec, []).append(i)
            index = {vec: np.asarray(ids) for vec, ids in groups.items()}
        self._index_cache[key] = index
        return index

    # -- capacity ledgers ---------------------------------------------------

    def _rc_counts(self, attr: str) -> np.ndarray:
        domain = self.network.variable(attr).domain
        counts = np.empty(len(domain), dtype=np.int64)
        for i, label in enumerate(domain):
            try:
                counts[i] = int(label)
            except ValueError:
                bad = int(np.flatnonzero(self.codes[attr] == i)[0]) if np.any(
                    self.codes[attr] == i
                ) else 0
                raise CapacityError(
                    f"agent {bad}: attribute '{attr}' value '{label}' is not "
                    f"an integer"
                ) from None
        return counts[self.codes[attr]]

    def init_capacities(self, link_types: Sequence[LinkTypeSpec]) -> None:
        """Seed per-type degree counters from the declared RC attributes."""
        for spec in link_types:
            if not spec.is_matching:
                continue
            if spec.same:
                keys = [((spec.name, "both"), spec.rc_a)]
            else:
                keys = [((spec.name, "a"), spec.rc_a), ((spec.name, "b"), spec.rc_b)]
            for key, source in keys:
                if isinstance(source, int):
                    values = np.full(self.size, source, dtype=np.int64)
                else:
                    values = self._rc_counts(source)
                self.initial_capacity[key] = values.copy()
                self.capacity[key] = values.copy()

    def capacity_key(self, spec: LinkTypeSpec, side: str) -> tuple[str, str]:
        return (spec.name, "both" if spec.same else side)


def generate_population(
    bn: BayesianNetwork,
    n: int,
    seed: int,
    link_types: Sequence[LinkTypeSpec] | None = None,
) -> Population:
    """Sample ``n`` independent agents from the exact network joint.

    Sampling is ancestral: each variable is drawn from its CPT row given
    already-sampled parents, vectorized across the whole population.
    """
    if n < 1:
        raise ValueError("population size must be >= 1")
    rng = substream(seed, "population")
    codes: dict[str, np.ndarray] = {}
    for name in topological_order(bn):
        v = bn.variable(name)
        rows = np.zeros(n, dtype=np.int64)
        for parent in v.parents:
            pdom = len(bn.variable(parent).domain)
            rows = rows * pdom + codes[parent]
        cum = np.cumsum(v.cpt, axis=1)[rows]
        u = rng.random(n)
        codes[name] = np.minimum(
            (cum < u[:, None]).sum(axis=1), len(v.domain) - 1
        ).astype(np.int64)
    pop = Population(bn, codes)
    if link_types is not None:
        pop.init_capacities(link_types)
    return pop


@dataclass
class EmpiricalRow:
    counts: np.ndarray
    frequencies: np.ndarray


EmpiricalTable = dict[str, dict[tuple[str, ...], EmpiricalRow]]


def empirical_conditionals(bn: BayesianNetwork, pop: Population) -> EmpiricalTable:
    """Observed conditional frequencies in the same shape as the CPTs.

    Parent configurations never observed are absent from the result, not
    zero-filled.
    """
    table: EmpiricalTable = {}
    for v in bn.variables:
        if v.name not in pop.codes:
            raise IntegrityError(f"population lacks attribute '{v.name}'")
        parent_domains = [bn.variable(p).domain for p in v.parents]
        rows = np.zeros(pop.size, dtype=np.int64)
        for parent in v.parents:
            if parent not in pop.codes:
                raise IntegrityError(f"population lacks attribute '{parent}'")
            rows = rows * len(bn.variable(parent).domain) + pop.codes[parent]
        width = len(v.domain)
        n_rows = v.cpt.shape[0]
        flat = rows * width + pop.codes[v.name]
        counts = np.bincount(flat, minlength=n_rows * width).reshape(n_rows, width)
        per_var: dict[tuple[str, ...], EmpiricalRow] = {}
        for r in range(n_rows):
            total = int(counts[r].sum())
            if total == 0:
                continue
            config = _decode_config(r, parent_domains)
            per_var[config] = EmpiricalRow(
                counts=counts[r].copy(),
                frequencies=counts[r] / total,
            )
        table[v.name] = per_var
    return table


def _decode_config(
    row: int, parent_domains: Sequence[tuple[str, ...]]
) -> tuple[str, ...]:
    labels: list[str] = []
    for domain in reversed(parent_domains):
        labels.append(domain[row % len(domain)])
        row //= len(domain)
    return tuple(reversed(labels))


def config_row_index(
    bn: BayesianNetwork, variable: str, config: Mapping[str, str] | Sequence[str]
) -> int:
    """CPT row index for a parent configuration (labels in parent order)."""
    v = bn.variable(variable)
    if isinstance(config, Mapping):
        ordered = [config[p] for p in v.parents]
    else:
        ordered = list(config)
    row = 0
    for parent, label in zip(v.parents, ordered):
        pv = bn.variable(parent)
        row = row * len(pv.domain) + pv.domain_index(label)
    return row
