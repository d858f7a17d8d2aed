"""Discrete Bayesian networks: representation, validation, exact inference.

A network is a DAG of categorical variables, each carrying a conditional
probability table over its parents. Queries (joint probability, posterior
marginals, probability of evidence, posterior-consistent sampling) are
answered exactly. Inference runs variable elimination with a min-degree
ordering; ``enumerate_joint`` is the brute-force reference the tests pit
it against.

CPT layout: one row per parent configuration, row-major with the LAST
listed parent varying fastest; each row is a distribution over the
variable's domain.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    CycleError,
    EvidenceError,
    ImpossibleEvidenceError,
    StateSpaceError,
)

ROW_SUM_TOL = 1e-9
# Posterior mass below this is treated as unsupported, so float underflow
# cannot manufacture phantom candidates downstream.
ZERO_TOL = 1e-12
ENUMERATION_CAP = 10**6

Evidence = Mapping[str, str]
Assignment = dict[str, str]


@dataclass(frozen=True)
class Variable:
    """One categorical variable, its parents, and its CPT."""

    name: str
    domain: tuple[str, ...]
    parents: tuple[str, ...] = ()
    cpt: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(str(d) for d in self.domain))
        object.__setattr__(self, "parents", tuple(self.parents))
        table = np.asarray(self.cpt, dtype=float)
        if table.ndim == 1:
            table = table.reshape(1, -1)
        object.__setattr__(self, "cpt", table)

    def domain_index(self, label: str) -> int:
        try:
            return self.domain.index(label)
        except ValueError:
            raise EvidenceError(
                f"'{label}' is not in the domain of variable '{self.name}'"
            ) from None


class BayesianNetwork:
    """An ordered collection of variables.

    Construction is permissive (duplicate names, dangling parents and
    cycles are representable) so that ``validate_network`` can report
    problems instead of crashing; inference requires a valid network.
    """

    def __init__(self, variables: Iterable[Variable]):
        self.variables: tuple[Variable, ...] = tuple(variables)
        self._by_name: dict[str, Variable] = {}
        for v in self.variables:
            self._by_name.setdefault(v.name, v)
        self._topo: list[str] | None = None
        self._posterior_cache: dict = {}

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise EvidenceError(f"unknown variable '{name}'") from None

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def state_count(self) -> int:
        return math.prod(len(v.domain) for v in self.variables)


@dataclass(frozen=True)
class Problem:
    variable: str | None
    kind: str
    message: str


@dataclass
class ValidationReport:
    problems: list[Problem] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __str__(self) -> str:
        if self.ok:
            return "no problems"
        return "\n".join(f"[{p.kind}] {p.message}" for p in self.problems)


def validate_network(bn: BayesianNetwork) -> ValidationReport:
    """Check every structural invariant; reports problems, never raises."""
    problems: list[Problem] = []
    seen: set[str] = set()
    for v in bn.variables:
        if v.name in seen:
            problems.append(
                Problem(v.name, "duplicate", f"variable '{v.name}' declared twice")
            )
        seen.add(v.name)

    for v in bn.variables:
        if len(v.domain) < 1:
            problems.append(
                Problem(v.name, "empty-domain", f"variable '{v.name}' has no values")
            )
        if len(set(v.domain)) != len(v.domain):
            problems.append(
                Problem(v.name, "duplicate-label", f"'{v.name}' repeats a domain label")
            )
        for p in v.parents:
            if p == v.name:
                problems.append(
                    Problem(v.name, "self-parent", f"'{v.name}' lists itself as parent")
                )
            elif p not in bn:
                problems.append(
                    Problem(
                        v.name,
                        "dangling-parent",
                        f"'{v.name}' references missing parent '{p}'",
                    )
                )

        known_parents = [p for p in v.parents if p in bn and p != v.name]
        if len(known_parents) == len(v.parents):
            expected_rows = math.prod(len(bn.variable(p).domain) for p in v.parents)
            if v.cpt.shape != (expected_rows, len(v.domain)):
                problems.append(
                    Problem(
                        v.name,
                        "shape",
                        f"'{v.name}' cpt has shape {v.cpt.shape}, expected "
                        f"({expected_rows}, {len(v.domain)})",
                    )
                )
            else:
                for i, row in enumerate(v.cpt):
                    if np.any(row < 0) or np.any(row > 1):
                        problems.append(
                            Problem(
                                v.name,
                                "entry-range",
                                f"'{v.name}' row {i} has entries outside [0, 1]",
                            )
                        )
                        continue
                    s = float(row.sum())
                    if abs(s - 1.0) > ROW_SUM_TOL:
                        problems.append(
                            Problem(
                                v.name,
                                "row-sum",
                                f"'{v.name}' row {i} sums to {s:.12g} != 1",
                            )
                        )

    if not any(p.kind == "duplicate" for p in problems):
        try:
            topological_order(bn)
        except CycleError as exc:
            problems.append(Problem(exc.member, "cycle", str(exc)))
    return ValidationReport(problems)


def topological_order(bn: BayesianNetwork) -> list[str]:
    """Parents-first ordering, ties broken by declaration order."""
    if bn._topo is not None:
        return list(bn._topo)
    decl = {v.name: i for i, v in enumerate(bn.variables)}
    indegree: dict[str, int] = {}
    children: dict[str, list[str]] = {v.name: [] for v in bn.variables}
    for v in bn.variables:
        parents = {p for p in v.parents if p in bn and p != v.name}
        indegree[v.name] = len(parents)
        for p in parents:
            children[p].append(v.name)

    heap = [decl[name] for name, deg in indegree.items() if deg == 0]
    heapq.heapify(heap)
    by_decl = {i: v.name for i, v in enumerate(bn.variables)}
    order: list[str] = []
    while heap:
        name = by_decl[heapq.heappop(heap)]
        order.append(name)
        for child in children[name]:
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(heap, decl[child])
    if len(order) != len(bn.variables):
        leftover = [name for name, deg in indegree.items() if deg > 0]
        raise CycleError(min(leftover, key=decl.get))
    bn._topo = order
    return list(order)


def _check_evidence(bn: BayesianNetwork, evidence: Evidence) -> dict[str, int]:
    """Map evidence labels to domain indexes, rejecting unknown names."""
    idx: dict[str, int] = {}
    for name, label in evidence.items():
        idx[name] = bn.variable(name).domain_index(label)
    return idx


def joint_probability(bn: BayesianNetwork, assignment: Mapping[str, str]) -> float:
    """Product of CPT entries along a full assignment."""
    missing = [v.name for v in bn.variables if v.name not in assignment]
    if missing:
        raise EvidenceError(f"assignment misses variables: {missing}")
    p = 1.0
    for v in bn.variables:
        row = 0
        for parent in v.parents:
            pv = bn.variable(parent)
            row = row * len(pv.domain) + pv.domain_index(assignment[parent])
        p *= float(v.cpt[row, v.domain_index(assignment[v.name])])
        if p == 0.0:
            return 0.0
    return p


def enumerate_joint(
    bn: BayesianNetwork, cap: int = ENUMERATION_CAP
) -> list[tuple[Assignment, float]]:
    """Brute-force joint table; the reference oracle for inference tests."""
    count = bn.state_count()
    if count > cap:
        raise StateSpaceError(f"{count} joint states exceed the cap of {cap}")
    names = bn.names
    domains = [bn.variable(n).domain for n in names]
    out: list[tuple[Assignment, float]] = []
    for combo in itertools.product(*domains):
        assignment = dict(zip(names, combo))
        out.append((assignment, joint_probability(bn, assignment)))
    return out


# --- variable elimination ------------------------------------------------


@dataclass
class _Factor:
    vars: tuple[str, ...]
    values: np.ndarray  # one axis per variable, in `vars` order


def _cpt_factor(bn: BayesianNetwork, v: Variable) -> _Factor:
    shape = tuple(len(bn.variable(p).domain) for p in v.parents) + (len(v.domain),)
    return _Factor(v.parents + (v.name,), v.cpt.reshape(shape))


def _reduce(f: _Factor, evidence_idx: Mapping[str, int]) -> _Factor:
    """Select observed indexes and drop those axes from scope."""
    keep_vars = []
    index: list = []
    for name in f.vars:
        if name in evidence_idx:
            index.append(evidence_idx[name])
        else:
            index.append(slice(None))
            keep_vars.append(name)
    return _Factor(tuple(keep_vars), f.values[tuple(index)])


def _align(f: _Factor, out_vars: tuple[str, ...], sizes: Mapping[str, int]) -> np.ndarray:
    positions = sorted(range(len(f.vars)), key=lambda i: out_vars.index(f.vars[i]))
    vals = np.transpose(f.values, positions)
    shape = tuple(sizes[v] if v in f.vars else 1 for v in out_vars)
    return vals.reshape(shape)


def _multiply(factors: Sequence[_Factor], sizes: Mapping[str, int]) -> _Factor:
    out_vars: tuple[str, ...] = ()
    for f in factors:
        out_vars += tuple(v for v in f.vars if v not in out_vars)
    result = np.ones(tuple(sizes[v] for v in out_vars))
    for f in factors:
        result = result * _align(f, out_vars, sizes)
    return _Factor(out_vars, result)


def _sum_out(f: _Factor, name: str) -> _Factor:
    axis = f.vars.index(name)
    return _Factor(
        f.vars[:axis] + f.vars[axis + 1 :], f.values.sum(axis=axis)
    )


def _elimination_order(
    factors: Sequence[_Factor], to_eliminate: set[str], decl: Mapping[str, int]
) -> list[str]:
    """Min-degree heuristic over the interaction graph; deterministic ties."""
    neighbors: dict[str, set[str]] = {v: set() for v in to_eliminate}
    for f in factors:
        scope = [v for v in f.vars if v in to_eliminate]
        external = [v for v in f.vars if v not in to_eliminate]
        for v in scope:
            neighbors[v].update(x for x in scope if x != v)
            neighbors[v].update(external)
    order: list[str] = []
    remaining = set(to_eliminate)
    while remaining:
        pick = min(remaining, key=lambda v: (len(neighbors[v]), decl[v]))
        order.append(pick)
        remaining.discard(pick)
        linked = [v for v in neighbors[pick] if v in remaining]
        for a in linked:
            neighbors[a].discard(pick)
            neighbors[a].update(x for x in linked if x != a)
    return order


def _run_ve(
    bn: BayesianNetwork, evidence_idx: Mapping[str, int], keep: tuple[str, ...]
) -> np.ndarray:
    """Eliminate everything outside ``keep``; unnormalized result over keep."""
    sizes = {v.name: len(v.domain) for v in bn.variables}
    decl = {v.name: i for i, v in enumerate(bn.variables)}
    constant = 1.0
    factors: list[_Factor] = []
    for v in bn.variables:
        f = _reduce(_cpt_factor(bn, v), evidence_idx)
        if not f.vars:
            constant *= float(f.values)
        else:
            factors.append(f)

    to_eliminate = {
        v.name
        for v in bn.variables
        if v.name not in keep and v.name not in evidence_idx
    }
    for name in _elimination_order(factors, to_eliminate, decl):
        related = [f for f in factors if name in f.vars]
        if not related:
            continue
        factors = [f for f in factors if name not in f.vars]
        merged = _sum_out(_multiply(related, sizes), name)
        if not merged.vars:
            constant *= float(merged.values)
        else:
            factors.append(merged)

    if not keep:
        for f in factors:  # disconnected leftovers reduce to scalars
            constant *= float(f.values.sum())
        return np.asarray(constant)

    keep_factors = [f for f in factors if f.vars]
    covered = {v for f in keep_factors for v in f.vars}
    for name in keep:
        if name not in covered:
            keep_factors.append(_Factor((name,), np.ones(sizes[name])))
    product = _multiply(keep_factors, sizes)
    order = [product.vars.index(name) for name in keep]
    return np.transpose(product.values, order) * constant


def probability_of_evidence(bn: BayesianNetwork, evidence: Evidence) -> float:
    """p(evidence); 0 iff the evidence is inconsistent with the network."""
    idx = _check_evidence(bn, evidence)
    return float(_run_ve(bn, idx, ()))


def posterior_marginal(
    bn: BayesianNetwork, evidence: Evidence, target: str
) -> np.ndarray:
    """Exact p(target | evidence) over the target's domain.

    Raises ImpossibleEvidenceError when p(evidence) = 0.
    """
    idx = _check_evidence(bn, evidence)
    v = bn.variable(target)
    if target in idx:
        if probability_of_evidence(bn, evidence) <= ZERO_TOL:
            raise ImpossibleEvidenceError(
                f"evidence {dict(evidence)} has probability zero"
            )
        out = np.zeros(len(v.domain))
        out[idx[target]] = 1.0
        return out
    raw = _run_ve(bn, idx, (target,))
    z = float(raw.sum())
    if z <= ZERO_TOL:
        raise ImpossibleEvidenceError(
            f"evidence {dict(evidence)} has probability zero"
        )
    return raw / z


def joint_posterior(
    bn: BayesianNetwork, evidence: Evidence, targets: Sequence[str]
) -> tuple[tuple[str, ...], np.ndarray]:
    """Exact joint p(targets | evidence) as an array with one axis per target."""
    idx = _check_evidence(bn, evidence)
    targets = tuple(targets)
    for t in targets:
        bn.variable(t)
        if t in idx:
            raise EvidenceError(f"target '{t}' is already fixed by evidence")
    raw = _run_ve(bn, idx, targets)
    z = float(raw.sum())
    if z <= ZERO_TOL:
        raise ImpossibleEvidenceError(
            f"evidence {dict(evidence)} has probability zero"
        )
    return targets, raw / z


def _sample_index(dist: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(dist)
    i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(i, len(dist) - 1)


_POSTERIOR_CACHE_MAX = 200_000


def _cached_posterior(
    bn: BayesianNetwork, evidence: Mapping[str, str], target: str
) -> np.ndarray:
    key = (frozenset(evidence.items()), target)
    cache = bn._posterior_cache
    hit = cache.get(key)
    if hit is None:
        hit = posterior_marginal(bn, evidence, target)
        if len(cache) >= _POSTERIOR_CACHE_MAX:
            cache.clear()
        cache[key] = hit
    return hit


def sample_assignment(
    bn: BayesianNetwork, evidence: Evidence, rng: np.random.Generator
) -> Assignment:
    """Draw one full assignment from the exact posterior p(. | evidence).

    Non-evidence variables are visited in topological order; each is
    sampled from its exact posterior given the accumulated evidence and
    then pinned as further evidence. With no evidence this reduces to
    ancestral sampling from the CPT rows.
    """
    _check_evidence(bn, evidence)
    accumulated: dict[str, str] = dict(evidence)
    for name in topological_order(bn):
        if name in accumulated:
            continue
        v = bn.variable(name)
        dist = _cached_posterior(bn, accumulated, name)
        accumulated[name] = v.domain[_sample_index(dist, rng)]
    return accumulated
