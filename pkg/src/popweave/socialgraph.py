"""Typed multigraph of agents: one edge set per relationship type."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import IntegrityError
from .population import Population

PROVENANCE_SAMPLED = "sampled"
PROVENANCE_FALLBACK = "fallback"
PROVENANCE_TRANSITIVE = "transitive"


@dataclass(frozen=True)
class TypedLink:
    type: str
    a: int
    b: int
    provenance: str


class SocialGraph:
    """Agents plus per-type edge sets.

    Undirected pairs are stored canonically (smaller id first); duplicate
    (type, pair) insertions and self-links are rejected.
    """

    def __init__(
        self,
        population: Population | None,
        directed_types: dict[str, bool],
        n: int | None = None,
    ):
        if population is None and n is None:
            raise IntegrityError("a graph needs a population or a node count")
        self.population = population
        self.n = population.size if population is not None else int(n)
        self.directed: dict[str, bool] = dict(directed_types)
        self.links: dict[str, list[TypedLink]] = {t: [] for t in directed_types}
        self._pairs: dict[str, set[tuple[int, int]]] = {
            t: set() for t in directed_types
        }
        self._succ: dict[str, dict[int, list[int]]] = {t: {} for t in directed_types}
        self._pred: dict[str, dict[int, list[int]]] = {t: {} for t in directed_types}

    @property
    def types(self) -> list[str]:
        return list(self.directed)

    def link_count(self, type_name: str | None = None) -> int:
        if type_name is not None:
            return len(self.links[type_name])
        return sum(len(v) for v in self.links.values())

    def _canonical(self, type_name: str, a: int, b: int) -> tuple[int, int]:
        if self.directed[type_name]:
            return (a, b)
        return (a, b) if a <= b else (b, a)

    def has_link(self, type_name: str, a: int, b: int) -> bool:
        return self._canonical(type_name, a, b) in self._pairs[type_name]

    def add_link(self, link: TypedLink) -> None:
        if link.type not in self.directed:
            raise IntegrityError(f"unknown link type '{link.type}'")
        if link.a == link.b:
            raise IntegrityError(f"self link on agent {link.a}")
        if not (0 <= link.a < self.n and 0 <= link.b < self.n):
            raise IntegrityError(f"link endpoint outside population: {link}")
        pair = self._canonical(link.type, link.a, link.b)
        if pair in self._pairs[link.type]:
            raise IntegrityError(f"duplicate link {link.type} {pair}")
        self._pairs[link.type].add(pair)
        self.links[link.type].append(link)
        self._succ[link.type].setdefault(link.a, []).append(link.b)
        if self.directed[link.type]:
            self._pred[link.type].setdefault(link.b, []).append(link.a)
        else:
            self._succ[link.type].setdefault(link.b, []).append(link.a)

    def neighbors(self, type_name: str, node: int, direction: str = "any") -> list[int]:
        """Adjacent agents through one type; direction is out/in/any."""
        succ = self._succ[type_name].get(node, [])
        if not self.directed[type_name]:
            return list(succ)
        pred = self._pred[type_name].get(node, [])
        if direction == "out":
            return list(succ)
        if direction == "in":
            return list(pred)
        return list(succ) + list(pred)

    def ordered_pairs(self, type_name: str, orientation: str) -> Iterator[tuple[int, int]]:
        """Edges of one type as ordered pairs under a hop orientation.

        For undirected types every stored edge is emitted in both orders;
        for directed types 'forward' follows the arrows, 'backward'
        reverses them, 'either' emits both.
        """
        directed = self.directed[type_name]
        for link in self.links[type_name]:
            if not directed or orientation == "either":
                yield (link.a, link.b)
                yield (link.b, link.a)
            elif orientation == "forward":
                yield (link.a, link.b)
            else:
                yield (link.b, link.a)

    def step_targets(self, type_name: str, node: int, orientation: str) -> list[int]:
        """Second-hop neighbors from ``node`` under a hop orientation."""
        if not self.directed[type_name] or orientation == "either":
            return self.neighbors(type_name, node, "any")
        if orientation == "forward":
            return self.neighbors(type_name, node, "out")
        return self.neighbors(type_name, node, "in")

    def undirected_pairs(self) -> set[tuple[int, int]]:
        """Simple-graph projection: all types merged, directions dropped."""
        pairs: set[tuple[int, int]] = set()
        for type_name, links in self.links.items():
            for link in links:
                a, b = link.a, link.b
                pairs.add((a, b) if a <= b else (b, a))
        return pairs

    def all_links(self) -> Iterable[TypedLink]:
        for type_name in self.links:
            yield from self.links[type_name]
