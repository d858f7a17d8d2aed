"""Create links along two-hop paths through existing links.

A rule names two hop types with orientations and a creation probability:
whenever x is connected to y by hop1 and y to z by hop2 (x != z), the
pair (x, z) gets one Bernoulli trial. Multiple paths to the same pair do
not retry; existing links of the created type are never duplicated.
Rules run once each, in declared order, so later rules see the links
earlier rules created.
"""

from __future__ import annotations

import numpy as np

from .bn_io import TransitiveRule
from .errors import ScenarioError
from .socialgraph import PROVENANCE_TRANSITIVE, SocialGraph, TypedLink


def apply_transitive_rule(
    rule: TransitiveRule, graph: SocialGraph, rng: np.random.Generator
) -> list[TypedLink]:
    """Enumerate paths, run one trial per new pair, return created links."""
    for hop in (rule.hop1, rule.hop2):
        if hop.type not in graph.directed:
            raise ScenarioError(f"rule references unknown type '{hop.type}'")
    if rule.create not in graph.directed:
        raise ScenarioError(f"rule creates unknown type '{rule.create}'")

    created_directed = graph.directed[rule.create]
    tried: set[tuple[int, int]] = set()
    new_links: list[TypedLink] = []

    for x, y in graph.ordered_pairs(rule.hop1.type, rule.hop1.orientation):
        for z in graph.step_targets(rule.hop2.type, y, rule.hop2.orientation):
            if z == x:
                continue
            if created_directed:
                src, dst = (x, z) if rule.create_directed_from == "first" else (z, x)
                key = (src, dst)
            else:
                src, dst = x, z
                key = (x, z) if x <= z else (z, x)
            if key in tried:
                continue
            tried.add(key)
            if graph.has_link(rule.create, src, dst):
                continue
            if rule.probability < 1.0 and rng.random() >= rule.probability:
                continue
            new_links.append(
                TypedLink(rule.create, src, dst, PROVENANCE_TRANSITIVE)
            )
    return new_links


def apply_all_rules(
    rules: list[TransitiveRule], graph: SocialGraph, rng: np.random.Generator
) -> SocialGraph:
    """Apply rules in order, inserting each rule's links before the next."""
    for rule in rules:
        for link in apply_transitive_rule(rule, graph, rng):
            graph.add_link(link)
    return graph
