#!/usr/bin/env python3
"""Author the bundled scenario files.

Writes the kenya-style scenario (agent network, four matching networks,
three transitive rules) and the deliberately inconsistent scenario into
src/popweave/data/, then loads and smoke-runs both as a self-check.

The probability tables are hand-tuned to be demographically plausible
and mutually consistent (so matching errors vanish as the population
grows); they are illustrative, not survey data. Run with --check-only to
validate the committed files without rewriting them.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "src" / "popweave" / "data"

sys.path.insert(0, str(REPO / "src"))

YES_NO = ["yes", "no"]

# Five-year age buckets by starting year; 80 means 80+.
AGE = [f"{5 * i:02d}" for i in range(17)]
AGE_PRIOR_RATIO = 0.88  # young-heavy pyramid
SLICES = ["child", "youth", "adult", "mature", "senior"]
SLICE_OF_BUCKET = [0, 0, 0, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4]
LOCATIONS = ["north", "south", "east", "west", "center"]
LOCATION_PRIOR = [0.30, 0.25, 0.20, 0.15, 0.10]

# p(married = yes | gender, slice)
MARRIED = {
    ("male", "child"): 0.0, ("female", "child"): 0.0,
    ("male", "youth"): 0.12, ("female", "youth"): 0.50,
    ("male", "adult"): 0.75, ("female", "adult"): 0.90,
    ("male", "mature"): 0.85, ("female", "mature"): 0.90,
    ("male", "senior"): 0.80, ("female", "senior"): 0.85,
}

# p(work | slice), columns none/farm/trade
WORK = {
    "child": [1.0, 0.0, 0.0],
    "youth": [0.45, 0.35, 0.20],
    "adult": [0.18, 0.50, 0.32],
    "mature": [0.25, 0.50, 0.25],
    "senior": [0.70, 0.20, 0.10],
}

RC_SPOUSES = {  # over ["0", "1", "2"]
    ("male", "yes"): [0.0, 0.95, 0.05],
    ("male", "no"): [1.0, 0.0, 0.0],
    ("female", "yes"): [0.0, 1.0, 0.0],
    ("female", "no"): [1.0, 0.0, 0.0],
}

# children per woman, over ["0".."6"], by (married, slice)
RC_MOTHER = {
    ("yes", "child"): [1, 0, 0, 0, 0, 0, 0],
    ("no", "child"): [1, 0, 0, 0, 0, 0, 0],
    ("yes", "youth"): [0.40, 0.50, 0.10, 0, 0, 0, 0],
    ("no", "youth"): [0.88, 0.10, 0.02, 0, 0, 0, 0],
    ("yes", "adult"): [0.06, 0.20, 0.30, 0.24, 0.13, 0.05, 0.02],
    ("no", "adult"): [0.60, 0.25, 0.10, 0.05, 0, 0, 0],
    ("yes", "mature"): [0.06, 0.14, 0.24, 0.25, 0.17, 0.09, 0.05],
    ("no", "mature"): [0.55, 0.25, 0.12, 0.05, 0.03, 0, 0],
    ("yes", "senior"): [0.10, 0.20, 0.26, 0.22, 0.13, 0.06, 0.03],
    ("no", "senior"): [0.60, 0.22, 0.10, 0.05, 0.03, 0, 0],
}

RC_COLLEAGUES = {  # over ["0".."3"]
    "none": [1.0, 0.0, 0.0, 0.0],
    "farm": [0.0, 0.35, 0.40, 0.25],
    "trade": [0.0, 0.25, 0.40, 0.35],
}

RC_FRIENDS = {  # over ["0".."4"]
    "child": [0.15, 0.30, 0.30, 0.17, 0.08],
    "youth": [0.05, 0.20, 0.30, 0.25, 0.20],
    "adult": [0.05, 0.25, 0.35, 0.22, 0.13],
    "mature": [0.10, 0.30, 0.35, 0.17, 0.08],
    "senior": [0.20, 0.35, 0.28, 0.12, 0.05],
}

# wife-age window, offsets (in buckets) behind the husband's age
WIFE_OFFSETS = [(-4, 0.10), (-3, 0.25), (-2, 0.40), (-1, 0.25)]
WIFE_MIN_BUCKET = 3  # wives are at least 15

# child-age window, offsets behind the mother's age (15 to 40 years)
CHILD_OFFSETS = [(-8, 0.08), (-7, 0.16), (-6, 0.26), (-5, 0.28), (-4, 0.15),
                 (-3, 0.07)]

# p(link = yes | ageClose, sameLocation) for friendships; the small
# cross-location mass supplies the long-range shortcuts
FRIEND_LINK = {
    ("same", "yes"): 0.70, ("same", "no"): 0.06,
    ("near", "yes"): 0.25, ("near", "no"): 0.02,
    ("far", "yes"): 0.01, ("far", "no"): 0.002,
}

INTERACTION_WEIGHTS = {
    "spouses": 0.25, "motherOf": 0.05, "colleagues": 0.15, "friends": 0.55,
    "fatherOf": 0.02, "siblings": 0.35, "friendOfFriend": 0.20,
}


def renorm(row):
    total = float(sum(row))
    if total <= 0:
        raise ValueError(f"cannot normalize {row}")
    return [x / total for x in row]


def age_prior():
    weights = [AGE_PRIOR_RATIO ** k for k in range(len(AGE))]
    return renorm(weights)


def one_hot(size, index):
    row = [0.0] * size
    row[index] = 1.0
    return row


def yes_iff(condition: bool):
    return [1.0, 0.0] if condition else [0.0, 1.0]


def var(name, domain, parents, cpt):
    return {"name": name, "domain": list(domain), "parents": list(parents),
            "cpt": cpt}


def product_rows(domains, fn):
    """Row-major CPT over parent domains, last parent fastest."""
    rows = []

    def rec(prefix, remaining):
        if not remaining:
            rows.append(fn(*prefix))
            return
        for value in remaining[0]:
            rec(prefix + [value], remaining[1:])

    rec([], list(domains))
    return rows


def slice_of(age_label: str) -> str:
    return SLICES[SLICE_OF_BUCKET[AGE.index(age_label)]]


def work_marginal():
    prior = age_prior()
    out = [0.0, 0.0, 0.0]
    for bucket, p in enumerate(prior):
        row = WORK[SLICES[SLICE_OF_BUCKET[bucket]]]
        for j in range(3):
            out[j] += p * row[j]
    return renorm(out)


def slice_marginal():
    prior = age_prior()
    out = [0.0] * len(SLICES)
    for bucket, p in enumerate(prior):
        out[SLICE_OF_BUCKET[bucket]] += p
    return renorm(out)


def window_row(center: int, offsets, lo: int) -> list[float]:
    """Weighted window over age buckets, clamped to [lo, len(AGE)-1]."""
    row = [0.0] * len(AGE)
    for offset, weight in offsets:
        bucket = center + offset
        if lo <= bucket < len(AGE):
            row[bucket] += weight
    if sum(row) <= 0:
        row[lo] = 1.0
    return renorm(row)


# --- kenya agent network -----------------------------------------------------


def agent_network():
    variables = [
        var("gender", ["male", "female"], [], [[0.5, 0.5]]),
        var("ageDetail", AGE, [], [age_prior()]),
        var("ageSlices", SLICES, ["ageDetail"],
            [one_hot(len(SLICES), SLICE_OF_BUCKET[b]) for b in range(len(AGE))]),
        var("location", LOCATIONS, [], [list(LOCATION_PRIOR)]),
        var("married", YES_NO, ["gender", "ageSlices"],
            product_rows((["male", "female"], SLICES),
                         lambda g, s: [MARRIED[(g, s)], 1 - MARRIED[(g, s)]])),
        var("work", ["none", "farm", "trade"], ["ageSlices"],
            [list(WORK[s]) for s in SLICES]),
        var("rcSpouses", ["0", "1", "2"], ["gender", "married"],
            product_rows((["male", "female"], YES_NO),
                         lambda g, m: list(RC_SPOUSES[(g, m)]))),
        var("rcMotherOf", [str(i) for i in range(7)],
            ["gender", "married", "ageSlices"],
            product_rows((["male", "female"], YES_NO, SLICES),
                         lambda g, m, s: one_hot(7, 0) if g == "male"
                         else renorm(RC_MOTHER[(m, s)]))),
        var("rcColleagues", ["0", "1", "2", "3"], ["work"],
            [list(RC_COLLEAGUES[w]) for w in ["none", "farm", "trade"]]),
        var("rcFriends", ["0", "1", "2", "3", "4"], ["ageSlices"],
            [list(RC_FRIENDS[s]) for s in SLICES]),
    ]
    return {"format_version": 1, "variables": variables}


def married_by_age_rows():
    """p(married | gender, ageDetail) for the reduced copies."""
    return product_rows((["male", "female"], AGE),
                        lambda g, a: [MARRIED[(g, slice_of(a))],
                                      1 - MARRIED[(g, slice_of(a))]])


def spouses_network():
    prior = age_prior()
    copies = []
    for side in ("a1", "a2"):
        copies += [
            var(f"{side}.gender", ["male", "female"], [], [[0.5, 0.5]]),
            var(f"{side}.ageDetail", AGE, [], [prior]),
            var(f"{side}.married", YES_NO, [f"{side}.gender", f"{side}.ageDetail"],
                married_by_age_rows()),
            var(f"{side}.location", LOCATIONS, [], [list(LOCATION_PRIOR)]),
        ]
    constraints = [
        var("genderOK", YES_NO, ["a1.gender", "a2.gender"],
            product_rows((["male", "female"], ["male", "female"]),
                         lambda g1, g2: yes_iff(g1 == "male" and g2 == "female"))),
        var("marriedOK", YES_NO, ["a1.married", "a2.married"],
            product_rows((YES_NO, YES_NO),
                         lambda m1, m2: yes_iff(m1 == "yes" and m2 == "yes"))),
        var("ageWife", AGE, ["a1.ageDetail"],
            [window_row(h, WIFE_OFFSETS, WIFE_MIN_BUCKET)
             for h in range(len(AGE))]),
        var("rightAge", YES_NO, ["ageWife", "a2.ageDetail"],
            product_rows((AGE, AGE), lambda w, a: yes_iff(w == a))),
        var("sameLocation", YES_NO, ["a1.location", "a2.location"],
            product_rows((LOCATIONS, LOCATIONS), lambda l1, l2: yes_iff(l1 == l2))),
        var("linkSpouses", YES_NO,
            ["genderOK", "marriedOK", "rightAge", "sameLocation"],
            product_rows((YES_NO,) * 4,
                         lambda *ps: yes_iff(all(p == "yes" for p in ps)))),
    ]
    return {"format_version": 1, "variables": copies + constraints}


def motherof_network():
    prior = age_prior()
    variables = [
        var("a1.gender", ["male", "female"], [], [[0.5, 0.5]]),
        var("a1.ageDetail", AGE, [], [prior]),
        var("a1.location", LOCATIONS, [], [list(LOCATION_PRIOR)]),
        var("a2.ageDetail", AGE, [], [prior]),
        var("a2.ageSlices", SLICES, ["a2.ageDetail"],
            [one_hot(len(SLICES), SLICE_OF_BUCKET[b]) for b in range(len(AGE))]),
        var("a2.location", LOCATIONS, [], [list(LOCATION_PRIOR)]),
        var("isFemale", YES_NO, ["a1.gender"],
            [yes_iff(False), yes_iff(True)]),
        var("ageChild", AGE, ["a1.ageDetail"],
            [window_row(m, CHILD_OFFSETS, 0) for m in range(len(AGE))]),
        var("rightAgeC", YES_NO, ["ageChild", "a2.ageDetail"],
            product_rows((AGE, AGE), lambda c, a: yes_iff(c == a))),
        # young children must live with their mother; adults may not
        var("locOK", YES_NO, ["a1.location", "a2.location", "a2.ageSlices"],
            product_rows((LOCATIONS, LOCATIONS, SLICES),
                         lambda l1, l2, s: yes_iff(l1 == l2 or s != "child"))),
        var("linkMotherOf", YES_NO, ["isFemale", "rightAgeC", "locOK"],
            product_rows((YES_NO,) * 3,
                         lambda *ps: yes_iff(all(p == "yes" for p in ps)))),
    ]
    return {"format_version": 1, "variables": variables}


def colleagues_network():
    work_dom = ["none", "farm", "trade"]
    marginal = work_marginal()
    variables = []
    for side in ("a1", "a2"):
        variables += [
            var(f"{side}.work", work_dom, [], [marginal]),
            var(f"{side}.location", LOCATIONS, [], [list(LOCATION_PRIOR)]),
        ]
    variables += [
        var("sameWork", YES_NO, ["a1.work", "a2.work"],
            product_rows((work_dom, work_dom),
                         lambda w1, w2: yes_iff(w1 == w2 and w1 != "none"))),
        var("sameLocation", YES_NO, ["a1.location", "a2.location"],
            product_rows((LOCATIONS, LOCATIONS), lambda l1, l2: yes_iff(l1 == l2))),
        var("linkColleagues", YES_NO, ["sameWork", "sameLocation"],
            product_rows((YES_NO, YES_NO),
                         lambda sw, sl: [0.9, 0.1]
                         if sw == "yes" and sl == "yes" else [0.0, 1.0])),
    ]
    return {"format_version": 1, "variables": variables}


def friends_network():
    marginal = slice_marginal()
    variables = []
    for side in ("a1", "a2"):
        variables += [
            var(f"{side}.ageSlices", SLICES, [], [marginal]),
            var(f"{side}.location", LOCATIONS, [], [list(LOCATION_PRIOR)]),
        ]

    def closeness(s1, s2):
        gap = abs(SLICES.index(s1) - SLICES.index(s2))
        label = "same" if gap == 0 else "near" if gap == 1 else "far"
        return one_hot(3, ["same", "near", "far"].index(label))

    variables += [
        var("ageClose", ["same", "near", "far"],
            ["a1.ageSlices", "a2.ageSlices"],
            product_rows((SLICES, SLICES), closeness)),
        var("sameLocation", YES_NO, ["a1.location", "a2.location"],
            product_rows((LOCATIONS, LOCATIONS), lambda l1, l2: yes_iff(l1 == l2))),
        var("linkFriends", YES_NO, ["ageClose", "sameLocation"],
            product_rows((["same", "near", "far"], YES_NO),
                         lambda c, s: [FRIEND_LINK[(c, s)],
                                       1 - FRIEND_LINK[(c, s)]])),
    ]
    return {"format_version": 1, "variables": variables}


def kenya_scenario():
    return {
        "format_version": 1,
        "agent_bn": "agents.bn.json",
        "population_size": 10000,
        "seed": 4242,
        "link_types": [
            {"name": "spouses", "kind": "matching", "directed": False,
             "bn": "spouses.bn.json", "link_variable": "linkSpouses",
             "rc_a": "rcSpouses", "rc_b": "rcSpouses"},
            {"name": "motherOf", "kind": "matching", "directed": True,
             "bn": "motherof.bn.json", "link_variable": "linkMotherOf",
             "rc_a": "rcMotherOf", "rc_b": 1},
            {"name": "colleagues", "kind": "matching", "directed": False,
             "bn": "colleagues.bn.json", "link_variable": "linkColleagues",
             "rc_a": "rcColleagues", "same": True},
            {"name": "friends", "kind": "matching", "directed": False,
             "bn": "friends.bn.json", "link_variable": "linkFriends",
             "rc_a": "rcFriends", "same": True},
            {"name": "fatherOf", "kind": "transitive", "directed": True},
            {"name": "siblings", "kind": "transitive", "directed": False},
            {"name": "friendOfFriend", "kind": "transitive", "directed": False},
        ],
        "transitive_rules": [
            {"create": "fatherOf",
             "hop1": {"type": "spouses", "orientation": "either"},
             "hop2": {"type": "motherOf", "orientation": "forward"},
             "probability": 1.0, "create_directed_from": "first"},
            {"create": "siblings",
             "hop1": {"type": "motherOf", "orientation": "backward"},
             "hop2": {"type": "motherOf", "orientation": "forward"},
             "probability": 1.0},
            {"create": "friendOfFriend",
             "hop1": {"type": "friends", "orientation": "either"},
             "hop2": {"type": "friends", "orientation": "either"},
             "probability": 0.1},
        ],
        "interaction_weights": INTERACTION_WEIGHTS,
    }


# --- inconsistent scenario ---------------------------------------------------


def inconsistent_agent_network():
    return {
        "format_version": 1,
        "variables": [
            var("gender", ["male", "female"], [], [[0.5, 0.5]]),
            # every agent demands two partners while supplying one slot
            var("rcMarried", ["2"], [], [[1.0]]),
        ],
    }


def inconsistent_matching_network():
    return {
        "format_version": 1,
        "variables": [var("linkMarried", YES_NO, [], [[1.0, 0.0]])],
    }


def inconsistent_scenario():
    return {
        "format_version": 1,
        "agent_bn": "agents.bn.json",
        "population_size": 2000,
        "seed": 99,
        "link_types": [
            {"name": "married", "kind": "matching", "directed": False,
             "bn": "married.bn.json", "link_variable": "linkMarried",
             "rc_a": "rcMarried", "rc_b": 1},
        ],
        "transitive_rules": [],
        "interaction_weights": {"married": 0.1},
    }


FILES = {
    "kenya/agents.bn.json": agent_network,
    "kenya/spouses.bn.json": spouses_network,
    "kenya/motherof.bn.json": motherof_network,
    "kenya/colleagues.bn.json": colleagues_network,
    "kenya/friends.bn.json": friends_network,
    "kenya/kenya.scenario.json": kenya_scenario,
    "inconsistent/agents.bn.json": inconsistent_agent_network,
    "inconsistent/married.bn.json": inconsistent_matching_network,
    "inconsistent/inconsistent.scenario.json": inconsistent_scenario,
}


def write_all() -> None:
    for rel, build in FILES.items():
        path = DATA / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(build(), indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path.relative_to(REPO)}")


def smoke(n: int, seed: int) -> None:
    from popweave import distribution_error, graph_stats, load_scenario
    from popweave.pipeline import run_pipeline
    from popweave.seeding import substream

    for name in ("kenya/kenya.scenario.json",
                 "inconsistent/inconsistent.scenario.json"):
        scenario = load_scenario(DATA / name)
        result = run_pipeline(scenario, size=n, seed=seed)
        print(f"\n{name} @ n={n} seed={seed}")
        for type_name, tr in result.report.per_type.items():
            print(f"  {type_name:14s} required={tr.required:6d} "
                  f"links={tr.created_links:6d} orphans={tr.orphans:5d} "
                  f"fallbacks={tr.fallbacks:5d} error={tr.matching_error:.4f}")
        for type_name in result.graph.types:
            if type_name not in result.report.per_type:
                print(f"  {type_name:14s} links={result.graph.link_count(type_name)}")
        stats = graph_stats(result.graph, 64, substream(seed, "stats"))
        de = distribution_error(scenario.agent_network, result.population)
        print(f"  distribution_error={de:.5f} density={stats.density:.5f} "
              f"transitivity={stats.transitivity:.4f} "
              f"path={stats.avg_path_length} "
              f"largest={stats.largest_component}/{stats.n}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check-only", action="store_true",
                        help="skip writing; just load and smoke-run")
    parser.add_argument("--smoke-size", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    if not args.check_only:
        write_all()
    smoke(args.smoke_size, args.seed)


if __name__ == "__main__":
    main()
