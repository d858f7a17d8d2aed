"""File formats: `.bn.json` network documents and `.scenario.json` configs.

A network document is a JSON object::

    {
      "format_version": 1,
      "variables": [
        {"name": "A", "domain": ["0", "1"], "parents": [], "cpt": [[0.6, 0.4]]},
        {"name": "B", "domain": ["0", "1"], "parents": ["A"],
         "cpt": [[0.7, 0.3], [0.2, 0.8]]}
      ]
    }

CPT rows are row-major over parent assignments with the last listed
parent varying fastest. Variable definitions are order-independent.
Rows whose sum drifts from 1 by at most 1e-9 are renormalized on parse;
larger drift is an error.

A scenario document binds an agent network, link-type declarations,
transitive rules and generation parameters; see ``parse_scenario``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bn import ROW_SUM_TOL, BayesianNetwork, Variable, validate_network
from .errors import BNFormatError, ScenarioError

FORMAT_VERSION = 1

_VARIABLE_KEYS = {"name", "domain", "parents", "cpt"}
_NETWORK_KEYS = {"format_version", "variables"}

SIDE_A_PREFIX = "a1."
SIDE_B_PREFIX = "a2."
LINK_YES = "yes"


def parse_bn(text: str) -> BayesianNetwork:
    """Parse a network document; the result always validates cleanly."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BNFormatError(f"not valid JSON: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise BNFormatError("top level must be an object")
    unknown = set(doc) - _NETWORK_KEYS
    if unknown:
        raise BNFormatError(f"unknown top-level fields: {sorted(unknown)}")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise BNFormatError(f"unsupported format_version {version!r}")
    entries = doc.get("variables")
    if not isinstance(entries, list) or not entries:
        raise BNFormatError("'variables' must be a non-empty list")

    domains: dict[str, list[str]] = {}
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise BNFormatError(f"variables[{i}] is not an object")
        unknown = set(entry) - _VARIABLE_KEYS
        if unknown:
            raise BNFormatError(
                f"variables[{i}] has unknown fields: {sorted(unknown)}"
            )
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise BNFormatError(f"variables[{i}] needs a non-empty string name")
        if name in domains:
            raise BNFormatError(f"duplicate variable name '{name}'")
        domain = entry.get("domain")
        if not isinstance(domain, list) or not domain:
            raise BNFormatError(f"variable '{name}': domain must be a non-empty list")
        domains[name] = [str(d) for d in domain]

    variables: list[Variable] = []
    for entry in entries:
        name = entry["name"]
        parents = entry.get("parents", [])
        if not isinstance(parents, list):
            raise BNFormatError(f"variable '{name}': parents must be a list")
        for p in parents:
            if p not in domains:
                raise BNFormatError(
                    f"variable '{name}': unknown parent '{p}'"
                )
        rows = entry.get("cpt")
        if not isinstance(rows, list):
            raise BNFormatError(f"variable '{name}': cpt must be a list of rows")
        expected_rows = math.prod(len(domains[p]) for p in parents)
        width = len(domains[name])
        if len(rows) != expected_rows:
            raise BNFormatError(
                f"variable '{name}': cpt has {len(rows)} rows, expected "
                f"{expected_rows} for parents {list(parents)}"
            )
        table = np.zeros((expected_rows, width))
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != width:
                raise BNFormatError(
                    f"variable '{name}': cpt row {r} has wrong length "
                    f"(expected {width})"
                )
            vals = np.asarray(row, dtype=float)
            s = float(vals.sum())
            if abs(s - 1.0) <= ROW_SUM_TOL and s > 0:
                vals = vals / s
            table[r] = vals
        variables.append(
            Variable(name=name, domain=tuple(domains[name]),
                     parents=tuple(parents), cpt=table)
        )

    bn = BayesianNetwork(variables)
    report = validate_network(bn)
    if not report.ok:
        raise BNFormatError(f"invalid network:\n{report}")
    return bn


def serialize_bn(bn: BayesianNetwork) -> str:
    """Inverse of parse_bn; entries are written exactly, no renormalization."""
    doc = {
        "format_version": FORMAT_VERSION,
        "variables": [
            {
                "name": v.name,
                "domain": list(v.domain),
                "parents": list(v.parents),
                "cpt": [[float(x) for x in row] for row in v.cpt],
            }
            for v in bn.variables
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_bn(path: str | Path) -> BayesianNetwork:
    return parse_bn(Path(path).read_text(encoding="utf-8"))


# --- scenario configuration ----------------------------------------------


@dataclass
class LinkTypeSpec:
    """Declaration of one relationship type.

    Matching types carry a matching network with ``a1.``/``a2.`` copies of
    agent attributes plus a link variable; transitive types are created
    later by rules and carry neither network nor capacity attributes.
    """

    name: str
    kind: str  # "matching" | "transitive"
    directed: bool = False
    bn_path: str | None = None
    link_variable: str | None = None
    rc_a: str | None = None
    rc_b: str | int | None = None
    same: bool = False
    network: BayesianNetwork | None = None

    @property
    def is_matching(self) -> bool:
        return self.kind == "matching"

    def side_attributes(self, prefix: str) -> list[str]:
        """Agent attributes this type's network references on one side."""
        if self.network is None:
            return []
        return [
            v.name[len(prefix):]
            for v in self.network.variables
            if v.name.startswith(prefix)
        ]


@dataclass
class HopSpec:
    type: str
    orientation: str = "either"  # forward | backward | either


@dataclass
class TransitiveRule:
    """Create `create` links along two-hop paths x -hop1- y -hop2- z."""

    create: str
    hop1: HopSpec
    hop2: HopSpec
    probability: float = 1.0
    create_directed_from: str = "first"  # "first" (x) | "last" (z)


@dataclass
class ScenarioConfig:
    agent_bn_path: str
    population_size: int
    seed: int
    link_types: list[LinkTypeSpec]
    transitive_rules: list[TransitiveRule] = field(default_factory=list)
    interaction_weights: dict[str, float] = field(default_factory=dict)
    agent_network: BayesianNetwork | None = None
    base_dir: Path = field(default_factory=Path)

    def link_type(self, name: str) -> LinkTypeSpec:
        for t in self.link_types:
            if t.name == name:
                return t
        raise ScenarioError(f"unknown link type '{name}'")

    @property
    def matching_types(self) -> list[LinkTypeSpec]:
        return [t for t in self.link_types if t.is_matching]


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise ScenarioError(f"{where}: missing field '{key}'")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"{where}: field '{key}' has the wrong type")
    return value


def _integer_domain(bn: BayesianNetwork, attr: str, where: str) -> None:
    for label in bn.variable(attr).domain:
        try:
            v = int(label)
        except ValueError:
            raise ScenarioError(
                f"{where}: domain value '{label}' of '{attr}' is not an integer"
            ) from None
        if v < 0:
            raise ScenarioError(
                f"{where}: domain value '{label}' of '{attr}' is negative"
            )


def _check_matching_contract(
    spec: LinkTypeSpec, agent_bn: BayesianNetwork
) -> None:
    """A matching network must copy agent attribute domains verbatim."""
    net = spec.network
    assert net is not None
    where = f"link type '{spec.name}'"
    for v in net.variables:
        for prefix in (SIDE_A_PREFIX, SIDE_B_PREFIX):
            if v.name.startswith(prefix):
                attr = v.name[len(prefix):]
                if attr not in agent_bn:
                    raise ScenarioError(
                        f"{where}: '{v.name}' references agent attribute "
                        f"'{attr}' which does not exist"
                    )
                expected = agent_bn.variable(attr).domain
                if v.domain != expected:
                    raise ScenarioError(
                        f"{where}: '{v.name}' domain {list(v.domain)} differs "
                        f"from agent attribute domain {list(expected)}"
                    )
    if spec.link_variable is None or spec.link_variable not in net:
        raise ScenarioError(
            f"{where}: link variable '{spec.link_variable}' not in network"
        )
    if LINK_YES not in net.variable(spec.link_variable).domain:
        raise ScenarioError(
            f"{where}: link variable '{spec.link_variable}' has no "
            f"'{LINK_YES}' value"
        )
    if spec.same:
        a_attrs = sorted(spec.side_attributes(SIDE_A_PREFIX))
        b_attrs = sorted(spec.side_attributes(SIDE_B_PREFIX))
        if a_attrs != b_attrs:
            raise ScenarioError(
                f"{where}: symmetric type must reference the same attributes "
                f"on both sides (got {a_attrs} vs {b_attrs})"
            )


def parse_scenario(text: str, base_dir: str | Path) -> ScenarioConfig:
    """Parse a scenario document and load + contract-check every network."""
    base = Path(base_dir)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be an object")

    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ScenarioError(f"unsupported format_version {version!r}")
    agent_path = _require(doc, "agent_bn", str, "scenario")
    size = _require(doc, "population_size", int, "scenario")
    if size < 1:
        raise ScenarioError("population_size must be >= 1")
    seed = _require(doc, "seed", int, "scenario")
    if seed < 0:
        raise ScenarioError("seed must be a non-negative integer")

    full_agent_path = base / agent_path
    if not full_agent_path.exists():
        raise ScenarioError(f"missing file: {full_agent_path}")
    try:
        agent_bn = load_bn(full_agent_path)
    except BNFormatError as exc:
        raise ScenarioError(f"agent network {agent_path}: {exc}") from None

    raw_types = _require(doc, "link_types", list, "scenario")
    link_types: list[LinkTypeSpec] = []
    names: set[str] = set()
    for i, entry in enumerate(raw_types):
        where = f"link_types[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{where}: not an object")
        name = _require(entry, "name", str, where)
        if name in names:
            raise ScenarioError(f"{where}: duplicate link type name '{name}'")
        names.add(name)
        kind = _require(entry, "kind", str, where)
        if kind not in ("matching", "transitive"):
            raise ScenarioError(f"{where}: kind must be matching or transitive")
        spec = LinkTypeSpec(
            name=name,
            kind=kind,
            directed=bool(entry.get("directed", False)),
            bn_path=entry.get("bn"),
            link_variable=entry.get("link_variable"),
            rc_a=entry.get("rc_a"),
            rc_b=entry.get("rc_b"),
            same=bool(entry.get("same", False)),
        )
        if kind == "matching":
            if spec.bn_path is None or spec.link_variable is None or spec.rc_a is None:
                raise ScenarioError(
                    f"{where}: matching type needs 'bn', 'link_variable' and 'rc_a'"
                )
            if spec.same:
                if spec.rc_b is not None:
                    raise ScenarioError(
                        f"{where}: symmetric types use one pool; drop 'rc_b'"
                    )
            elif spec.rc_b is None:
                raise ScenarioError(f"{where}: matching type needs 'rc_b'")
            if spec.same and spec.directed:
                raise ScenarioError(f"{where}: symmetric types cannot be directed")
            bn_file = base / spec.bn_path
            if not bn_file.exists():
                raise ScenarioError(f"missing file: {bn_file}")
            try:
                spec.network = load_bn(bn_file)
            except BNFormatError as exc:
                raise ScenarioError(f"{where}: {spec.bn_path}: {exc}") from None
            _check_matching_contract(spec, agent_bn)
            if spec.rc_a not in agent_bn:
                raise ScenarioError(
                    f"{where}: rc_a attribute '{spec.rc_a}' not in agent network"
                )
            _integer_domain(agent_bn, spec.rc_a, where)
            if isinstance(spec.rc_b, str):
                if spec.rc_b not in agent_bn:
                    raise ScenarioError(
                        f"{where}: rc_b attribute '{spec.rc_b}' not in agent network"
                    )
                _integer_domain(agent_bn, spec.rc_b, where)
            elif isinstance(spec.rc_b, int) and spec.rc_b < 0:
                raise ScenarioError(f"{where}: rc_b constant must be >= 0")
        else:
            for forbidden in ("bn", "link_variable", "rc_a", "rc_b"):
                if entry.get(forbidden) is not None:
                    raise ScenarioError(
                        f"{where}: transitive type cannot carry '{forbidden}'"
                    )
        link_types.append(spec)

    rules: list[TransitiveRule] = []
    produced = {t.name for t in link_types if t.is_matching}
    for i, entry in enumerate(doc.get("transitive_rules", [])):
        where = f"transitive_rules[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{where}: not an object")
        create = _require(entry, "create", str, where)
        if create not in names:
            raise ScenarioError(f"{where}: creates undeclared type '{create}'")
        hops = []
        for key in ("hop1", "hop2"):
            raw = _require(entry, key, dict, where)
            hop_type = _require(raw, "type", str, f"{where}.{key}")
            orientation = raw.get("orientation", "either")
            if orientation not in ("forward", "backward", "either"):
                raise ScenarioError(
                    f"{where}.{key}: bad orientation '{orientation}'"
                )
            if hop_type not in names:
                raise ScenarioError(f"{where}.{key}: unknown type '{hop_type}'")
            if hop_type not in produced:
                raise ScenarioError(
                    f"{where}.{key}: type '{hop_type}' has no links yet at this "
                    f"point in the rule order"
                )
            hops.append(HopSpec(hop_type, orientation))
        probability = entry.get("probability", 1.0)
        if not isinstance(probability, (int, float)) or not 0 <= probability <= 1:
            raise ScenarioError(f"{where}: probability must be in [0, 1]")
        source = entry.get("create_directed_from", "first")
        if source not in ("first", "last"):
            raise ScenarioError(
                f"{where}: create_directed_from must be 'first' or 'last'"
            )
        rules.append(
            TransitiveRule(create, hops[0], hops[1], float(probability), source)
        )
        produced.add(create)

    weights = doc.get("interaction_weights", {})
    if not isinstance(weights, dict):
        raise ScenarioError("interaction_weights must be an object")
    for key, value in weights.items():
        if key not in names:
            raise ScenarioError(f"interaction_weights: unknown type '{key}'")
        if not isinstance(value, (int, float)) or not 0 <= value <= 1:
            raise ScenarioError(
                f"interaction_weights: '{key}' must be a probability"
            )

    return ScenarioConfig(
        agent_bn_path=agent_path,
        population_size=size,
        seed=seed,
        link_types=link_types,
        transitive_rules=rules,
        interaction_weights={k: float(v) for k, v in weights.items()},
        agent_network=agent_bn,
        base_dir=base,
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    p = Path(path)
    if not p.exists():
        raise ScenarioError(f"missing file: {p}")
    return parse_scenario(p.read_text(encoding="utf-8"), p.parent)
