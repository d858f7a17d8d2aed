"""Bundled example scenarios.

``kenya`` is an illustrative rural-population scenario with family, work
and friendship ties; its probability tables are hand-authored to be
plausible, not sourced from any survey. ``inconsistent`` is a
deliberately infeasible scenario (side-A demand is twice side-B supply)
used to demonstrate how incompatible statistics surface as a persistent
matching error.
"""

from __future__ import annotations

from pathlib import Path

_HERE = Path(__file__).resolve().parent


def kenya_scenario_path() -> Path:
    return _HERE / "kenya" / "kenya.scenario.json"


def inconsistent_scenario_path() -> Path:
    return _HERE / "inconsistent" / "inconsistent.scenario.json"
