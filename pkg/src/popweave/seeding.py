"""Deterministic named random substreams.

Every pipeline stage draws from its own generator derived from the run
seed plus a stage label, so adding draws to one stage never perturbs
another and results are stable across platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(seed: int, *labels: object) -> np.random.Generator:
    """Return a generator keyed by ``seed`` and a stable label path."""
    tag = "/".join(str(label) for label in labels)
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4)]
    ss = np.random.SeedSequence([seed & _MASK64, *words])
    return np.random.Generator(np.random.PCG64(ss))
