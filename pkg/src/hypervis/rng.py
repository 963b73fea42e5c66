"""Reproducible random streams for parallel replication.

Streams are keyed by (master seed, *path), e.g. (seed, replication index,
role). Disjoint keys give statistically independent generators, and the
mapping is deterministic, so results do not depend on scheduling order.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return an independent generator keyed by (seed, *path)."""
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + tuple(int(p) for p in path)))
