"""Counter-based random number streams.

Every stochastic routine in this package takes an explicit
``numpy.random.Generator``.  ``stream(seed, shard)`` builds independent,
reproducible generators from a Philox counter-based bit generator, so a
fixed (seed, shard count) always replays the same draws regardless of
which thread processes which shard.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, shard: int = 0) -> np.random.Generator:
    """Return an independent generator for the given seed and shard index."""
    if shard < 0:
        raise ValueError("shard index must be nonnegative")
    key = np.array([seed & _MASK64, shard & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
