"""Deterministic child RNG streams derived from one root seed.

Every stochastic component gets its own stream keyed by a tag, so
changing how one component consumes randomness never perturbs another
(and window families for different tightness values stay independent).
"""

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def child_rng(seed: int, *tags) -> np.random.Generator:
    """Generator for the stream identified by (seed, *tags).

    Tags may be strings (hashed stably) or integers (negative values are
    mapped through two's complement, so window tightness values work).
    """
    entropy = [int(seed) & _MASK64]
    for tag in tags:
        if isinstance(tag, str):
            entropy.append(zlib.crc32(tag.encode("utf-8")))
        else:
            entropy.append(int(tag) & _MASK64)
    return np.random.default_rng(np.random.SeedSequence(entropy))
