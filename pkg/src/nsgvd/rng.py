"""Seedable, splittable random streams.

All randomness is drawn from numpy PCG64 generators keyed by a root seed and
a named path. Stream discipline: each logical consumer (one sampled video,
one Monte Carlo check, the training loop) gets its own substream via
`substream(seed, *path)`, so results never depend on evaluation order or on
how work is distributed. String path parts are mapped to 64-bit integers with
SHA-256, which keeps streams stable across platforms and Python versions.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _part_to_int(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(str(part).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def substream(seed: int, *path) -> np.random.Generator:
    """Generator for the named substream of `seed`."""
    key = tuple(_part_to_int(p) for p in path)
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(seq))
