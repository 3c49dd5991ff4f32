"""Seeded random streams.

Every stochastic routine takes a ``numpy.random.Generator``. Streams for
independent purposes are derived from one integer seed plus a tuple of
integer keys, so runs are replayable and streams never overlap.
"""
from __future__ import annotations

import zlib

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode())
    return int(key)


def make_rng(seed: int, *keys) -> np.random.Generator:
    """Generator for stream ``keys`` under ``seed``.

    Keys may be ints or short strings (hashed with crc32).
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def derive_seed(seed: int, *keys) -> int:
    """A 63-bit integer seed derived from ``seed`` and ``keys``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))
