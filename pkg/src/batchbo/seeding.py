"""Deterministic seed derivation and coordinate hashing.

All randomness in the package flows through these helpers so that a run is
bit-reproducible from a single integer seed, independent of process state.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np


def mix(*parts: int) -> int:
    """Collapse a tuple of integers into one 64-bit seed.

    Stable across platforms and Python versions (unlike ``hash``).
    """
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(struct.pack("<q", int(p) & 0x7FFFFFFFFFFFFFFF))
    return int.from_bytes(h.digest(), "little")


def hash01(seed: int, x: np.ndarray) -> float:
    """Deterministic hash of (seed, coordinates) to a float in [0, 1).

    The value depends only on the exact float64 bit patterns of ``x``, so
    repeated queries at the same point always map to the same number.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<q", int(seed) & 0x7FFFFFFFFFFFFFFF))
    h.update(np.ascontiguousarray(x, dtype=np.float64).tobytes())
    return int.from_bytes(h.digest(), "little") / 2.0**64


def generator(seed: int) -> np.random.Generator:
    """A PCG64 generator seeded deterministically from ``seed``."""
    return np.random.Generator(np.random.PCG64(seed & 0xFFFFFFFFFFFFFFFF))
