"""Deterministic seed derivation: one run seed fans out by named keys."""
from __future__ import annotations

import zlib

import numpy as np


def _key(k) -> int:
    if isinstance(k, (int, np.integer)):
        if k < 0:
            raise ValueError(f"seed keys must be non-negative, got {k}")
        return int(k)
    return zlib.crc32(str(k).encode())


def seed_sequence(seed: int, *keys) -> np.random.SeedSequence:
    """``SeedSequence([seed, *keys])`` with string keys hashed to ints."""
    return np.random.SeedSequence([_key(seed), *(_key(k) for k in keys)])


def child_seed(seed: int, *keys) -> int:
    """A 63-bit integer seed derived from ``seed`` and ``keys``."""
    state = seed_sequence(seed, *keys).generate_state(2, np.uint32)
    return int.from_bytes(state.astype("<u4").tobytes(), "little") >> 1


def generator(seed: int, *keys) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *keys))
