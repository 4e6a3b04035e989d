"""Seeded sampling on top of the raw PCG64 bit stream.

NumPy pins the PCG64 output sequence for a given seed, but not the
algorithms behind ``Generator.integers``/``permutation``. Everything that
must replay bit-for-bit (splits, AUC draws) goes through the helpers here,
which only consume raw 64-bit words.

Streams are derived as ``PCG64(SeedSequence([seed, purpose]))``.
"""

from __future__ import annotations

import numpy as np

SPLIT_STREAM = 0
AUC_STREAM = 1

_TWO64 = 1 << 64


def bit_generator(seed: int, purpose: int) -> np.random.PCG64:
    return np.random.PCG64(np.random.SeedSequence([int(seed), int(purpose)]))


def uniform_below(bitgen: np.random.PCG64, bound: int) -> int:
    """One uniform integer in ``[0, bound)`` by rejection (no modulo bias)."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    limit = _TWO64 - (_TWO64 % bound)
    while True:
        word = int(bitgen.random_raw())
        if word < limit:
            return word % bound


def uniform_below_many(bitgen: np.random.PCG64, bounds: np.ndarray) -> np.ndarray:
    """Vectorised ``uniform_below`` for an array of per-draw bounds.

    Rejected words are redrawn in order, so the output depends only on the
    bit stream and ``bounds``.
    """
    bounds = np.asarray(bounds, dtype=np.uint64)
    if bounds.size and bounds.min() == 0:
        raise ValueError("bounds must be positive")
    # 2**64 % b computed as (2**64 - b) % b to stay inside uint64
    rem = (np.uint64(0) - bounds) % bounds
    out = np.empty(bounds.shape, dtype=np.int64)
    todo = np.arange(bounds.size)
    while todo.size:
        words = np.asarray(bitgen.random_raw(todo.size), dtype=np.uint64)
        b = bounds[todo]
        # accept word iff word < 2**64 - rem, i.e. word <= ~rem when rem > 0
        ok = (rem[todo] == 0) | (words <= (np.uint64(0) - rem[todo] - np.uint64(1)))
        out[todo[ok]] = (words[ok] % b[ok]).astype(np.int64)
        todo = todo[~ok]
    return out


def sample_without_replacement(bitgen: np.random.PCG64, population: int, k: int) -> np.ndarray:
    """First ``k`` slots of a Fisher-Yates shuffle of ``range(population)``."""
    if not 0 <= k <= population:
        raise ValueError(f"cannot draw {k} of {population}")
    pool = np.arange(population, dtype=np.int64)
    for i in range(k):
        j = i + uniform_below(bitgen, population - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k].copy()
