"""Counter-based coin schedule shared by every simulator.

The coin for edge index ``i`` in round ``r`` under ``seed`` is the low bit of
the ``i``-th Philox output keyed by ``(seed, r)``. It depends on nothing else,
so centralized, distributed and replayed runs all see the same coins.
Bit 0 orients edge ``(u, v)``, ``u < v``, as ``u -> v``; bit 1 as ``v -> u``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MASK64 = (1 << 64) - 1


@lru_cache(maxsize=4096)
def _round_bits(seed: int, round_: int, m: int) -> tuple[int, ...]:
    gen = np.random.Philox(key=np.array([seed & MASK64, round_ & MASK64], dtype=np.uint64))
    return tuple((gen.random_raw(m) & 1).tolist()) if m else ()


def round_coins(seed: int, round_: int, m: int) -> tuple[int, ...]:
    """Coins for edge indices ``0..m-1`` of one round."""
    return _round_bits(int(seed), int(round_), int(m))


def coin(seed: int, round_: int, edge_index: int, m: int) -> int:
    return round_coins(seed, round_, m)[edge_index]


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for the ``index``-th run of a seeded batch."""
    state = np.random.SeedSequence([int(seed) & MASK64, int(index)]).generate_state(1, np.uint64)
    return int(state[0])
