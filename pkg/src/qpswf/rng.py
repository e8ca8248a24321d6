"""Deterministic counter-based random numbers (SplitMix64).

Every random draw is a pure function of (seed, counter), so test corpora
and CLI outputs are reproducible bit-for-bit across runs and platforms.
value(seed, n) hashes seed + n*GOLDEN through the SplitMix64 finalizer;
uniform doubles take the top 53 bits; normals use Box-Muller.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(seed: int, counters: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer of seed + (counter+1)*GOLDEN, vectorized."""
    c = (np.asarray(counters, dtype=np.uint64) + np.uint64(1)) * np.uint64(_GOLDEN)
    z = (np.uint64(seed & _MASK) + c) & np.uint64(_MASK)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class CounterRng:
    """Stateless-by-construction stream: i-th draw depends only on (seed, i)."""

    def __init__(self, seed: int, stream: int = 0):
        # fold the stream id into the seed so independent corpora never overlap
        self.seed = int(splitmix64(seed & _MASK, np.array([stream], dtype=np.uint64))[0])
        self._next = 0

    def uniform(self, n: int) -> np.ndarray:
        """n doubles in [0, 1)."""
        idx = np.arange(self._next, self._next + n, dtype=np.uint64)
        self._next += n
        bits = splitmix64(self.seed, idx)
        return (bits >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def normal(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller on consecutive uniform pairs."""
        m = (n + 1) // 2
        u = self.uniform(2 * m).reshape(2, m)
        r = np.sqrt(-2.0 * np.log(1.0 - u[0]))
        th = 2.0 * np.pi * u[1]
        out = np.concatenate([r * np.cos(th), r * np.sin(th)])
        return out[:n]

    def normal_field(self, shape) -> np.ndarray:
        return self.normal(int(np.prod(shape))).reshape(shape)
