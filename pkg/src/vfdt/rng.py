"""Deterministic seeded random numbers.

The core generator is splitmix64: the state is a single 64-bit counter
advanced by the golden-gamma constant, and each output is a fixed avalanche
mix of the state.  Everything is plain integer arithmetic masked to 64 bits,
so a given seed produces the same stream on every platform and interpreter.
Gaussians use the Box-Muller transform with the spare value cached.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 2.0**-53


class SeededRng:
    """splitmix64 stream exposing uniform, gaussian and small-integer draws.

    Single-owner state machine: use from one logical thread at a time.
    """

    __slots__ = ("seed", "_state", "_spare")

    def __init__(self, seed: int):
        if not isinstance(seed, int) or not 0 <= seed <= _MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self.seed = seed
        self._state = seed
        self._spare = None

    def next_u64(self) -> int:
        """Next raw 64-bit word."""
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_uniform(self) -> float:
        """Uniform float in [0, 1), 53 random bits."""
        return (self.next_u64() >> 11) * _INV53

    def next_gaussian(self) -> float:
        """Standard normal (mean 0, std 1) via Box-Muller."""
        if self._spare is not None:
            z = self._spare
            self._spare = None
            return z
        u1 = self.next_uniform()
        while u1 <= 0.0:
            u1 = self.next_uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * self.next_uniform()
        self._spare = r * math.sin(theta)
        return r * math.cos(theta)

    def next_int(self, n: int) -> int:
        """Uniform integer in [0, n).  Intended for small n (class/value picks)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return int(self.next_uniform() * n)

    def next_bits(self, k: int) -> list[int]:
        """k independent fair bits (k <= 64) from one 64-bit draw."""
        if not 0 < k <= 64:
            raise ValueError("k must be in 1..64")
        u = self.next_u64()
        return [(u >> i) & 1 for i in range(k)]
