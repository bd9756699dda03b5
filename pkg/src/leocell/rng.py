"""Deterministic pseudo-random numbers for everything in this package.

A user seed is expanded by SplitMix64 into the state of a xoshiro256**
generator. Both algorithms and every derived draw (uniform, Gaussian,
shuffle) are pinned bit-for-bit by docs/rng.md, so identical seeds give
identical datasets and identical initial network weights on any platform.
"""
from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
# SplitMix64 increment and output mixers
INCREMENT = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO53_INV = 2.0 ** -53


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state; returns (new_state, output)."""
    state = (state + INCREMENT) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    z = z ^ (z >> 31)
    return state, z


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def seed_words(seed: int, stream: int = 0) -> list[int]:
    """Derive the four xoshiro256** state words for (seed, stream).

    Stream k skips the first 4*k SplitMix64 outputs and takes the next
    four, so distinct streams of one seed never share state words.
    """
    if stream < 0:
        raise ValueError("stream must be >= 0")
    state = seed & MASK64
    for _ in range(4 * stream):
        state, _ = splitmix64_next(state)
    words = []
    for _ in range(4):
        state, z = splitmix64_next(state)
        words.append(z)
    return guard_nonzero(words)


def guard_nonzero(words: list[int]) -> list[int]:
    # the all-zero state is the one fixed point xoshiro cannot leave
    if not any(words):
        words = [INCREMENT, 0, 0, 0]
    return words


class Xoshiro256StarStar:
    """xoshiro256** with SplitMix64 seeding and numbered substreams."""

    def __init__(self, seed: int, stream: int = 0):
        self._s = seed_words(seed, stream)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform01(self) -> float:
        """Uniform in [0, 1) with 53 significant bits."""
        return (self.next_u64() >> 11) * _TWO53_INV

    def uniform(self, low: float, high: float) -> float:
        """Uniform in [low, high)."""
        return low + (high - low) * self.uniform01()

    def normal(self) -> float:
        """Standard Gaussian via the Box-Muller cosine branch.

        u1 is drawn in (0, 1] so the log stays finite; one call consumes
        exactly two generator outputs.
        """
        u1 = ((self.next_u64() >> 11) + 1) * _TWO53_INV
        u2 = self.uniform01()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = int(self.uniform01() * (i + 1))
            items[i], items[j] = items[j], items[i]
