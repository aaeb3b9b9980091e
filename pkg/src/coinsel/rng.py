"""Deterministic random number generation.

All randomized selectors draw from SplitMix64 (Steele, Lea & Flood 2014), a
fixed, documented 64-bit generator.  The same seed therefore yields the same
draw sequence on every platform and in every release, and the compiled core
implements the identical update so compiled and pure-Python kernels produce
bit-identical selections.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class Splitmix64:
    """SplitMix64 generator over a single 64-bit state word."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform-ish draw in [0, n) via modulo reduction.

        The modulo bias is below 2**-40 for any n that fits a pool size,
        and keeping the reduction trivial makes the compiled core's stream
        easy to match exactly.
        """
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def next_bool(self) -> bool:
        return bool(self.next_u64() & 1)

    def next_double(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)


def as_rng(rng: "Splitmix64 | int") -> Splitmix64:
    """Accept either a generator or a bare 64-bit seed."""
    if isinstance(rng, Splitmix64):
        return rng
    return Splitmix64(int(rng))
