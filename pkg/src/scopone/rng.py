"""Deterministic random number generation.

Every stochastic component in the package (dealing, rollouts, tree
search, determinization) draws from the same SplitMix64 stream so that
results are reproducible from a single 64-bit seed, independently of
Python's hash randomization and of which kernel backend is active.
The compiled kernels embed an identical generator: given the same seed,
the pure-Python and Cython code paths consume the exact same stream.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into one well-mixed 64-bit seed.

    Used to derive independent substreams (per deal attempt, per match,
    per seat, per decision) from experiment-level seeds.
    """
    h = 0
    for p in parts:
        h = _finalize((h + _GOLDEN + (p & MASK64)) & MASK64)
    return h


class SplitMix64:
    """SplitMix64 generator with bounded-int and unit-float draws."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & MASK64
        return _finalize(self.state)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) via 128-bit multiply-shift."""
        return (self.next_u64() * n) >> 64

    def unit(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.unit()

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle (descending index order)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        return items[self.below(len(items))]
