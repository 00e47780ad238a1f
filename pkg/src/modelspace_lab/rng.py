"""Deterministic randomness shared by generators, checks, and the CLI.

All randomness in the package flows from a single 64-bit seed through a
splitmix-style generator.  Consumers derive independent streams from the run
seed and a text label, so results do not depend on execution order or on the
worker count used to run checks.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fnv1a(label: str) -> int:
    h = _FNV_OFFSET
    for byte in label.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK
    return h


class SplitMix64:
    """Splitmix 64-bit stream with label-based substream derivation."""

    def __init__(self, seed: int):
        self._seed = seed & _MASK
        self._state = seed & _MASK

    def derive(self, label: str) -> "SplitMix64":
        """Independent stream determined by the original seed and a label."""
        return SplitMix64(_mix(self._seed ^ _fnv1a(label)))

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def uniform(self) -> float:
        # 53 significant bits, value in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform_array(self, n: int) -> list[float]:
        return [self.uniform() for _ in range(n)]

    def complex_normal(self) -> complex:
        """Standard complex normal (unit variance, circularly symmetric)."""
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log1p(-u1))
        return complex(r * math.cos(2.0 * math.pi * u2),
                       r * math.sin(2.0 * math.pi * u2)) / math.sqrt(2.0)

    def complex_normal_array(self, n: int) -> list[complex]:
        return [self.complex_normal() for _ in range(n)]

    def unit_disk(self, max_radius: float = 1.0) -> complex:
        """Uniform draw from the disk of the given radius."""
        r = max_radius * math.sqrt(self.uniform())
        theta = 2.0 * math.pi * self.uniform()
        return complex(r * math.cos(theta), r * math.sin(theta))
