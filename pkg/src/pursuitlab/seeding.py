"""Deterministic 64-bit seed derivation.

Sub-seeds are produced by chaining the SplitMix64 finalizer over the parts,
so (master, i, j) maps to the same value on every platform and independent
draws can run in any order or in parallel.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Mix integer parts into one 64-bit seed (documented SplitMix64 chain)."""
    h = 0
    for p in parts:
        h = _splitmix64(h ^ _splitmix64(int(p) & _MASK))
    return h
