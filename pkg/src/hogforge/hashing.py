"""Stable hashing primitives.

Everything downstream that needs a reproducible mapping from strings to
numbers routes through here, so results do not depend on Python's
per-process hash randomization.
"""

from __future__ import annotations

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def splitmix64(state: int):
    """Infinite stream of 64-bit values from a 64-bit state."""
    state &= _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def unit_floats(state: int, count: int) -> list:
    """`count` floats in [-1, 1) derived deterministically from state."""
    gen = splitmix64(state)
    return [((next(gen) >> 11) / float(1 << 53)) * 2.0 - 1.0 for _ in range(count)]
