"""SplitMix64: a tiny, fully specified 64-bit generator.

Update function (all arithmetic mod 2**64)::

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

Bounded draws use rejection sampling on the low end so they are exactly
uniform: draw ``x`` until ``x >= 2**64 % bound``, then return ``x % bound``.
Bounds above ``2**64`` concatenate 64-bit words, most significant first, and
reject against the largest multiple of ``bound``.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

# xor-ed into the experiment seed to key base selection apart from trial streams
SELECTION_KEY = 0x5EED_BA5E_5E1E_C700


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = z = (self.state + _GAMMA) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound <= 1 << 64:
            threshold = (1 << 64) % bound
            while True:
                x = self.next_u64()
                if x >= threshold:
                    return x % bound
        words = (bound.bit_length() + 63) // 64
        span = 1 << (64 * words)
        limit = span - span % bound
        while True:
            x = 0
            for _ in range(words):
                x = (x << 64) | self.next_u64()
            if x < limit:
                return x % bound
