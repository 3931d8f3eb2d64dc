"""Binary Hamming codes as base alphabets, plus the trivial (identity) code.

Chunks are plain ``int`` values holding ``n`` bits. Bit position ``i``
(1-based, counted from the least significant end) is ``1 << (i - 1)``, so the
string ``"0000001"`` is position 1 and ``"1000000"`` is position 7.

The parity-check matrix is the canonical one: column ``i`` is the ``m``-bit
binary form of ``i``. A chunk's syndrome is therefore the XOR of the positions
of its set bits, and for a single-bit deviation it equals the flipped position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Literal

KMode = Literal["full", "compact"]

MIN_M = 2
MAX_M = 16
MAX_TRIVIAL_N = 65535


class ShapeError(ValueError):
    """A chunk does not fit the code's length ``n``."""


class InvalidBaseError(ValueError):
    """A value that should be a codeword is not one."""


@dataclass(frozen=True)
class CodeSpec:
    """Parameters of a base alphabet.

    For a Hamming code ``n = 2**m - 1``, deviations are the ``n + 1`` vectors
    of weight at most one and ``q = m`` bits index them. The trivial code
    (``m == 0``) makes every chunk its own base with a single all-zero
    deviation, so ``q = 0``.
    """

    m: int
    n: int
    k_mode: KMode = "full"
    _masks: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @classmethod
    def hamming(cls, m: int, k_mode: KMode = "full") -> "CodeSpec":
        if not MIN_M <= m <= MAX_M:
            raise ValueError(f"m must be in [{MIN_M}, {MAX_M}], got {m}")
        if k_mode not in ("full", "compact"):
            raise ValueError(f"unknown k_mode {k_mode!r}")
        return cls(m, (1 << m) - 1, k_mode, _parity_masks(m))

    @classmethod
    def trivial(cls, n: int) -> "CodeSpec":
        if not 1 <= n <= MAX_TRIVIAL_N:
            raise ValueError(f"n must be in [1, {MAX_TRIVIAL_N}], got {n}")
        return cls(0, n, "full")

    @property
    def is_trivial(self) -> bool:
        return self.m == 0

    @property
    def t(self) -> int:
        return 0 if self.is_trivial else 1

    @property
    def q(self) -> int:
        """Deviation width in bits."""
        return self.m

    @property
    def k(self) -> int:
        """Width of a base as written to the stream."""
        return self.n - self.m if self.k_mode == "compact" else self.n

    @property
    def deviation_count(self) -> int:
        return 1 if self.is_trivial else self.n + 1

    @property
    def base_count(self) -> int:
        """``|X'|``, the number of possible bases."""
        return 1 << (self.n - self.m)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1


@lru_cache(maxsize=None)
def _parity_masks(m: int) -> tuple[int, ...]:
    n = (1 << m) - 1
    masks = [0] * m
    for pos in range(1, n + 1):
        bit = 1 << (pos - 1)
        for j in range(m):
            if pos >> j & 1:
                masks[j] |= bit
    return tuple(masks)


@lru_cache(maxsize=None)
def _info_positions(m: int) -> tuple[int, ...]:
    """Non-power-of-two positions, highest first."""
    n = (1 << m) - 1
    return tuple(p for p in range(n, 0, -1) if p & (p - 1))


def _check_chunk(spec: CodeSpec, c: int) -> None:
    if c < 0 or c >> spec.n:
        raise ShapeError(f"chunk does not fit in n={spec.n} bits")


def syndrome(spec: CodeSpec, c: int) -> int:
    """Return 0 for a codeword, else the position whose flip yields one."""
    if spec.is_trivial:
        raise ValueError("syndrome is undefined for the trivial code")
    _check_chunk(spec, c)
    s = 0
    for j, mask in enumerate(spec._masks):
        s |= ((c & mask).bit_count() & 1) << j
    return s


def is_codeword(spec: CodeSpec, c: int) -> bool:
    if spec.is_trivial:
        _check_chunk(spec, c)
        return True
    return syndrome(spec, c) == 0


def map_to_base(spec: CodeSpec, c: int) -> tuple[int, int]:
    """Minimum-distance mapping: ``(base, deviation_index)``."""
    if spec.is_trivial:
        _check_chunk(spec, c)
        return c, 0
    s = syndrome(spec, c)
    if s:
        return c ^ (1 << (s - 1)), s
    return c, 0


def deviation(spec: CodeSpec, index: int) -> int:
    """The deviation vector for ``index`` (0 is the zero vector)."""
    limit = 0 if spec.is_trivial else spec.n
    if not 0 <= index <= limit:
        raise IndexError(f"deviation index {index} outside [0, {limit}]")
    return 1 << (index - 1) if index else 0


def apply_deviation(spec: CodeSpec, base: int, index: int) -> int:
    _check_chunk(spec, base)
    return base ^ deviation(spec, index)


def compact_base(spec: CodeSpec, base: int) -> int:
    """Pack a codeword's ``n - m`` information bits, highest position first."""
    if spec.is_trivial:
        raise ValueError("compact bases need a Hamming code")
    if not is_codeword(spec, base):
        raise InvalidBaseError("base is not a codeword")
    value = 0
    for pos in _info_positions(spec.m):
        value = (value << 1) | (base >> (pos - 1) & 1)
    return value


def expand_base(spec: CodeSpec, value: int) -> int:
    """Inverse of :func:`compact_base`: re-encode info bits to a codeword."""
    if spec.is_trivial:
        raise ValueError("compact bases need a Hamming code")
    kbits = spec.n - spec.m
    if value < 0 or value >> kbits:
        raise ValueError(f"value does not fit in {kbits} information bits")
    data = 0
    for i, pos in enumerate(reversed(_info_positions(spec.m))):
        if value >> i & 1:
            data |= 1 << (pos - 1)
    # parity bits sit at positions 2**j; setting one toggles syndrome bit j
    s = syndrome(spec, data)
    for j in range(spec.m):
        if s >> j & 1:
            data |= 1 << ((1 << j) - 1)
    return data


def codewords(spec: CodeSpec) -> Iterator[int]:
    """All ``2**(n - m)`` codewords in information-value order."""
    for v in range(spec.base_count):
        yield expand_base(spec, v)


def chunk_from_str(bits: str) -> int:
    return int(bits, 2)


def chunk_to_str(c: int, n: int) -> str:
    return format(c, f"0{n}b")
