"""MSB-first variable-width bit writer and reader.

The first bit written lands in the most significant bit of the first byte;
the final byte is zero-padded in its low bits.
"""

from __future__ import annotations

MAX_WIDTH = 64


class BitstreamError(ValueError):
    pass


class ValueOverflowError(BitstreamError):
    """Raised when a value does not fit in the requested width."""


class TruncatedStreamError(BitstreamError):
    """Raised when a read asks for more bits than remain."""


def _check_width(width: int) -> None:
    if not 0 <= width <= MAX_WIDTH:
        raise ValueError(f"width must be in [0, {MAX_WIDTH}], got {width}")


class BitWriter:
    """Append-only bit buffer.

    Whole bytes go to a ``bytearray``; up to seven pending bits are held in
    an integer accumulator.
    """

    __slots__ = ("_buf", "_acc", "_nacc")

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0

    def __len__(self) -> int:
        return len(self._buf) * 8 + self._nacc

    @property
    def length(self) -> int:
        return len(self)

    def write_bits(self, value: int, width: int) -> "BitWriter":
        """Append ``value`` as exactly ``width`` bits, most significant first."""
        _check_width(width)
        if value < 0 or value >> width:
            raise ValueOverflowError(f"value {value} does not fit in {width} bits")
        self._write_unchecked(value, width)
        return self

    def write_wide(self, value: int, width: int) -> "BitWriter":
        """Like :meth:`write_bits` but without the 64-bit width cap.

        Used for chunks and bases, which can be up to 65535 bits long.
        """
        if width < 0:
            raise ValueError(f"width must be non-negative, got {width}")
        if value < 0 or value >> width:
            raise ValueOverflowError(f"value {value} does not fit in {width} bits")
        self._write_unchecked(value, width)
        return self

    def _write_unchecked(self, value: int, width: int) -> None:
        if width == 0:
            return
        acc = (self._acc << width) | value
        nacc = self._nacc + width
        if nacc >= 8:
            nbytes = nacc >> 3
            rest = nacc & 7
            self._buf += (acc >> rest).to_bytes(nbytes, "big")
            acc &= (1 << rest) - 1
            nacc = rest
        self._acc = acc
        self._nacc = nacc

    def extend(self, other: "BitWriter") -> "BitWriter":
        self._write_unchecked(int.from_bytes(other._buf, "big"), len(other._buf) * 8)
        self._write_unchecked(other._acc, other._nacc)
        return self

    def to_bytes(self) -> bytes:
        """Serialize to ``ceil(len/8)`` bytes, zero-padding the last byte."""
        if self._nacc:
            return bytes(self._buf) + bytes([self._acc << (8 - self._nacc)])
        return bytes(self._buf)

    def to_bitstring(self) -> str:
        n = len(self)
        if n == 0:
            return ""
        return format(int.from_bytes(self.to_bytes(), "big") >> (-n % 8), f"0{n}b")

    @classmethod
    def from_bitstring(cls, bits: str) -> "BitWriter":
        w = cls()
        bits = bits.replace(" ", "").replace(".", "").replace("|", "")
        if bits:
            w.write_wide(int(bits, 2), len(bits))
        return w


class BitReader:
    """Sequential reader over ``length`` bits of ``data`` (MSB-first)."""

    __slots__ = ("_data", "_length", "cursor")

    def __init__(self, data: bytes, length: int | None = None) -> None:
        total = len(data) * 8
        if length is None:
            length = total
        if not 0 <= length <= total:
            raise ValueError(f"bit length {length} outside [0, {total}]")
        self._data = bytes(data)
        self._length = length
        self.cursor = 0

    @classmethod
    def from_bitstring(cls, bits: str) -> "BitReader":
        return cls(*_pack_bitstring(bits))

    @property
    def length(self) -> int:
        return self._length

    @property
    def remaining(self) -> int:
        return self._length - self.cursor

    def read_bits(self, width: int) -> int:
        _check_width(width)
        return self._read(width)

    def read_wide(self, width: int) -> int:
        if width < 0:
            raise ValueError(f"width must be non-negative, got {width}")
        return self._read(width)

    def _read(self, width: int) -> int:
        end = self.cursor + width
        if end > self._length:
            raise TruncatedStreamError(
                f"need {width} bits at offset {self.cursor}, only {self.remaining} left"
            )
        if width == 0:
            return 0
        lo = self.cursor >> 3
        hi = (end + 7) >> 3
        window = int.from_bytes(self._data[lo:hi], "big")
        value = (window >> (hi * 8 - end)) & ((1 << width) - 1)
        self.cursor = end
        return value


def _pack_bitstring(bits: str) -> tuple[bytes, int]:
    w = BitWriter.from_bitstring(bits)
    return w.to_bytes(), len(w)
