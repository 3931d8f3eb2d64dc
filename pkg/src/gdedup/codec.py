"""Generalized and classic deduplication coding.

Each chunk record is::

    new base:   1 | base (k bits)            | deviation (q bits)
    known base: 0 | pointer (ceil(log2 |D|)) | deviation (q bits)

The pointer is the base's 0-based insertion index and its width is taken from
the dictionary size before the chunk is coded. Classic mode is the same coder
run with the trivial code (every chunk is its own base, ``q = 0``).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .bitstream import BitReader, BitWriter
from .code import CodeSpec, ShapeError, compact_base, expand_base, is_codeword

Mode = Literal["classic", "generalized"]

MAGIC = b"GDDP"
VERSION = 1
_MODES = {"classic": 0, "generalized": 1}
_K_MODES = {"full": 0, "compact": 1}


class CorruptStreamError(ValueError):
    pass


class FormatError(ValueError):
    """Container header is malformed or unsupported."""


def pointer_width(size: int) -> int:
    """``ceil(log2 size)`` for ``size >= 1``; 0 for a one-entry dictionary."""
    return (size - 1).bit_length()


class Dictionary:
    """Insertion-ordered set of bases with O(1) index lookup."""

    __slots__ = ("entries", "_index")

    def __init__(self) -> None:
        self.entries: list[int] = []
        self._index: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, base: int) -> bool:
        return base in self._index

    def lookup(self, base: int) -> int | None:
        return self._index.get(base)

    def add(self, base: int) -> int:
        if base in self._index:
            raise ValueError("base already present")
        i = len(self.entries)
        self._index[base] = i
        self.entries.append(base)
        return i

    @property
    def pointer_width(self) -> int:
        return pointer_width(len(self.entries))


def resolve_spec(spec: CodeSpec, mode: Mode) -> CodeSpec:
    """The code actually used for ``mode``: classic always runs the trivial code."""
    if mode == "classic":
        return spec if spec.is_trivial else CodeSpec.trivial(spec.n)
    if mode != "generalized":
        raise ValueError(f"unknown mode {mode!r}")
    return spec


class Encoder:
    """Incremental encoder; feed chunks one at a time with :meth:`push`.

    With ``keep_bits=False`` only the cost accounting is maintained, which is
    what the Monte Carlo harness needs.
    """

    def __init__(self, spec: CodeSpec, mode: Mode = "generalized", keep_bits: bool = True) -> None:
        self.mode = mode
        self.spec = resolve_spec(spec, mode)
        self.dictionary = Dictionary()
        self.writer = BitWriter() if keep_bits else None
        self.bit_length = 0
        self.chunk_count = 0
        s = self.spec
        self._n = s.n
        self._q = s.q
        self._k = s.k
        self._compact = s.k_mode == "compact"
        self._masks = s._masks
        self._limit = 1 << s.n

    def push(self, chunk: int) -> tuple[int, int]:
        """Encode one chunk; return its record as ``(bits, width)``."""
        if chunk < 0 or chunk >= self._limit:
            raise ShapeError(f"chunk does not fit in n={self._n} bits")
        dev = 0
        for j, mask in enumerate(self._masks):
            dev |= ((chunk & mask).bit_count() & 1) << j
        base = chunk ^ (1 << (dev - 1)) if dev else chunk
        d = self.dictionary
        idx = d._index.get(base)
        if idx is None:
            body = compact_base(self.spec, base) if self._compact else base
            width = self._k
            d.add(base)
            bits = (1 << width) | body
        else:
            width = pointer_width(len(d.entries))
            bits = idx
        width += 1 + self._q
        bits = (bits << self._q) | dev
        if self.writer is not None:
            self.writer.write_wide(bits, width)
        self.bit_length += width
        self.chunk_count += 1
        return bits, width

    def stream(self) -> "EncodedStream":
        if self.writer is None:
            raise ValueError("encoder was created with keep_bits=False")
        return EncodedStream(
            mode=self.mode,
            m=self.spec.m,
            n=self.spec.n,
            k_mode=self.spec.k_mode,
            chunk_count=self.chunk_count,
            payload=self.writer.to_bytes(),
            payload_bits=len(self.writer),
        )


def encode_incremental(encoder: Encoder, chunk: int) -> tuple[Encoder, int]:
    """Encode one chunk and return the encoder plus the bits it emitted."""
    _, width = encoder.push(chunk)
    return encoder, width


@dataclass(frozen=True)
class EncodedStream:
    mode: Mode
    m: int
    n: int
    k_mode: str
    chunk_count: int
    payload: bytes
    payload_bits: int

    @property
    def spec(self) -> CodeSpec:
        if self.m == 0:
            return CodeSpec.trivial(self.n)
        return CodeSpec.hamming(self.m, self.k_mode)  # type: ignore[arg-type]

    def bitstring(self) -> str:
        reader = BitReader(self.payload, self.payload_bits)
        return format(reader.read_wide(self.payload_bits), f"0{self.payload_bits}b") if self.payload_bits else ""

    def to_bytes(self) -> bytes:
        """Container: magic, version, mode, m (or 0 + u16 n), k_mode, u64 C, payload."""
        head = MAGIC + bytes([VERSION, _MODES[self.mode], self.m])
        if self.m == 0:
            head += struct.pack(">H", self.n)
        head += bytes([_K_MODES[self.k_mode]]) + struct.pack(">Q", self.chunk_count)
        return head + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "EncodedStream":
        if len(data) < 7 or data[:4] != MAGIC:
            raise FormatError("missing GDDP magic")
        version, mode_byte, m = data[4], data[5], data[6]
        if version != VERSION:
            raise FormatError(f"unsupported version {version}")
        modes = {v: k for k, v in _MODES.items()}
        if mode_byte not in modes:
            raise FormatError(f"unknown mode byte {mode_byte}")
        pos = 7
        if m == 0:
            if len(data) < pos + 2:
                raise FormatError("header truncated")
            (n,) = struct.unpack_from(">H", data, pos)
            pos += 2
        else:
            n = (1 << m) - 1
        if len(data) < pos + 9:
            raise FormatError("header truncated")
        k_modes = {v: k for k, v in _K_MODES.items()}
        if data[pos] not in k_modes:
            raise FormatError(f"unknown k_mode byte {data[pos]}")
        k_mode = k_modes[data[pos]]
        (count,) = struct.unpack_from(">Q", data, pos + 1)
        payload = data[pos + 9 :]
        stream = cls(modes[mode_byte], m, n, k_mode, count, payload, len(payload) * 8)
        try:
            stream.spec
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
        return stream


def encode(chunks: Iterable[int], spec: CodeSpec, mode: Mode = "generalized") -> EncodedStream:
    enc = Encoder(spec, mode)
    for c in chunks:
        enc.push(c)
    return enc.stream()


class Decoder:
    """Mirror of :class:`Encoder`; parses one record per :meth:`pull`."""

    def __init__(self, spec: CodeSpec, reader: BitReader) -> None:
        self.spec = spec
        self.reader = reader
        self.dictionary = Dictionary()

    def pull(self) -> int:
        spec, r, d = self.spec, self.reader, self.dictionary
        if r.read_bits(1):
            raw = r.read_wide(spec.k)
            if spec.k_mode == "compact":
                base = expand_base(spec, raw)
            else:
                base = raw
            if not is_codeword(spec, base):
                raise CorruptStreamError(f"base {base:#x} is not a codeword")
            if base in d:
                raise CorruptStreamError("new-base flag for a base already in the dictionary")
            d.add(base)
        else:
            if not d.entries:
                raise CorruptStreamError("pointer flag with an empty dictionary")
            idx = r.read_bits(d.pointer_width)
            if idx >= len(d.entries):
                raise CorruptStreamError(f"pointer {idx} outside dictionary of {len(d.entries)}")
            base = d.entries[idx]
        dev = r.read_bits(spec.q)
        return base ^ (1 << (dev - 1)) if dev else base


def decode(stream: EncodedStream, spec: CodeSpec | None = None) -> list[int]:
    """Reconstruct ``stream.chunk_count`` chunks.

    ``spec`` is optional; when given it must agree with the header.
    """
    actual = stream.spec
    if spec is not None:
        expected = resolve_spec(spec, stream.mode)
        if (expected.m, expected.n, expected.k_mode) != (actual.m, actual.n, actual.k_mode):
            raise FormatError("stream header does not match the supplied code")
    dec = Decoder(actual, BitReader(stream.payload, stream.payload_bits))
    return [dec.pull() for _ in range(stream.chunk_count)]


def split_chunks(data: bytes, n: int, bit_length: int | None = None) -> list[int]:
    """Cut the first ``bit_length`` bits of ``data`` into ``n``-bit chunks."""
    if bit_length is None:
        bit_length = len(data) * 8
    if bit_length % n:
        raise ShapeError(f"{bit_length} bits is not a multiple of n={n}")
    reader = BitReader(data, bit_length)
    return [reader.read_wide(n) for _ in range(bit_length // n)]


def join_chunks(chunks: Sequence[int], n: int) -> tuple[bytes, int]:
    w = BitWriter()
    for c in chunks:
        w.write_wide(c, n)
    return w.to_bytes(), len(w)
