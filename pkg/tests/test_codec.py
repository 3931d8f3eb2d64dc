import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdedup.bitstream import BitWriter, TruncatedStreamError
from gdedup.code import CodeSpec, ShapeError
from gdedup.codec import (
    CorruptStreamError,
    Dictionary,
    EncodedStream,
    Encoder,
    FormatError,
    decode,
    encode,
    encode_incremental,
    join_chunks,
    pointer_width,
    split_chunks,
)

H3 = CodeSpec.hamming(3)
SEQ = [int(s, 2) for s in "0001000 0010000 0010000 1111110 0010000".split()]
CLASSIC_BITS = "1 0001000 1 0010000 0 1 1 1111110 0 01".replace(" ", "")
GENERAL_BITS = "1 0000000 100 0 101 0 101 1 1111111 001 0 0 101".replace(" ", "")


def stream_of(bits: str, mode: str, spec: CodeSpec, count: int) -> EncodedStream:
    w = BitWriter.from_bitstring(bits)
    return EncodedStream(mode, spec.m, spec.n, spec.k_mode, count, w.to_bytes(), len(w))


def test_pointer_width():
    assert [pointer_width(d) for d in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]


def test_dictionary():
    d = Dictionary()
    assert d.add(5) == 0 and d.add(9) == 1
    assert d.lookup(9) == 1 and d.lookup(4) is None
    assert d.pointer_width == 1
    with pytest.raises(ValueError):
        d.add(5)


def test_classic_golden():
    s = encode(SEQ, H3, "classic")
    assert s.bitstring() == CLASSIC_BITS
    assert s.payload_bits == 29


def test_generalized_golden():
    s = encode(SEQ, H3, "generalized")
    assert s.bitstring() == GENERAL_BITS
    assert s.payload_bits == 35


@pytest.mark.parametrize("mode,costs", [("classic", [8, 8, 2, 8, 3]), ("generalized", [11, 4, 4, 11, 5])])
def test_incremental_costs(mode, costs):
    enc = Encoder(H3, mode)
    got = []
    for c in SEQ:
        enc, width = encode_incremental(enc, c)
        got.append(width)
    assert got == costs
    full = encode(SEQ, H3, mode).bitstring()
    assert enc.writer.to_bitstring() == full


def test_decode_goldens():
    d = decode(stream_of(GENERAL_BITS, "generalized", H3, 5), H3)
    assert d == SEQ
    classic = CodeSpec.trivial(7)
    assert decode(stream_of(CLASSIC_BITS, "classic", classic, 5)) == SEQ


def test_final_dictionaries():
    enc = Encoder(H3, "generalized")
    for c in SEQ:
        enc.push(c)
    assert enc.dictionary.entries == [0, 0b1111111]
    enc = Encoder(H3, "classic")
    for c in SEQ:
        enc.push(c)
    assert enc.dictionary.entries == [0b0001000, 0b0010000, 0b1111110]


def test_empty_sequence():
    s = encode([], H3)
    assert (s.payload_bits, s.chunk_count) == (0, 0)
    assert decode(EncodedStream.from_bytes(s.to_bytes())) == []


def test_first_chunk_cost():
    for spec in (H3, CodeSpec.hamming(4, "compact"), CodeSpec.hamming(5)):
        enc = Encoder(spec)
        assert enc.push(12345 % (1 << spec.n))[1] == 1 + spec.k + spec.q


def test_shape_error():
    with pytest.raises(ShapeError):
        encode([1 << 7], H3)


def test_container_layout():
    data = encode(SEQ, H3).to_bytes()
    assert data[:4] == b"GDDP"
    assert data[4:8] == bytes([1, 1, 3, 0])
    assert int.from_bytes(data[8:16], "big") == 5
    assert len(data) == 16 + 5
    classic = encode(SEQ, H3, "classic").to_bytes()
    assert classic[4:7] == bytes([1, 0, 0])
    assert classic[7:9] == (7).to_bytes(2, "big")
    assert classic[9] == 0
    assert decode(EncodedStream.from_bytes(classic)) == SEQ


def test_container_errors():
    with pytest.raises(FormatError):
        EncodedStream.from_bytes(b"XXXX")
    good = encode(SEQ, H3).to_bytes()
    with pytest.raises(FormatError):
        EncodedStream.from_bytes(good[:4] + b"\x02" + good[5:])
    with pytest.raises(FormatError):
        EncodedStream.from_bytes(good[:10])


def test_truncated_payload():
    s = stream_of(GENERAL_BITS[:-2], "generalized", H3, 5)
    with pytest.raises(TruncatedStreamError):
        decode(s)


def test_corrupt_streams():
    with pytest.raises(CorruptStreamError):
        decode(stream_of("0000", "generalized", H3, 1))
    with pytest.raises(CorruptStreamError):
        # repeated base sent as a new entry
        decode(stream_of("1" + "0000000" + "000" + "1" + "0000000" + "001", "generalized", H3, 2))
    with pytest.raises(CorruptStreamError):
        # classic, 3 entries then pointer 11 (index 3)
        bits = "10000001" + "10000010" + "10000011" + "011"
        decode(stream_of(bits, "classic", CodeSpec.trivial(7), 4))
    with pytest.raises(CorruptStreamError):
        # full base that is not a codeword
        decode(stream_of("1" + "0000001" + "000", "generalized", H3, 1))


def test_compact_mode_round_trip():
    spec = CodeSpec.hamming(3, "compact")
    s = encode(SEQ, spec)
    assert s.payload_bits == 35 - 2 * 3
    assert decode(EncodedStream.from_bytes(s.to_bytes()), spec) == SEQ


def test_decode_rejects_mismatched_code():
    s = encode(SEQ, H3)
    with pytest.raises(FormatError):
        decode(s, CodeSpec.hamming(4))


@settings(max_examples=200, deadline=None)
@given(
    st.integers(2, 5).flatmap(
        lambda m: st.tuples(
            st.just(m),
            st.sampled_from(["classic", "generalized"]),
            st.sampled_from(["full", "compact"]),
            st.lists(st.integers(0, (1 << ((1 << m) - 1)) - 1), max_size=200),
        )
    )
)
def test_round_trip_property(case):
    m, mode, k_mode, chunks = case
    spec = CodeSpec.hamming(m, k_mode)
    s = encode(chunks, spec, mode)
    back = EncodedStream.from_bytes(s.to_bytes())
    assert decode(back) == chunks
    enc = Encoder(spec, mode, keep_bits=False)
    assert sum(enc.push(c)[1] for c in chunks) == s.payload_bits


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=100))))
def test_classic_equals_generalized_with_trivial_code(case):
    n, chunks = case
    t = CodeSpec.trivial(n)
    assert encode(chunks, t, "classic").bitstring() == encode(chunks, t, "generalized").bitstring()


def test_dictionary_bounded_by_active_bases():
    from gdedup.rng import SplitMix64
    from gdedup.source import build_source, sample_chunk

    cfg = build_source(4, 5, seed=3)
    rng = SplitMix64(8)
    enc = Encoder(cfg.spec)
    sizes = []
    for _ in range(300):
        enc.push(sample_chunk(cfg, rng))
        sizes.append(len(enc.dictionary))
    assert sizes == sorted(sizes) and sizes[-1] <= 5


def test_split_and_join():
    data, nbits = join_chunks(SEQ, 7)
    assert nbits == 35 and len(data) == 5
    assert split_chunks(data, 7, 35) == SEQ
    with pytest.raises(ShapeError):
        split_chunks(data, 7)
