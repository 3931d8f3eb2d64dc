from collections import Counter

import pytest

from gdedup.code import CodeSpec, is_codeword, map_to_base
from gdedup.rng import SplitMix64
from gdedup.source import (
    ConfigurationError,
    build_source,
    entropy,
    enumerate_chunks,
    from_bases,
    sample_chunk,
    sample_indices,
    select_indices,
)

H3 = CodeSpec.hamming(3)
EXAMPLE_Z = """0000000 0000001 0000010 0000100 0001000 0010000 0100000 1000000
1111111 1111110 1111101 1111011 1110111 1101111 1011111 0111111""".split()


def example_source(seed=0):
    return from_bases(H3, [0, 0b1111111], seed)


def test_splitmix_reference_vector():
    r = SplitMix64(1234567)
    assert [r.next_u64() for _ in range(3)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
    ]


def test_below_is_in_range_and_uniformish():
    r = SplitMix64(7)
    counts = Counter(r.below(3) for _ in range(30000))
    assert set(counts) == {0, 1, 2}
    assert all(abs(v - 10000) < 400 for v in counts.values())
    big = (1 << 200) + 17
    assert all(0 <= r.below(big) < big for _ in range(100))


def test_example_source():
    cfg = example_source()
    assert cfg.z_size == 16
    assert entropy(cfg) == 4.0
    assert sorted(enumerate_chunks(cfg)) == sorted(int(s, 2) for s in EXAMPLE_Z)


def test_eight_base_source():
    cfg = build_source(5, 8, seed=123)
    assert cfg.z_size == 256
    assert entropy(cfg) == 8.0
    assert len(set(cfg.active_bases)) == 8
    assert all(is_codeword(cfg.spec, b) for b in cfg.active_bases)


def test_full_packing_covers_field():
    cfg = build_source(3, 16, seed=1)
    assert sorted(enumerate_chunks(cfg)) == list(range(128))


def test_single_base_sphere():
    cfg = from_bases(H3, [0])
    assert sorted(enumerate_chunks(cfg)) == [0] + [1 << i for i in range(7)]
    rng = SplitMix64(5)
    assert all(bin(sample_chunk(cfg, rng)).count("1") <= 1 for _ in range(1000))


def test_trivial_entropy_zero():
    cfg = from_bases(CodeSpec.trivial(7), [0b1010101])
    assert entropy(cfg) == 0.0


@pytest.mark.parametrize("m,count", [(3, 1), (3, 5), (4, 3), (4, 17)])
def test_enumerate_count(m, count):
    cfg = build_source(m, count, seed=m * 100 + count)
    z = enumerate_chunks(cfg)
    assert len(z) == len(set(z)) == count * (cfg.spec.n + 1)


def test_configuration_errors():
    with pytest.raises(ConfigurationError):
        build_source(3, 17)
    with pytest.raises(ConfigurationError):
        build_source(3, 0)
    with pytest.raises(ConfigurationError):
        from_bases(H3, [0, 0])
    with pytest.raises(ValueError):
        from_bases(H3, [1])


def test_seed_determinism():
    a, b = build_source(5, 8, seed=9), build_source(5, 8, seed=9)
    assert a.active_bases == b.active_bases
    assert build_source(5, 8, seed=10).active_bases != a.active_bases
    r1, r2 = SplitMix64(3), SplitMix64(3)
    assert [sample_chunk(a, r1) for _ in range(100)] == [sample_chunk(b, r2) for _ in range(100)]


def test_selection_over_huge_population():
    cfg = build_source(16, 8, seed=4)
    assert len(set(cfg.active_bases)) == 8
    assert sorted(select_indices(10, 10, SplitMix64(0))) == list(range(10))


def test_sampled_bases_are_active():
    cfg = build_source(4, 6, seed=2)
    rng = SplitMix64(11)
    for _ in range(2000):
        assert map_to_base(cfg.spec, sample_chunk(cfg, rng))[0] in cfg.active_bases


def test_uniform_over_z_and_factorized():
    cfg = example_source()
    rng = SplitMix64(2024)
    draws = 10**6
    pairs = Counter(sample_indices(cfg, rng) for _ in range(draws))
    chunk_freq = Counter()
    for (bi, d), v in pairs.items():
        chunk_freq[cfg.active_bases[bi] ^ (1 << (d - 1) if d else 0)] += v
    assert set(chunk_freq) == {int(s, 2) for s in EXAMPLE_Z}
    assert all(abs(v / draws - 1 / 16) < 0.005 for v in chunk_freq.values())
    base_m = Counter()
    dev_m = Counter()
    for (bi, d), v in pairs.items():
        base_m[bi] += v
        dev_m[d] += v
    for (bi, d), v in pairs.items():
        assert abs(v / draws - base_m[bi] * dev_m[d] / draws**2) < 0.002
