import oracles

Z = sorted({w ^ d for w in (0, 0b1111111) for d in [0] + [1 << j for j in range(7)]})


def gen_base(z):
    return oracles.nearest_codeword(3, z)


def test_enumeration_strategies_agree():
    for C in range(4):
        assert oracles.enumerate_expected(Z, C, gen_base, 7, 3) == oracles.enumerate_expected_naive(Z, C, gen_base, 7, 3)
        assert oracles.enumerate_expected(Z, C, lambda z: z, 7, 0) == oracles.enumerate_expected_naive(Z, C, lambda z: z, 7, 0)


def test_chain_agrees_with_enumeration():
    gen = oracles.chain_expected(range(1, 5), 2, 7, 3)
    classic = oracles.chain_expected(range(1, 5), 16, 7, 0)
    for C in range(1, 5):
        assert gen[C] == oracles.enumerate_expected(Z, C, gen_base, 7, 3)
        assert classic[C] == oracles.enumerate_expected(Z, C, lambda z: z, 7, 0)


def test_small_chain_values():
    # first chunk always new; second chunk hits with probability 1/2
    assert oracles.chain_expected([1, 2], 2, 7, 3) == {1: 11, 2: 11 + 7.5}
    assert oracles.parity_check_product(3, 0b1111111) == 0
