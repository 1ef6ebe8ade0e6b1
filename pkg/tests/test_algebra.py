import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyprg.algebra import (
    _IRREDUCIBLE,
    FieldElement,
    HashSpec,
    KWiseSpec,
    SeedStream,
    SeedUnderflowError,
    gf_inv_int,
    gf_mul,
    gf_mul_int,
    hash_buckets,
    hash_eval,
    kwise_bits,
    min_field_degree,
)
from suites import oracle_gf_mul


# ---------------------------------------------------------------------------
# Field arithmetic
# ---------------------------------------------------------------------------


def _poly_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _poly_pow_mod(a: int, e: int, m: int) -> int:
    def mul(x, y):
        r = 0
        while y:
            if y & 1:
                r ^= x
            x <<= 1
            y >>= 1
        return _poly_mod(r, m)

    r = 1
    while e:
        if e & 1:
            r = mul(r, a)
        a = mul(a, a)
        e >>= 1
    return r


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _prime_factors(n: int) -> set[int]:
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def test_tabulated_polynomials_are_irreducible():
    for s, f in _IRREDUCIBLE.items():
        assert f.bit_length() == s + 1
        if s == 1:
            assert f == 0b11
            continue
        assert _poly_pow_mod(2, 1 << s, f) == _poly_mod(2, f)
        for q in _prime_factors(s):
            h = _poly_pow_mod(2, 1 << (s // q), f) ^ 2
            assert _poly_gcd(f, h) == 1, f"degree {s} table entry is reducible"


def test_gf2_identity():
    assert gf_mul_int(1, 1, 1) == 1


def test_gf16_x_times_x3():
    # x * x^3 = x^4 = x + 1 mod x^4 + x + 1
    assert gf_mul_int(0b0010, 0b1000, 4) == 0b0011


@pytest.mark.parametrize("s", [1, 2, 3, 4, 6, 8])
def test_zero_absorbs(s):
    for a in range(1 << s):
        assert gf_mul_int(a, 0, s) == 0


def test_mismatched_degrees_error():
    with pytest.raises(ValueError):
        gf_mul(FieldElement(1, 2), FieldElement(1, 3))


@pytest.mark.parametrize("s", range(1, 9))
def test_inverses_exhaustive(s):
    for a in range(1, 1 << s):
        assert gf_mul_int(a, gf_inv_int(a, s), s) == 1


@settings(max_examples=200, deadline=None)
@given(
    s=st.sampled_from([2, 3, 5, 8, 13, 17, 32]),
    data=st.data(),
)
def test_field_axioms_random_triples(s, data):
    top = (1 << s) - 1
    a = data.draw(st.integers(0, top))
    b = data.draw(st.integers(0, top))
    c = data.draw(st.integers(0, top))
    assert gf_mul_int(a, b, s) == gf_mul_int(b, a, s)
    assert gf_mul_int(gf_mul_int(a, b, s), c, s) == gf_mul_int(a, gf_mul_int(b, c, s), s)
    assert gf_mul_int(a, b ^ c, s) == gf_mul_int(a, b, s) ^ gf_mul_int(a, c, s)


@settings(max_examples=100, deadline=None)
@given(s=st.sampled_from([3, 4, 7, 11]), data=st.data())
def test_gf_mul_matches_independent_oracle(s, data):
    a = data.draw(st.integers(0, (1 << s) - 1))
    b = data.draw(st.integers(0, (1 << s) - 1))
    assert gf_mul_int(a, b, s) == oracle_gf_mul(a, b, s)


# ---------------------------------------------------------------------------
# Seed streams
# ---------------------------------------------------------------------------


def test_seedstream_msb_first():
    s = SeedStream.from_hex("a1")  # 1010 0001
    assert s.read(1) == 1
    assert s.read(3) == 0b010
    assert s.read(4) == 0b0001
    assert s.bits_remaining == 0


def test_seedstream_underflow():
    s = SeedStream.from_int(0, 4)
    s.read(4)
    with pytest.raises(SeedUnderflowError):
        s.read(1)


def test_seedstream_no_reread():
    s = SeedStream.from_int(0b1010, 4)
    assert [s.read(1) for _ in range(4)] == [1, 0, 1, 0]
    assert s.bits_consumed == 4


def test_seedstream_hex_truncation():
    s = SeedStream.from_hex("f0", nbits=4)
    assert s.read(4) == 0xF
    with pytest.raises(ValueError):
        SeedStream.from_hex("f", nbits=5)


# ---------------------------------------------------------------------------
# k-wise uniform strings
# ---------------------------------------------------------------------------


def _all_outputs(spec: KWiseSpec) -> np.ndarray:
    return np.array(
        [
            kwise_bits(spec, SeedStream.from_int(c, spec.seed_bits))
            for c in range(1 << spec.seed_bits)
        ]
    )


def test_kwise_k1_constant_and_balanced():
    spec = KWiseSpec(n=5, k=1, s=3)
    M = _all_outputs(spec)
    assert all(len(set(row)) == 1 for row in M.tolist())
    col = M[:, 0]
    assert (col == 1).sum() == (col == -1).sum()


def test_kwise_pairwise_exact_n4():
    spec = KWiseSpec(n=4, k=2, s=2)
    M = _all_outputs(spec).astype(np.int64)
    for size in (1, 2):
        for S in itertools.combinations(range(4), size):
            assert M[:, S].prod(axis=1).sum() == 0


def test_kwise_higher_parity_bias_regression():
    # With the LSB polynomial-evaluation construction, degree-(k-1)
    # evaluations are unbiased on every parity of size <= 3 here; the
    # first biased parity is the XOR-zero 4-set {0,1,2,3} (bias exactly
    # +1, a regression value).
    spec = KWiseSpec(n=4, k=2, s=2)
    M = _all_outputs(spec).astype(np.int64)
    for S in itertools.combinations(range(4), 3):
        assert M[:, S].prod(axis=1).sum() == 0
    assert M.prod(axis=1).sum() == 1 << spec.seed_bits


def test_kwise_exact_uniformity_property():
    # Every parity of <= k coordinates averages exactly 0.
    for spec in (KWiseSpec(6, 3, 3), KWiseSpec(5, 2, 3), KWiseSpec(8, 2, 3)):
        M = _all_outputs(spec).astype(np.int64)
        for size in range(1, spec.k + 1):
            for S in itertools.combinations(range(spec.n), size):
                assert M[:, S].prod(axis=1).sum() == 0, (spec, S)


def test_kwise_seed_underflow():
    spec = KWiseSpec(n=4, k=2, s=2)
    with pytest.raises(SeedUnderflowError):
        kwise_bits(spec, SeedStream.from_int(0, 3))


# ---------------------------------------------------------------------------
# Hash family
# ---------------------------------------------------------------------------


def test_hash_pairs_exact_tiny():
    # n=2, L=2, r=2, s=1: the 4 seeds hit the 4 bucket pairs once each.
    spec = HashSpec(n=2, L=2, r=2, s=1)
    seen = []
    for c in range(4):
        h = hash_buckets(spec, SeedStream.from_int(c, 2))
        seen.append((h[0], h[1]))
    assert sorted(seen) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_hash_r1_constant():
    spec = HashSpec(n=6, L=4, r=1, s=3)
    for c in range(8):
        h = hash_buckets(spec, SeedStream.from_int(c, 3))
        assert len(set(h.tolist())) == 1


def test_hash_eval_deterministic_and_in_range():
    spec = HashSpec(n=5, L=4, r=2, s=3)
    for c in (0, 17, 63):
        b1 = hash_eval(spec, SeedStream.from_int(c, 6), 3)
        b2 = hash_eval(spec, SeedStream.from_int(c, 6), 3)
        assert b1 == b2
        assert 0 <= b1 < 4


def test_hash_rwise_uniform_joint():
    # Every pair of distinct indices hits each bucket pair equally often.
    spec = HashSpec(n=4, L=2, r=2, s=2)
    rows = np.array(
        [hash_buckets(spec, SeedStream.from_int(c, 4)) for c in range(16)]
    )
    for i, j in itertools.combinations(range(4), 2):
        counts = np.zeros((2, 2), dtype=int)
        for r in range(16):
            counts[rows[r, i], rows[r, j]] += 1
        assert (counts == 4).all()


def test_hash_requires_power_of_two():
    with pytest.raises(ValueError):
        HashSpec(n=4, L=3, r=2, s=2)


def test_min_field_degree():
    assert min_field_degree(1) == 1
    assert min_field_degree(2) == 1
    assert min_field_degree(3) == 2
    assert min_field_degree(8) == 3
    assert min_field_degree(9) == 4
    with pytest.raises(ValueError):
        min_field_degree(2**33)
