from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from torsdiv.exactring import (
    BadDenominator,
    FpElem,
    MixedModulus,
    NotAUnit,
    QuotElem,
    QuotientRing,
    ZpnElem,
    inv,
    is_prime,
    quot_reduce,
    udivmod,
    ugcd,
    umul,
    uxgcd,
    uadd,
)

PRIMES = [3, 5, 7, 11, 13, 101]


def test_inverses_frozen():
    assert inv(FpElem(3, 5)) == FpElem(2, 5)
    assert inv(ZpnElem(2, 5, 3)).r == 63
    # 2 - v is 3 modulo v + 1
    two_minus_v = QuotElem((2, -1), (1, 1))
    assert inv(two_minus_v) == QuotElem((Fraction(1, 3),), (1, 1))


def test_quotient_reduction():
    assert quot_reduce((0, 0, 1), (1, 1)).rep == (1,)
    assert quot_reduce((0, -2, 0, 1), (-1, 0, 1)).rep == (0, -1)
    assert quot_reduce((), (1, 1)).rep == ()


def test_non_units():
    with pytest.raises(NotAUnit):
        inv(FpElem(0, 7))
    with pytest.raises(NotAUnit):
        inv(ZpnElem(10, 5, 2))
    # v - 1 shares the factor v - 1 with v^2 - 1
    with pytest.raises(NotAUnit) as err:
        inv(QuotElem((-1, 1), (-1, 0, 1)))
    assert err.value.factor == (-1, 1)


def test_bad_denominator_and_mixed_moduli():
    with pytest.raises(BadDenominator):
        FpElem.from_rational(Fraction(1, 5), 5)
    assert FpElem.from_rational(Fraction(1, 2), 5) == FpElem(3, 5)
    with pytest.raises(MixedModulus):
        FpElem(1, 5) + FpElem(1, 7)
    with pytest.raises(MixedModulus):
        QuotientRing((1, 1)).coerce(QuotElem((1,), (-1, 1)))


def test_valuation_and_json():
    a = ZpnElem(50, 5, 4)
    assert a.valuation() == 2 and not a.is_unit()
    assert ZpnElem.from_json(a.to_json()) == a
    assert ZpnElem(0, 5, 4).valuation() == 4


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@st.composite
def fp_triples(draw):
    p = draw(st.sampled_from(PRIMES))
    return p, [FpElem(draw(st.integers(-10**6, 10**6)), p) for _ in range(3)]


@given(fp_triples())
def test_fp_field_axioms(data):
    p, (a, b, c) = data
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == FpElem(0, p)
    if a:
        assert a * inv(a) == FpElem(1, p)


@given(st.sampled_from(PRIMES), st.integers(1, 6), st.integers(-10**9, 10**9), st.integers(-10**9, 10**9))
def test_zpn_ring_axioms(p, N, r, s):
    a, b = ZpnElem(r, p, N), ZpnElem(s, p, N)
    assert (a * b).r == r * s % p**N
    assert (a + b) - b == a
    if a.is_unit():
        assert a * inv(a) == ZpnElem(1, p, N)


polys = st.lists(st.fractions(max_denominator=7).map(lambda q: Fraction(q.numerator % 23, q.denominator)),
                 min_size=1, max_size=5)


@given(polys, polys)
def test_xgcd_bezout(a, b):
    g, s, t = uxgcd(a, b)
    assert uadd(umul(s, a), umul(t, b)) == g
    if g:
        assert udivmod(a, g)[1] == () and udivmod(b, g)[1] == ()
        assert ugcd(a, b) == g


@given(polys, st.lists(st.integers(-5, 5), min_size=1, max_size=3))
def test_quotient_ring_is_a_ring(a, b):
    g = (1, 0, 1)  # v^2 + 1, irreducible
    A, B = QuotElem(a, g), QuotElem(b, g)
    assert A * B == B * A
    assert (A + B) * A == A * A + B * A
    if A:
        assert A * inv(A) == QuotElem((1,), g)
