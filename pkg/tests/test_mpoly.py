from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from torsdiv import chebfam as cf
from torsdiv.exactring import GF, BadDenominator, FpElem
from torsdiv.mpoly import (
    VARS,
    MixedRings,
    MonomialOrder,
    MultiPoly,
    equal_up_to_unit,
    evaluate,
    univariate_gcd,
)

x, y, z, v = MultiPoly.gens(VARS)
F = x * y * z**2 - z * (x**2 + y**2 + z**2) + x * y + 2 * z


def test_ring_ops_examples():
    assert (x + y) * (x - y) == x**2 - y**2
    assert v * cf.S(1) - cf.S(0) == cf.S(2)
    assert F + 0 == F


def test_derivatives():
    assert F.diff("z") == 2 * x * y * z - x**2 - y**2 - 3 * z**2 + 2
    assert y.diff("x").is_zero()
    assert cf.S(2).diff("v") == 2 * v


def test_substitution():
    assert F.subs("z", x + y - 2) == (x + y - 1) ** 2 * (x - 2) * (y - 2)
    S = {k: cf.S(k) for k in (-1, 0, 1)}
    f1 = x * y * S[0] - (x * y - z) * S[-1] - z * S[1]
    assert f1.subs("v", x**2 + y**2 + z**2 - x * y * z - 2) == F
    assert F.subs("x", x) == F


def test_evaluation_over_f5():
    assert evaluate(F, (3, 3, 4, 0), ring=GF(5)) == FpElem(0, 5)
    assert evaluate(F.diff("z"), (3, 3, 4, 0), ring=GF(5)) == FpElem(3, 5)
    assert F(0, 0, 0, 0) == 0
    with pytest.raises(BadDenominator):
        evaluate(x * Fraction(1, 5), (1, 0, 0, 0), ring=GF(5))


def test_univariate_gcd():
    assert univariate_gcd(v**2 - 1, v + 1) == v + 1
    q = cf.S(4) - cf.S(2)
    assert univariate_gcd(q, q.diff("v")) == MultiPoly.const(1)
    assert univariate_gcd(2 * v**2 - 2, MultiPoly({}, VARS)) == v**2 - 1


def test_mixed_rings_rejected():
    X = MultiPoly.gens(VARS, GF(5))[0]
    with pytest.raises(MixedRings):
        X + x


def test_json_roundtrip_and_str():
    p = F * Fraction(3, 7) - v**3
    assert MultiPoly.from_json(p.to_json()) == p
    assert MultiPoly.from_json(p.to_ring(GF(5)).to_json()) == p.to_ring(GF(5))
    assert str(x**2 - 2 * x * y) == "x^2 -2*x*y"


def test_orders():
    lex = MonomialOrder.lex(("z", "y", "x", "v"))
    lt, _ = (x + y + z**2).leading_term(lex)
    assert lt == (0, 0, 2, 0)
    lt, _ = (x**3 + y * z).leading_term(MonomialOrder.grevlex(VARS))
    assert lt == (3, 0, 0, 0)


def test_equal_up_to_unit():
    assert equal_up_to_unit(2 * F, F) == 2
    assert equal_up_to_unit(F + 1, F) is None


# -- hypothesis: ring axioms and a sympy oracle -------------------------------

small = st.integers(-3, 3)
monos = st.tuples(st.integers(0, 3), st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
poly_st = st.dictionaries(monos, st.fractions(max_denominator=4).filter(lambda c: abs(c) < 5), max_size=5).map(
    lambda d: MultiPoly(d, VARS))


@given(poly_st, poly_st, poly_st)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == MultiPoly({}, VARS)
    assert (a * b).diff("x") == a.diff("x") * b + a * b.diff("x")


def _sym(p):
    X = sympy.symbols(VARS)
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([s**k for s, k in zip(X, e)])
               for e, c in p.terms.items()) if p.terms else sympy.Integer(0)


@given(poly_st, poly_st, st.tuples(small, small, small, small))
def test_product_and_eval_match_sympy(a, b, pt):
    X = sympy.symbols(VARS)
    assert sympy.expand(_sym(a * b) - _sym(a) * _sym(b)) == 0
    assert Fraction(str(_sym(a).subs(dict(zip(X, pt))))) == a(*pt)


@given(poly_st, poly_st)
def test_substitution_matches_sympy(a, b):
    X = sympy.symbols(VARS)
    assert sympy.expand(_sym(a.subs("y", b)) - _sym(a).subs(X[1], _sym(b))) == 0
