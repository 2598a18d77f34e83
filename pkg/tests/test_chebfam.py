from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from torsdiv import chebfam as cf
from torsdiv.exactring import uadd, ueval, umul, usub
from torsdiv.mpoly import MultiPoly

(v,) = MultiPoly.gens(("v",))
V = sympy.Symbol("v")


def _as_sym(coeffs):
    return sum((sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * V**i
                for i, c in enumerate(coeffs)), sympy.Integer(0))


def test_frozen_values():
    assert cf.S(2, ("v",)) == v**2 - 1
    assert cf.S(3, ("v",)) == v**3 - 2 * v
    assert cf.T(2, ("v",)) == v**2 - 2
    assert cf.T(3, ("v",)) == v**3 - 3 * v
    assert cf.P(0, ("v",)) == MultiPoly.const(1, ("v",))
    assert cf.P(-1, ("v",)).is_zero()
    assert cf.S_coeffs(-2) == (-1,) and cf.S_coeffs(-1) == () and cf.T_coeffs(-1) == (0, 1)
    assert ueval(cf.S_coeffs(3), 2) == 4
    assert ueval(cf.S_coeffs(2), -2) == 3


@pytest.mark.parametrize("k", range(0, 25))
def test_against_sympy_chebyshev(k):
    assert sympy.expand(_as_sym(cf.S_coeffs(k)) - sympy.chebyshevu(k, V / 2)) == 0
    assert sympy.expand(_as_sym(cf.T_coeffs(k)) - 2 * sympy.chebyshevt(k, V / 2)) == 0
    if k >= 1:
        # closed form for P via a geometric sum of S
        rhs = sympy.cancel((_as_sym(cf.S_coeffs(k + 1)) - _as_sym(cf.S_coeffs(k)) - 1) / (V - 2))
        assert sympy.expand(_as_sym(cf.P_coeffs(k)) - rhs) == 0


def test_identity_suite_and_separability():
    rep = cf.identity_suite(50)
    assert rep["ok"] and rep["first_failure"] is None
    assert all(cf.separability_check(n) for n in (2, 4, 10))
    with pytest.raises(ValueError):
        cf.identity_suite(1)


def test_parity_split_frozen():
    assert cf.parity_split_coeffs(3) == ((-1, 1), (1, 1))
    assert cf.parity_split_coeffs(2) == ((0, 1), (1,))


@pytest.mark.parametrize("n", range(2, 16))
def test_parity_split_degrees(n):
    go, ge = cf.parity_split_coeffs(n)
    assert (len(go) - 1) + (len(ge) - 1) == n - 1


@given(st.integers(-30, 30))
def test_cassini(k):
    # S_k^2 - S_{k+1} S_{k-1} = 1 for every integer k
    lhs = usub(umul(cf.S_coeffs(k), cf.S_coeffs(k)), umul(cf.S_coeffs(k + 1), cf.S_coeffs(k - 1)))
    assert lhs == (1,)


@given(st.integers(0, 20), st.fractions(min_value=-5, max_value=5).filter(lambda a: a != 0))
def test_laurent_numeric(k, a):
    t = a + 1 / a
    assert ueval(cf.T_coeffs(k), t) == a**k + a**-k
    if a * a != 1:
        assert ueval(cf.S_coeffs(k), t) * (a - 1 / a) == a ** (k + 1) - a ** -(k + 1)


@given(st.integers(-10, 30))
def test_derivative_recursion(k):
    # S'_k = S_{k-1} + v S'_{k-1} - S'_{k-2}
    rhs = usub(uadd(cf.S_coeffs(k - 1), umul((0, 1), cf.dS_coeffs(k - 1))), cf.dS_coeffs(k - 2))
    assert cf.dS_coeffs(k) == rhs
