from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsdiv import lseries as ls
from torsdiv import linkcheck as lc
from torsdiv.exactring import BadDenominator
from torsdiv.lseries import FpPoint, PSeries2
from torsdiv.mpoly import MultiPoly, evaluate


def _binom_half(k):
    out = Fraction(1)
    for i in range(k):
        out *= Fraction(1, 2) - i
    return out / factorial(k)


def test_sqrt_series_at_one():
    x, y, z = MultiPoly.gens(("x", "y", "z"))
    Z = ls.hensel_poly(z * z - x, 1, 0, 1, 7, 3, 3)
    M = 7**3
    want = [int(_binom_half(k).numerator * pow(_binom_half(k).denominator, -1, M) % M) for k in range(4)]
    assert [Z.table()[i][0] for i in range(4)] == want == [1, 172, 300, 193]
    assert all(c == 0 for i, row in enumerate(Z.table()) for c in row[1:])
    assert (Z * Z - PSeries2.coordinate(0, 7, 3, 3, (1, 0))).is_zero()


def test_points_n1_p5():
    pts = {(q.a, q.b, q.c): q for q in ls.find_points(1, 5)}
    for a in range(5):
        q = pts[(a, (1 - a) % 5, 4)]
        assert q.on_geometric and q.nonacyclic
    assert pts[(3, 3, 4)].dz_nonzero
    assert not pts[(2, 4, 4)].abs_irreducible
    assert FpPoint.at(3, 3, 4, 1, 5) == pts[(3, 3, 4)]


def test_flags_recomputable():
    for q in ls.find_points(2, 7):
        r = FpPoint.at(q.a, q.b, q.c, 2, 7)
        assert r.to_json() == q.to_json()


def test_l_function_examples():
    rep = ls.l_function(FpPoint.at(3, 3, 4, 1, 5))
    assert (rep.const_val, rep.lin_x, rep.lin_y, rep.verdict) == (0, 0, 0, "pass")
    assert rep.quad_rank >= 1
    control = FpPoint.at(0, 0, 0, 1, 5)
    assert control.on_geometric and not control.nonacyclic
    rep = ls.l_function(control)
    assert rep.const_val != 0 and rep.verdict == "not-applicable"


@pytest.mark.parametrize("n,p", [(1, 5), (2, 7)])
def test_survey_examples(n, p):
    a = ls.l_survey(n, p)
    b = ls.l_survey(n, p, workers=1)
    assert a["ok"] and a["summary"]["fail"] == 0 and a["summary"]["study_set"] > 0
    assert a["summary"] == b["summary"]
    assert [r.to_json() for r in a["reports"]] == [r.to_json() for r in b["reports"]]


def test_caps_and_bad_input():
    with pytest.raises(ls.CapExceeded):
        ls.find_points(1, 103)
    with pytest.raises(ValueError):
        ls.find_points(1, 9)
    with pytest.raises(BadDenominator):
        PSeries2.constant(Fraction(1, 5), 5, 3, 2)


def test_permuted_point_is_handled():
    s = ls.l_survey(2, 11)
    extra = [r for r in s["reports"] if not r.point.in_study_set]
    assert extra and all(r.permutation != (0, 1, 2) and r.verdict == "pass" for r in extra)


# -- series arithmetic ---------------------------------------------------------

coef = st.integers(0, 10**12)


@st.composite
def series(draw, p=5, N=4, D=3):
    arr = [[draw(coef) for _ in range(D + 1)] for _ in range(D + 1)]
    return PSeries2(arr, p, N, D, (1, 2))


@given(series(), series(), series())
def test_series_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a - a).is_zero()


@given(series())
def test_series_inverse(a):
    if a.is_unit():
        assert (a * a.inverse() - 1).is_zero()


@pytest.mark.parametrize("M", [11**8, 101**8])
def test_object_and_int64_paths(M):
    p = 11 if M == 11**8 else 101
    s = PSeries2([[3, 1], [2, 0]], p, 8, 4, (0, 0))
    assert s.c.dtype == (np.int64 if p == 11 else object)
    assert (s * s.inverse() - 1).is_zero()


# -- family evaluation -------------------------------------------------------------

@settings(max_examples=60)
@given(st.integers(1, 4), st.tuples(*[st.integers(-20, 20)] * 3))
def test_family_values_match_polynomials(n, pt):
    fp = lc.family_polys(n)
    got = ls.family_values(n, *pt, need=("f", "tau", "fx", "fy", "fz"))
    P = (*pt, 0)
    assert got["f"] == evaluate(fp.f_exp, P)
    assert got["tau"] == evaluate(fp.tau_exp, P)
    for k, w in zip(("fx", "fy", "fz"), fp.exp_partials):
        assert got[k] == evaluate(w, P)


# -- properties at every lifted point -----------------------------------------------

STUDY = [q for n in (1, 2, 3) for p in (5, 7, 11) for q in ls.find_points(n, p) if q.in_regular_set]


@settings(max_examples=40)
@given(st.sampled_from(STUDY))
def test_hensel_defect_and_precision_monotonicity(pt):
    perm = pt.permutation() if not pt.dz_nonzero else (0, 1, 2)
    Z = ls.hensel_implicit(pt, 8, 4)
    coords = (pt.a, pt.b, pt.c)
    assert Z.const() % pt.p == coords[perm[2]]
    X = PSeries2.coordinate(0, pt.p, 8, 4, Z.center)
    Y = PSeries2.coordinate(1, pt.p, 8, 4, Z.center)
    assert ls._permuted(pt.n, perm, "f")(X, Y, Z).is_zero()
    assert ls.hensel_implicit(pt, 10, 6).truncate(8, 4) == Z
    assert ls.l_series(pt, 10, 6)[0].truncate(8, 4) == ls.l_series(pt, 8, 4)[0]


@settings(max_examples=10)
@given(st.sampled_from(STUDY))
def test_verdict_independent_of_lift(pt):
    assert ls.recenter_check(pt)["ok"]


def test_hensel_rejects_singular_start():
    x, y, z = MultiPoly.gens(("x", "y", "z"))
    with pytest.raises(ls.NewtonStall):
        ls.hensel_poly(z * z - x, 0, 0, 0, 7, 3, 3)
