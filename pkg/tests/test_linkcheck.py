import json

import pytest

from torsdiv import chebfam as cf
from torsdiv import linkcheck as lc
from torsdiv.mpoly import VARS, MultiPoly

x, y, z, v = MultiPoly.gens(VARS)


def test_family_at_small_n():
    assert lc.family_polys(1).f_exp == lc.whitehead_f()
    assert lc.family_polys(1).tau_exp * 2 == lc.whitehead_tau()
    f2 = lc.family_polys(2).f_n
    assert f2 == x * y * v - (x * y - z) - z * (v**2 - 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_chain_rule_partials(n):
    fp = lc.family_polys(n)
    tr = x**2 + y**2 + z**2 - x * y * z - 2
    for w, got in zip("xyz", fp.chain_partials):
        # substituting v turns chain-rule partials into partials of f_exp
        assert got.subs("v", tr) == fp.f_exp.diff(w)


def test_whitehead_certificate():
    cert = lc.whitehead_divisor_check()
    assert cert.ok and cert.multiplicity == 2
    assert lc.verify_certificate(cert)
    assert lc.verify_certificate(json.loads(json.dumps(cert.to_json())))
    names = {e["name"] for e in cert.evidence}
    assert {"square_factor_identity", "line_membership", "line_transversality"} <= names
    tampered = cert.to_json()
    tampered["evidence"][0]["holds"] = False
    assert not lc.verify_certificate(tampered)


def test_reducible_witness():
    assert lc.reducible_poly().subs("x", 2 * lc.ONE).subs("z", y).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_smoothness(n):
    rep = lc.smoothness_report(n)
    assert rep["ok"]


def test_smoothness_direct_route_agrees():
    assert lc.smooth_geometric(2, "direct")["trivial"]


@pytest.mark.parametrize("n", range(2, 11))
def test_nongeometric(n):
    rep = lc.nongeometric_check(n)
    assert rep["ok"], rep


def test_nongeometric_frozen_n3():
    rep = lc.nongeometric_check(3)
    assert rep["g_odd"] == ["-1", "1"] and rep["g_even"] == ["1", "1"]


def test_geometric_minor_formula():
    gg = lc.geometric_gens(2)
    T2 = v**2 - 2
    assert gg.M == (T2 + 2) * (x - y) * (2 * T2 - v + 2)


def test_geometric_multiplicity_n2():
    cert = lc.geometric_mult_check(2)
    assert cert.ok
    items = {e["name"]: e for e in cert.evidence if not e.get("informational")}
    assert items["saturated_equality"]["holds"]
    assert items["gh_transversality"]["minor_saturation_unchanged"]
    info = [e for e in cert.evidence if e.get("informational")]
    # dropping T_n + 2 from the saturating product does not change the result
    assert info and info[0]["holds_without_tn_plus_2"]


def test_diagonal_elimination():
    rep = lc.diagonal_elimination_check()
    assert rep["exact_principal_match"] and rep["expected_in_ideal"]
    assert rep["basis_str"] == ["x^4 -x^2*y^2 -4*x^3 +2*x*y^2 +5*x^2 -2*x"]
    assert rep["point_on_line"] == "0"


def test_equal_up_to_units():
    U = [x - 2]
    got = lc.equal_up_to_units(3 * (x - 2) ** 2 * y, y, U)
    assert got is not None
